use crate::C64;
use serde::{Deserialize, Serialize};

use super::symgroup::Partition;
use super::{AlgebraError, AlgebraFamily, Boundary, Result};

/// A standard-module label.
///
/// - `IdentityLike` is the module with no through-lines where
///   non-contractible loops weigh `n` (the `⟨1,1⟩` sector).
/// - `TlStandard` is `W_{(r,s)}`: `lines = 2r` through-lines and
///   pseudomomentum `s = s_num/s_den`, with phase `z = e^{iπs}` gained per
///   through-line seam crossing. Admissibility requires `z^{2r} = 1`
///   (a simultaneous winding of all lines produces no phase).
/// - `TlTwisted` is the defect (seam) Hilbert space: through-lines acquire
///   an arbitrary phase `twist` per seam crossing; no admissibility
///   constraint is imposed.
/// - `BrauerIrrep` carries `2j = |λ|` through-lines transforming in the
///   symmetric-group irrep `λ` of `S_{2j}`.
/// - `OpenThroughlines` is the open-boundary module `W_r` with `lines = 2r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Sector {
    IdentityLike,
    TlStandard { lines: u32, s_num: i32, s_den: u32 },
    TlTwisted { lines: u32, twist: C64 },
    BrauerIrrep { lambda: Partition },
    OpenThroughlines { lines: u32 },
}

impl Sector {
    pub fn identity() -> Self {
        Sector::IdentityLike
    }

    /// `W_{(r,s)}` given `lines = 2r` and `s = s_num/s_den` in lowest terms.
    pub fn tl(lines: u32, s_num: i32, s_den: u32) -> Self {
        Sector::TlStandard { lines, s_num, s_den }
    }

    pub fn twisted(lines: u32, twist: C64) -> Self {
        Sector::TlTwisted { lines, twist }
    }

    pub fn brauer(lambda: Partition) -> Self {
        Sector::BrauerIrrep { lambda }
    }

    pub fn open(lines: u32) -> Self {
        Sector::OpenThroughlines { lines }
    }

    /// Number of through-lines (`2r` or `2j`).
    pub fn through_lines(&self) -> u32 {
        match self {
            Sector::IdentityLike => 0,
            Sector::TlStandard { lines, .. } => *lines,
            Sector::TlTwisted { lines, .. } => *lines,
            Sector::BrauerIrrep { lambda } => lambda.sum(),
            Sector::OpenThroughlines { lines } => *lines,
        }
    }

    pub fn is_identity_like(&self) -> bool {
        matches!(self, Sector::IdentityLike)
    }

    pub fn lambda(&self) -> Option<&Partition> {
        match self {
            Sector::BrauerIrrep { lambda } => Some(lambda),
            _ => None,
        }
    }

    /// Phase gained by a through-line winding once around the cylinder in
    /// the positive direction.
    pub fn twist_phase(&self) -> C64 {
        match self {
            Sector::TlStandard { s_num, s_den, .. } => {
                C64::from_polar(1.0, std::f64::consts::PI * (*s_num as f64) / (*s_den as f64))
            }
            Sector::TlTwisted { twist, .. } => *twist,
            _ => C64::new(1.0, 0.0),
        }
    }

    /// A short stable tag used in metadata, cache keys and output tables.
    pub fn tag(&self) -> String {
        match self {
            Sector::IdentityLike => "id".into(),
            Sector::TlStandard { lines, s_num, s_den } => {
                format!("r{}s{}/{}", lines, s_num, s_den)
            }
            Sector::TlTwisted { lines, twist } => {
                format!("r{}z{:+.6}{:+.6}i", lines, twist.re, twist.im)
            }
            Sector::BrauerIrrep { lambda } => format!("lam{}", lambda),
            Sector::OpenThroughlines { lines } => format!("open-r{}", lines),
        }
    }

    /// Validate against a family and system size.
    pub fn validate(&self, family: AlgebraFamily, n_sites: usize) -> Result<()> {
        let lines = self.through_lines() as usize;
        if lines > n_sites {
            return Err(AlgebraError::IncompatibleSector(format!(
                "{} through-lines on {} sites",
                lines, n_sites
            )));
        }
        if !family.allows_empty() && (n_sites - lines) % 2 != 0 {
            return Err(AlgebraError::IncompatibleSector(
                "dense family needs N - 2r even".into(),
            ));
        }
        match self {
            Sector::IdentityLike | Sector::TlStandard { .. } | Sector::TlTwisted { .. } => {
                if family.allows_crossings() {
                    return Err(AlgebraError::IncompatibleSector(
                        "TL sector labels do not apply to Brauer families (use an S_2j irrep)"
                            .into(),
                    ));
                }
                if family.boundary == Boundary::Open {
                    return Err(AlgebraError::IncompatibleSector(
                        "periodic sector label on an open chain".into(),
                    ));
                }
            }
            Sector::OpenThroughlines { .. } => {
                if family.boundary == Boundary::Periodic {
                    return Err(AlgebraError::IncompatibleSector(
                        "open sector label on a periodic chain".into(),
                    ));
                }
            }
            Sector::BrauerIrrep { lambda } => {
                if !family.allows_crossings() {
                    return Err(AlgebraError::IncompatibleSector(
                        "symmetric-group irrep labels need a Brauer family".into(),
                    ));
                }
                lambda.validate()?;
            }
        }
        if let Sector::TlStandard { lines, s_num, s_den } = self {
            if *s_den == 0 {
                return Err(AlgebraError::IncompatibleSector("s denominator zero".into()));
            }
            if !(-(*s_den as i32) < *s_num && *s_num <= *s_den as i32) {
                return Err(AlgebraError::IncompatibleSector(
                    "pseudomomentum must satisfy -1 < s <= 1".into(),
                ));
            }
            if *lines > 0 {
                // z^{2r} = e^{iπ s · lines} = 1  <=>  s_num * lines ≡ 0 mod 2 s_den
                let prod = (*s_num as i64) * (*lines as i64);
                if prod.rem_euclid(2 * *s_den as i64) != 0 {
                    return Err(AlgebraError::IncompatibleSector(format!(
                        "e^{{2iπ r s}} != 1 for 2r = {} and s = {}/{}",
                        lines, s_num, s_den
                    )));
                }
            } else if !(*s_num == 0 || *s_num == *s_den as i32) {
                // r = 0 with a twist is only used through TlTwisted
                return Err(AlgebraError::IncompatibleSector(
                    "r = 0 standard sector must have s in {0, 1}".into(),
                ));
            }
        }
        Ok(())
    }

    /// All admissible `(r, s)` sectors with `1 ≤ 2r ≤ max_lines`, in a
    /// deterministic order. Pseudomomenta run over `s ∈ (1/r)ℤ ∩ (−1, 1]`.
    pub fn tl_tower(max_lines: u32, dense_parity: Option<usize>) -> Vec<Sector> {
        let mut out = Vec::new();
        for lines in 1..=max_lines {
            if let Some(n_sites) = dense_parity {
                if (n_sites - lines as usize) % 2 != 0 {
                    continue;
                }
            }
            // s = 2k / lines reduced; enumerate k with -1 < 2k/lines <= 1
            let mut seen = Vec::new();
            let l = lines as i32;
            for k in -l..=l {
                let (num, den) = reduce(2 * k, l);
                if !(-(den as i32) < num && num <= den as i32) {
                    continue;
                }
                if seen.contains(&(num, den)) {
                    continue;
                }
                seen.push((num, den));
            }
            seen.sort_by(|a, b| {
                let va = a.0 as f64 / a.1 as f64;
                let vb = b.0 as f64 / b.1 as f64;
                va.partial_cmp(&vb).unwrap()
            });
            for (num, den) in seen {
                out.push(Sector::tl(lines, num, den));
            }
        }
        out
    }
}

fn reduce(num: i32, den: i32) -> (i32, u32) {
    let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1);
    let sign = if den < 0 { -1 } else { 1 };
    ((num / g as i32) * sign, (den.unsigned_abs() / g).max(1))
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_pseudomomenta() {
        // 2r = 3 (r = 3/2): s ∈ {-2/3, 0, 2/3}
        let tower = Sector::tl_tower(3, None);
        let r32: Vec<_> = tower
            .iter()
            .filter(|s| s.through_lines() == 3)
            .map(|s| s.tag())
            .collect();
        assert_eq!(r32, vec!["r3s-2/3", "r3s0/1", "r3s2/3"]);
        // 2r = 4 (r = 2): s ∈ {-1/2, 0, 1/2, 1}
        let tower = Sector::tl_tower(4, None);
        let r2: Vec<_> = tower
            .iter()
            .filter(|s| s.through_lines() == 4)
            .map(|s| s.tag())
            .collect();
        assert_eq!(r2, vec!["r4s-1/2", "r4s0/1", "r4s1/2", "r4s1/1"]);
    }

    #[test]
    fn winding_constraint_enforced() {
        let fam = AlgebraFamily::dense_periodic();
        // 2r = 1 with s = 1/2 violates z^{2r} = 1
        assert!(Sector::tl(1, 1, 2).validate(fam, 5).is_err());
        assert!(Sector::tl(1, 0, 1).validate(fam, 5).is_ok());
        // λ-sectors rejected for TL families
        assert!(Sector::brauer(Partition::new(vec![1]).unwrap())
            .validate(fam, 5)
            .is_err());
    }
}
