use std::collections::HashMap;
use std::sync::Arc;

use super::link::{LinkState, SiteContent};
use super::symgroup::SymIrrep;
use super::{AlgebraError, AlgebraFamily, Boundary, Result, Sector};

/// Default cap on the number of connectivity states in one sector.
pub const DEFAULT_STATE_CAP: usize = 8_000_000;

/// An enumerated sector basis: the ordered list of admissible link states
/// (deterministic lexicographic order on the canonical encoding) plus, for
/// Brauer sectors, the symmetric-group irrep carried by the through-lines.
///
/// The full vector space has dimension `states.len() × irrep_dim`; vectors
/// are stored with the irrep index fastest.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    pub family: AlgebraFamily,
    pub n_sites: usize,
    pub sector: Sector,
    states: Vec<LinkState>,
    index: HashMap<LinkState, u32>,
    irrep: Option<Arc<SymIrrep>>,
}

impl SectorBasis {
    pub fn enumerate(family: AlgebraFamily, n_sites: usize, sector: &Sector) -> Result<Self> {
        Self::enumerate_capped(family, n_sites, sector, DEFAULT_STATE_CAP)
    }

    pub fn enumerate_capped(
        family: AlgebraFamily,
        n_sites: usize,
        sector: &Sector,
        cap: usize,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(AlgebraError::IncompatibleSector("N must be >= 1".into()));
        }
        sector.validate(family, n_sites)?;
        let lines = sector.through_lines() as usize;
        let mut states = Vec::new();
        let mut scratch = vec![SiteContent::Empty; n_sites];
        enumerate_rec(family, n_sites, 0, lines, &mut scratch, &mut states, cap)?;
        let periodic = family.boundary == Boundary::Periodic;
        if !family.allows_crossings() {
            states.retain(|s| s.tl_valid(periodic));
        }
        states.sort();
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let irrep = match sector.lambda() {
            Some(lambda) => Some(Arc::new(SymIrrep::new(lambda)?)),
            None => None,
        };
        Ok(SectorBasis {
            family,
            n_sites,
            sector: sector.clone(),
            states,
            index,
            irrep,
        })
    }

    pub fn states(&self) -> &[LinkState] {
        &self.states
    }

    pub fn n_classes(&self) -> usize {
        self.states.len()
    }

    pub fn irrep_dim(&self) -> usize {
        self.irrep.as_ref().map(|r| r.dim).unwrap_or(1)
    }

    /// Total vector-space dimension.
    pub fn dim(&self) -> usize {
        self.n_classes() * self.irrep_dim()
    }

    pub fn irrep(&self) -> Option<&Arc<SymIrrep>> {
        self.irrep.as_ref()
    }

    pub fn index_of(&self, state: &LinkState) -> Option<usize> {
        self.index.get(state).map(|&i| i as usize)
    }

    /// CSV dump with columns
    /// `index,canonical_encoding,r,s_or_lambda,winding_signature`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,canonical_encoding,r,s_or_lambda,winding_signature\n");
        let r2 = self.sector.through_lines();
        let r_label = if r2 % 2 == 0 {
            format!("{}", r2 / 2)
        } else {
            format!("{}/2", r2)
        };
        let s_label = match &self.sector {
            Sector::BrauerIrrep { lambda } => format!("{lambda}"),
            Sector::TlStandard { s_num, s_den, .. } => format!("{s_num}/{s_den}"),
            Sector::TlTwisted { twist, .. } => format!("z={:.6}{:+.6}i", twist.re, twist.im),
            _ => "0/1".into(),
        };
        for (i, s) in self.states.iter().enumerate() {
            let winding: String = (0..s.n_sites())
                .filter_map(|a| s.partner(a).filter(|&p| p > a).map(|p| (a, p)))
                .map(|(a, p)| if s.arc_spans_seam(a, p) { '1' } else { '0' })
                .collect();
            out.push_str(&format!(
                "{},\"{}\",{},{},{}\n",
                i,
                s.encoding(),
                r_label,
                s_label,
                if winding.is_empty() { "-".into() } else { winding }
            ));
        }
        out
    }
}

fn enumerate_rec(
    family: AlgebraFamily,
    n: usize,
    site: usize,
    lines_left: usize,
    scratch: &mut Vec<SiteContent>,
    out: &mut Vec<LinkState>,
    cap: usize,
) -> Result<()> {
    if site == n {
        if lines_left == 0 {
            if out.len() >= cap {
                return Err(AlgebraError::SizeOverflow { cap });
            }
            out.push(LinkState::from_contents(scratch));
        }
        return Ok(());
    }
    if !matches!(scratch[site], SiteContent::Empty) {
        // already paired by an earlier arc
        return enumerate_rec(family, n, site + 1, lines_left, scratch, out, cap);
    }
    // sites before `site` marked Empty are deliberate; at and after, undecided
    if family.allows_empty() {
        enumerate_rec(family, n, site + 1, lines_left, scratch, out, cap)?;
    }
    if lines_left > 0 {
        scratch[site] = SiteContent::Through;
        enumerate_rec(family, n, site + 1, lines_left - 1, scratch, out, cap)?;
        scratch[site] = SiteContent::Empty;
    }
    for p in site + 1..n {
        if matches!(scratch[p], SiteContent::Empty) {
            scratch[site] = SiteContent::ArcWith(p);
            scratch[p] = SiteContent::ArcWith(site);
            enumerate_rec(family, n, site + 1, lines_left, scratch, out, cap)?;
            scratch[site] = SiteContent::Empty;
            scratch[p] = SiteContent::Empty;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FamilyKind, Partition};

    fn count(family: AlgebraFamily, n: usize, sector: &Sector) -> usize {
        SectorBasis::enumerate(family, n, sector).unwrap().n_classes()
    }

    #[test]
    fn dense_open_two_throughlines() {
        // exactly one matching of 2 sites with 2 through-lines
        let fam = AlgebraFamily::dense_open();
        assert_eq!(count(fam, 2, &Sector::open(2)), 1);
    }

    #[test]
    fn dense_periodic_identity_counts_are_catalan() {
        let fam = AlgebraFamily::dense_periodic();
        // the two non-crossing pairings of 4 points on a circle
        assert_eq!(count(fam, 4, &Sector::identity()), 2);
        assert_eq!(count(fam, 6, &Sector::identity()), 5);
        assert_eq!(count(fam, 8, &Sector::identity()), 14);
    }

    #[test]
    fn brute_force_dilute_brauer_count() {
        // independent oracle: sum over k of C(N, 2k+lines...) etc. checked
        // against a direct closed-form count for N = 4, one through-line:
        // 4 positions for the line × dilute Brauer pairings of 3 sites
        // (1 empty-or... = 1 + 3 pairings) = 16.
        let fam = AlgebraFamily::dilute_brauer_periodic();
        let lam = Partition::new(vec![1]).unwrap();
        assert_eq!(count(fam, 4, &Sector::brauer(lam)), 16);
    }

    #[test]
    fn brauer_counts_match_double_factorial_sums() {
        let fam = AlgebraFamily::dilute_brauer_periodic();
        let sector = Sector::brauer(Partition::empty());
        // sum_k C(N, 2k) (2k-1)!!
        fn expect(n: u64) -> u64 {
            fn binom(n: u64, k: u64) -> u64 {
                (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
            }
            fn dfact(k: u64) -> u64 {
                (0..k).fold(1, |acc, i| acc * (2 * i + 1))
            }
            (0..=n / 2).map(|k| binom(n, 2 * k) * dfact(k)).sum()
        }
        for n in 2..=8 {
            assert_eq!(count(fam, n, &sector) as u64, expect(n as u64), "N={n}");
        }
    }

    #[test]
    fn ordering_is_stable_and_deduplicated() {
        let fam = AlgebraFamily::new(FamilyKind::DiluteTL, Boundary::Periodic);
        let a = SectorBasis::enumerate(fam, 6, &Sector::identity()).unwrap();
        let b = SectorBasis::enumerate(fam, 6, &Sector::identity()).unwrap();
        assert_eq!(a.states(), b.states());
        let mut dedup = a.states().to_vec();
        dedup.dedup();
        assert_eq!(dedup.len(), a.n_classes());
        for w in a.states().windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn csv_dump_shape() {
        let fam = AlgebraFamily::dense_periodic();
        let basis = SectorBasis::enumerate(fam, 4, &Sector::tl(2, 0, 1)).unwrap();
        let csv = basis.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "index,canonical_encoding,r,s_or_lambda,winding_signature");
        assert_eq!(lines.len(), 1 + basis.n_classes());
    }
}
