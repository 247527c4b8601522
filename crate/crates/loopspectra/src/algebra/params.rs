use crate::C64;
use serde::{Deserialize, Serialize};

use super::{AlgebraError, Result};

/// Loop fugacity and its quantum-group parametrization `n = q + q⁻¹`,
/// together with the twist phase `z` weighting non-contractible windings.
///
/// For `n ∈ (−2, 2)` the construction stores `q = e^{iγ}` with
/// `γ = arccos(n/2) ∈ (0, π)`; for `|n| ≥ 2` it takes the real root with
/// `|q| ≥ 1`. The default twist is `z = q`, so a non-contractible loop
/// weighs `z + z⁻¹ = n` exactly.
///
/// The square root `(−q)^{1/2}` that weighs defect-line crossings is fixed
/// once and for all as `i·q^{1/2}` (principal `q^{1/2}`). On the dilute
/// branch `q = −e^{iπβ²}` this is `e^{iπβ²/2}`, the continuation that makes
/// the seam twist `z₁ = (−q)^{1/2} q` land on the lattice value `−1` at the
/// Ising point.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LoopParams {
    n: C64,
    q: C64,
    z: C64,
}

impl LoopParams {
    /// Construct from a real loop fugacity.
    pub fn from_n_real(n: f64) -> Result<Self> {
        let q = if n.abs() < 2.0 {
            let gamma = (n / 2.0).acos();
            C64::from_polar(1.0, gamma)
        } else {
            // real root with |q| >= 1
            let root = (n + (n * n - 4.0).sqrt().copysign(n)) / 2.0;
            C64::new(root, 0.0)
        };
        Self::from_q(q)
    }

    /// Construct from a given `q ≠ 0`; sets `n = q + q⁻¹` and `z = q`.
    pub fn from_q(q: C64) -> Result<Self> {
        if q.norm() == 0.0 {
            return Err(AlgebraError::InvalidParams("q must be nonzero".into()));
        }
        let n = q + q.inv();
        Ok(LoopParams { n, q, z: q })
    }

    /// Replace the twist phase for non-contractible windings.
    pub fn with_twist(mut self, z: C64) -> Self {
        self.z = z;
        self
    }

    pub fn n(&self) -> C64 {
        self.n
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    /// True when `z` is at its default `q` (non-contractible loops weigh `n`).
    pub fn twist_is_default(&self) -> bool {
        (self.z - self.q).norm() < 1e-14
    }

    /// `(−q)^{1/2} = i·q^{1/2}` with the principal square root of `q`.
    pub fn sqrt_minus_q(&self) -> C64 {
        C64::new(0.0, 1.0) * self.q.sqrt()
    }

    /// `(−q)^{k/2}` for integer `k` (negative allowed), on the fixed branch.
    pub fn minus_q_pow_half(&self, k: i32) -> C64 {
        self.sqrt_minus_q().powi(k)
    }

    /// Verify the stored pair satisfies `n = q + q⁻¹` to 1e−12.
    pub fn check_consistency(&self) -> Result<()> {
        let res = (self.n - (self.q + self.q.inv())).norm();
        if res > 1e-12 {
            return Err(AlgebraError::InvalidParams(format!(
                "|n - (q + 1/q)| = {res:.3e} exceeds 1e-12"
            )));
        }
        Ok(())
    }

    /// Strict-mode check that `q` is not a root of unity of order ≤ `max_order`.
    pub fn assert_generic_q(&self, max_order: u32) -> Result<()> {
        if (self.q.norm() - 1.0).abs() > 1e-12 {
            return Ok(());
        }
        for m in 1..=max_order {
            if (self.q.powu(m) - C64::new(1.0, 0.0)).norm() < 1e-9 {
                return Err(AlgebraError::InvalidParams(format!(
                    "q is a root of unity of order {m}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_q_relation_holds_at_construction() {
        for &n in &[-1.5, -0.5, 0.0, 0.5, 1.0 / 2.0_f64.sqrt(), 1.0, 1.5] {
            let p = LoopParams::from_n_real(n).unwrap();
            p.check_consistency().unwrap();
            assert!((p.n() - C64::new(n, 0.0)).norm() < 1e-14);
        }
        // integer n beyond the unit circle
        let p = LoopParams::from_n_real(3.0).unwrap();
        p.check_consistency().unwrap();
        assert!((p.q().re - (3.0 + 5.0_f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn default_twist_reproduces_n() {
        let p = LoopParams::from_n_real(0.5).unwrap();
        let z = p.z();
        assert!((z + z.inv() - p.n()).norm() < 1e-14);
    }

    #[test]
    fn sqrt_branch_squares_to_minus_q() {
        for &n in &[0.0, 0.5, 1.0, 1.0 / 2.0_f64.sqrt(), 3.0] {
            let p = LoopParams::from_n_real(n).unwrap();
            let s = p.sqrt_minus_q();
            assert!((s * s + p.q()).norm() < 1e-14);
        }
        // Ising point: (-q)^{1/2} = e^{2πi/3}, so the seam twist z1 = (-q)^{1/2} q = -1.
        let p = LoopParams::from_n_real(1.0).unwrap();
        let z1 = p.sqrt_minus_q() * p.q();
        assert!((z1 - C64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn generic_q_check_flags_roots_of_unity() {
        let ising = LoopParams::from_n_real(1.0).unwrap(); // q = e^{iπ/3}, order 6
        assert!(ising.assert_generic_q(8).is_err());
        let generic = LoopParams::from_n_real(1.0 / 2.0_f64.sqrt()).unwrap();
        assert!(generic.assert_generic_q(64).is_ok());
    }
}
