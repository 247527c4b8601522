//! Kac-table formulas and finite-size fitting.
//!
//! Conventions: `n = −2 cos(πβ²)` with `β² ∈ [1, 2]` on the dilute branch
//! and `β² ∈ (0, 1]` on the dense branch; `c = 13 − 6β² − 6/β²`;
//! `P_{(r,s)} = (βr − s/β)/2` and `Δ_{(r,s)} = P²_{(r,s)} − P²_{(1,1)}`.
//! The cylinder estimates fitted here are
//! `f(L) = f(∞) − πc_eff/(6L²) + A/L⁴` and polynomial extrapolations in
//! `1/L²`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CftError {
    #[error("loop fugacity {0} outside (-2, 2)")]
    NOutOfRange(f64),
    #[error("fit needs distinct sizes")]
    DegenerateSizes,
    #[error("{0} points are not enough for an order-{1} fit")]
    InsufficientPoints(usize, usize),
    #[error("no bracketed peak of c_eff in the K interval")]
    NoBracketedPeak,
}

pub type Result<T> = std::result::Result<T, CftError>;

/// Coulomb-gas branch selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Dilute,
    Dense,
}

/// Kac parametrization at coupling `β²`.
#[derive(Clone, Copy, Debug)]
pub struct KacParams {
    pub beta2: f64,
}

impl KacParams {
    pub fn new(beta2: f64) -> Self {
        KacParams { beta2 }
    }

    /// From the loop fugacity on a chosen branch.
    pub fn from_n(n: f64, branch: Branch) -> Result<Self> {
        Ok(KacParams { beta2: beta2_from_n(n, branch)? })
    }

    pub fn n(&self) -> f64 {
        -2.0 * (std::f64::consts::PI * self.beta2).cos()
    }

    pub fn central_charge(&self) -> f64 {
        central_charge(self.beta2)
    }

    pub fn p(&self, r: f64, s: f64) -> f64 {
        0.5 * (self.beta2.sqrt() * r - s / self.beta2.sqrt())
    }

    /// Conformal weight `Δ_{(r,s)} = P² − P²_{(1,1)}`.
    pub fn delta(&self, r: f64, s: f64) -> f64 {
        let p = self.p(r, s);
        let p11 = self.p(1.0, 1.0);
        p * p - p11 * p11
    }

    /// Cylinder exponent `x_{(r,s)} = Δ_{(r,s)} + Δ_{(r,−s)}`.
    pub fn x(&self, r: f64, s: f64) -> f64 {
        self.delta(r, s) + self.delta(r, -s)
    }
}

/// `c = 13 − 6β² − 6/β²`.
pub fn central_charge(beta2: f64) -> f64 {
    13.0 - 6.0 * beta2 - 6.0 / beta2
}

/// Invert `n = −2cos(πβ²)` on a branch: `β² ∈ [1,2]` (dilute) or `(0,1]`
/// (dense). Mutually inverse with [`KacParams::n`] to better than 1e−12.
pub fn beta2_from_n(n: f64, branch: Branch) -> Result<f64> {
    if !(-2.0..=2.0).contains(&n) || n.abs() >= 2.0 {
        return Err(CftError::NOutOfRange(n));
    }
    let x = (-n / 2.0).acos() / std::f64::consts::PI; // in (0, 1)
    Ok(match branch {
        Branch::Dense => x,
        Branch::Dilute => 2.0 - x,
    })
}

/// Result of a finite-size fit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub value: f64,
    /// Bulk term `f(∞)` for central-charge fits; extrapolated value
    /// duplicate otherwise.
    pub f_infinity: Option<f64>,
    /// `A` of the `A/L⁴` term in three-point fits.
    pub amplitude: Option<f64>,
    pub sizes_used: Vec<u32>,
    pub residual: f64,
    /// Half the spread between consecutive extrapolation orders, when an
    /// error estimate applies.
    pub error: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitKind {
    CentralCharge2pt,
    CentralCharge3pt,
    KcPeak,
    Extrapolation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CeffMode {
    TwoPoint,
    ThreePoint,
}

/// Solve `f(L) = f(∞) − π c_eff / (6 L²) [+ A/L⁴]` exactly through the
/// given consecutive sizes (two for the two-point form, three with the
/// `1/L⁴` term).
pub fn fit_ceff(points: &[(u32, f64)], mode: CeffMode) -> Result<FitResult> {
    let need = match mode {
        CeffMode::TwoPoint => 2,
        CeffMode::ThreePoint => 3,
    };
    if points.len() != need {
        return Err(CftError::InsufficientPoints(points.len(), need));
    }
    for w in points.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(CftError::DegenerateSizes);
        }
    }
    let pi = std::f64::consts::PI;
    match mode {
        CeffMode::TwoPoint => {
            let (l1, f1) = (points[0].0 as f64, points[0].1);
            let (l2, f2) = (points[1].0 as f64, points[1].1);
            let u1 = 1.0 / (l1 * l1);
            let u2 = 1.0 / (l2 * l2);
            // f = finf - (pi c / 6) u
            let c = 6.0 * (f2 - f1) / (pi * (u1 - u2));
            let finf = f1 + pi * c / 6.0 * u1;
            Ok(FitResult {
                kind: FitKind::CentralCharge2pt,
                value: c,
                f_infinity: Some(finf),
                amplitude: None,
                sizes_used: points.iter().map(|p| p.0).collect(),
                residual: 0.0,
                error: None,
            })
        }
        CeffMode::ThreePoint => {
            // 3x3 linear system in (finf, c, A)
            let mut m = [[0.0f64; 3]; 3];
            let mut b = [0.0f64; 3];
            for (i, &(l, f)) in points.iter().enumerate() {
                let l = l as f64;
                let u = 1.0 / (l * l);
                m[i][0] = 1.0;
                m[i][1] = -pi / 6.0 * u;
                m[i][2] = u * u;
                b[i] = f;
            }
            let sol = solve3(m, b).ok_or(CftError::DegenerateSizes)?;
            Ok(FitResult {
                kind: FitKind::CentralCharge3pt,
                value: sol[1],
                f_infinity: Some(sol[0]),
                amplitude: Some(sol[2]),
                sizes_used: points.iter().map(|p| p.0).collect(),
                residual: 0.0,
                error: None,
            })
        }
    }
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b2| m[a][col].abs().partial_cmp(&m[b2][col].abs()).unwrap())?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    Some([b[0] / m[0][0], b[1] / m[1][1], b[2] / m[2][2]])
}

/// Least-squares polynomial fit in `u = 1/L²` of the given order; the
/// extrapolated value is the constant term. The error bar is half the
/// spread against the order-`(order+1)` fit when enough points exist.
pub fn extrapolate_inv_l2(series: &[(u32, f64)], order: usize) -> Result<FitResult> {
    let value = poly_fit_constant(series, order)?;
    let error = if series.len() >= order + 2 {
        poly_fit_constant(series, order + 1)
            .ok()
            .map(|v2| 0.5 * (v2 - value).abs())
    } else {
        None
    };
    // rms residual of the chosen order
    let coeffs = poly_fit(series, order)?;
    let mut rss = 0.0;
    for &(l, v) in series {
        let u = 1.0 / (l as f64 * l as f64);
        let fit: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c);
        rss += (v - fit) * (v - fit);
    }
    Ok(FitResult {
        kind: FitKind::Extrapolation,
        value,
        f_infinity: None,
        amplitude: None,
        sizes_used: series.iter().map(|p| p.0).collect(),
        residual: (rss / series.len() as f64).sqrt(),
        error,
    })
}

fn poly_fit_constant(series: &[(u32, f64)], order: usize) -> Result<f64> {
    Ok(poly_fit(series, order)?[0])
}

/// Least-squares coefficients of `v(u) = Σ a_k u^k`, `u = 1/L²`, via normal
/// equations with partial pivoting.
fn poly_fit(series: &[(u32, f64)], order: usize) -> Result<Vec<f64>> {
    let m = order + 1;
    if series.len() < m {
        return Err(CftError::InsufficientPoints(series.len(), order));
    }
    let mut ata = vec![vec![0.0f64; m]; m];
    let mut atb = vec![0.0f64; m];
    for &(l, v) in series {
        let u = 1.0 / (l as f64 * l as f64);
        let mut pows = Vec::with_capacity(m);
        let mut p = 1.0;
        for _ in 0..m {
            pows.push(p);
            p *= u;
        }
        for i in 0..m {
            for j in 0..m {
                ata[i][j] += pows[i] * pows[j];
            }
            atb[i] += pows[i] * v;
        }
    }
    // gaussian elimination
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&a, &b| ata[a][col].abs().partial_cmp(&ata[b][col].abs()).unwrap())
            .unwrap();
        if ata[piv][col].abs() < 1e-280 {
            return Err(CftError::DegenerateSizes);
        }
        ata.swap(col, piv);
        atb.swap(col, piv);
        for row in 0..m {
            if row == col {
                continue;
            }
            let f = ata[row][col] / ata[col][col];
            for k in col..m {
                ata[row][k] -= f * ata[col][k];
            }
            atb[row] -= f * atb[col];
        }
    }
    Ok((0..m).map(|i| atb[i] / ata[i][i]).collect())
}

/// Peak of a smooth function over a bracketing interval: coarse scan, local
/// quadratic through the three nearest points, then golden-section
/// refinement to `tol_k`.
pub fn find_peak(
    mut f: impl FnMut(f64) -> f64,
    k_lo: f64,
    k_hi: f64,
    scan_points: usize,
    tol_k: f64,
) -> Result<(f64, f64)> {
    let n = scan_points.max(4);
    let mut best = (k_lo, f64::NEG_INFINITY);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let k = k_lo + (k_hi - k_lo) * i as f64 / (n - 1) as f64;
        let v = f(k);
        values.push((k, v));
        if v > best.1 {
            best = (k, v);
        }
    }
    let idx = values.iter().position(|&(k, _)| k == best.0).unwrap();
    if idx == 0 || idx == n - 1 {
        return Err(CftError::NoBracketedPeak);
    }
    // quadratic through the three nearest points to center the bracket
    let (x0, y0) = values[idx - 1];
    let (x1, y1) = values[idx];
    let (x2, y2) = values[idx + 1];
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    let vertex = if a < 0.0 { -b / (2.0 * a) } else { x1 };
    let half = (x2 - x0) / 2.0;
    let mut lo = (vertex - half).max(k_lo);
    let mut hi = (vertex + half).min(k_hi);
    // golden-section maximization
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol_k {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f(d);
        }
    }
    let k_peak = 0.5 * (lo + hi);
    let v_peak = f(k_peak);
    Ok((k_peak, v_peak))
}

/// Identify a measured exponent with the nearest Kac `x_{(r,s)}` inside a
/// window, scanning a bounded `(r, s)` grid (`2r ≤ max_lines`,
/// `s ∈ (1/r)ℤ ∩ (−1, 1]`, plus the `(1, s)` tower of the identity sector).
pub fn identify_exponent(
    x: f64,
    kac: &KacParams,
    max_lines: u32,
    window: f64,
) -> Option<(f64, f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    let mut consider = |r: f64, s: f64| {
        let xk = kac.x(r, s);
        let d = (x - xk).abs();
        if d <= window && best.map(|(_, _, bx)| d < (x - bx).abs()).unwrap_or(true) {
            best = Some((r, s, xk));
        }
    };
    for lines in 1..=max_lines {
        let r = lines as f64 / 2.0;
        let l = lines as i32;
        for k in -l..=l {
            let s = 2.0 * k as f64 / lines as f64;
            if s <= -1.0 || s > 1.0 {
                continue;
            }
            consider(r, s);
        }
    }
    for s in [1.0f64, 3.0, 5.0] {
        consider(1.0, s);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_values_match_printed_digits() {
        let n = 1.0 / 2.0_f64.sqrt();
        let dilute = KacParams::from_n(n, Branch::Dilute).unwrap();
        let dense = KacParams::from_n(n, Branch::Dense).unwrap();
        assert!((dilute.central_charge() - 0.357946).abs() < 1e-6);
        assert!((dense.central_charge() - (-0.445833)).abs() < 1e-6);
        let ising = KacParams::from_n(1.0, Branch::Dilute).unwrap();
        assert!((ising.central_charge() - 0.5).abs() < 1e-12);
        assert!((ising.beta2 - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn branch_round_trip() {
        for i in 0..200 {
            let n = -1.99 + 3.98 * i as f64 / 199.0;
            for branch in [Branch::Dilute, Branch::Dense] {
                let b2 = beta2_from_n(n, branch).unwrap();
                let back = KacParams::new(b2).n();
                assert!((back - n).abs() < 1e-12, "n={n} branch {branch:?}");
            }
        }
    }

    #[test]
    fn ising_kac_table() {
        let kac = KacParams::from_n(1.0, Branch::Dilute).unwrap();
        // Δ_{(r,s)} = ((4r-3s)² - 1)/48 at β² = 4/3
        let delta = |r: f64, s: f64| ((4.0 * r - 3.0 * s).powi(2) - 1.0) / 48.0;
        for (r, s) in [(0.5, 0.0), (1.0, 0.0), (1.5, 2.0 / 3.0), (2.0, 1.0), (2.5, 0.4)] {
            assert!((kac.delta(r, s) - delta(r, s)).abs() < 1e-14);
        }
        assert!((kac.x(0.5, 0.0) - 0.125).abs() < 1e-14);
        assert!((kac.x(1.0, 0.0) - 0.625).abs() < 1e-14);
        assert!((kac.x(1.0, 1.0) - 1.0).abs() < 1e-14);
        assert!((kac.x(1.5, 0.0) - 35.0 / 24.0).abs() < 1e-14);
        assert!((kac.x(1.5, 2.0 / 3.0) - 1.625).abs() < 1e-14);
        assert!((kac.x(2.0, 0.0) - 2.625).abs() < 1e-14);
        assert!((kac.x(2.0, 0.5) - 87.0 / 32.0).abs() < 1e-14);
        assert!((kac.x(2.0, 1.0) - 3.0).abs() < 1e-14);
        assert!((kac.x(2.5, 0.0) - 33.0 / 8.0).abs() < 1e-14);
        assert!((kac.x(2.5, 0.4) - 837.0 / 200.0).abs() < 1e-14);
        // Δ_{(1,1)} = 0 for any β²; symmetry under (r,s) -> (-r,-s)
        for b2 in [0.7, 1.1, 1.38, 1.9] {
            let k = KacParams::new(b2);
            assert!(k.delta(1.0, 1.0).abs() < 1e-14);
            assert!((k.delta(1.5, 0.5) - k.delta(-1.5, -0.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn ceff_fit_inverts_synthetic_data() {
        let pi = std::f64::consts::PI;
        // exact two-parameter data
        let f = |l: f64| 1.0 - pi / (6.0 * l * l);
        let pts: Vec<(u32, f64)> = [8u32, 9, 10].iter().map(|&l| (l, f(l as f64))).collect();
        let two = fit_ceff(&pts[..2], CeffMode::TwoPoint).unwrap();
        assert!((two.value - 1.0).abs() < 1e-12);
        // with an A/L⁴ term, the two-point fit is biased, three-point exact
        let g = |l: f64| 0.3 - pi * 0.5 / (6.0 * l * l) + 2.0 / (l * l * l * l);
        let pts: Vec<(u32, f64)> = [8u32, 9, 10].iter().map(|&l| (l, g(l as f64))).collect();
        let two = fit_ceff(&pts[..2], CeffMode::TwoPoint).unwrap();
        let three = fit_ceff(&pts, CeffMode::ThreePoint).unwrap();
        assert!((two.value - 0.5).abs() > 1e-3);
        assert!((three.value - 0.5).abs() < 1e-10);
        assert!((three.amplitude.unwrap() - 2.0).abs() < 1e-8);
        assert!((three.f_infinity.unwrap() - 0.3).abs() < 1e-10);
    }

    #[test]
    fn inv_l2_extrapolation() {
        // constant series
        let pts: Vec<(u32, f64)> = (6..=10).map(|l| (l, 0.77)).collect();
        let fit = extrapolate_inv_l2(&pts, 1).unwrap();
        assert!((fit.value - 0.77).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        // exact x + a/L²
        let pts: Vec<(u32, f64)> = (5..=11)
            .map(|l| (l, 0.125 + 3.0 / (l as f64 * l as f64)))
            .collect();
        let fit = extrapolate_inv_l2(&pts, 1).unwrap();
        assert!((fit.value - 0.125).abs() < 1e-12);
        assert!(fit.error.unwrap() < 1e-10);
    }

    #[test]
    fn peak_finder_locates_quadratic_maximum() {
        let f = |k: f64| 0.5 - 30.0 * (k - 0.4132).powi(2) + 5.0 * (k - 0.4132).powi(3);
        let (k, v) = find_peak(f, 0.3, 0.5, 9, 1e-7).unwrap();
        assert!((k - 0.4132).abs() < 1e-5, "k = {k}");
        assert!(v <= 0.5 + 1e-12);
        // unbracketed: monotone function
        assert!(find_peak(|k| k, 0.0, 1.0, 8, 1e-7).is_err());
    }

    #[test]
    fn exponent_identification() {
        let kac = KacParams::from_n(1.0, Branch::Dilute).unwrap();
        let (r, s, x) = identify_exponent(0.126, &kac, 6, 0.05).unwrap();
        assert_eq!((r, s), (0.5, 0.0));
        assert!((x - 0.125).abs() < 1e-12);
        assert!(identify_exponent(0.4, &kac, 6, 0.05).is_none());
    }
}
