//! Orchestration of the finite-size protocols: free-energy sweeps,
//! effective-central-charge peaks, critical-point extrapolation and
//! exponent extraction.
//!
//! These drive the axial dilute Brauer model. At `w = 0` the dynamics never
//! creates crossed pairings, so the identity sector of the crossing-free
//! dilute algebra is used instead of the full Brauer pairing basis (same
//! physics, far fewer states, and no spectator states that the `w = 0`
//! dynamics cannot reach).

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{AlgebraFamily, LoopParams, Partition, Sector, SectorBasis};
use crate::cft::{self, CeffMode, CftError, FitResult};
use crate::spectral::{self, LinearOp, SpectralError};
use crate::transfer::{AxialFactory, ModelParams, TransferError};
use crate::C64;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Cft(#[from] CftError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

pub type Result<T> = std::result::Result<T, SweepError>;

/// Sector basis used for the ground-state (free-energy) runs of the dilute
/// Brauer model at crossing weight `w`.
pub fn ground_family(w: f64) -> (AlgebraFamily, Sector) {
    if w == 0.0 {
        (AlgebraFamily::dilute_periodic(), Sector::identity())
    } else {
        (
            AlgebraFamily::dilute_brauer_periodic(),
            Sector::brauer(Partition::empty()),
        )
    }
}

/// Cached row factories and warm-start vectors for ground-state free
/// energies `f(L, K) = ln Λ₀ / L`.
pub struct FreeEnergyEngine {
    pub n: f64,
    pub w: f64,
    loop_params: LoopParams,
    factories: HashMap<u32, AxialFactory>,
    warm: HashMap<u32, Vec<f64>>,
    pub tol: f64,
    pub max_iter: u32,
    pub evaluations: u64,
}

impl FreeEnergyEngine {
    pub fn new(n: f64, w: f64) -> Result<Self> {
        Ok(FreeEnergyEngine {
            n,
            w,
            loop_params: LoopParams::from_n_real(n)?,
            factories: HashMap::new(),
            warm: HashMap::new(),
            tol: 1e-12,
            max_iter: 100_000,
            evaluations: 0,
        })
    }

    fn factory(&mut self, l: u32) -> Result<&AxialFactory> {
        if !self.factories.contains_key(&l) {
            let (family, sector) = ground_family(self.w);
            let f = AxialFactory::new(family, l as usize, &sector, false)?;
            self.factories.insert(l, f);
        }
        Ok(&self.factories[&l])
    }

    /// Leading eigenvalue of the row at `(L, K)` by warm-started power
    /// iteration (the ground-sector operator is entrywise nonnegative).
    pub fn lambda0(&mut self, l: u32, k: f64) -> Result<f64> {
        let lp = self.loop_params;
        let w = self.w;
        let op = {
            let factory = self.factory(l)?;
            factory.operator(&ModelParams::new(lp, k, w))?
        };
        let warm = self.warm.get(&l).map(|v| v.as_slice());
        let (lambda, vec, _iters) =
            spectral::power_leading_real(&op, self.tol, self.max_iter, warm)?;
        self.warm.insert(l, vec);
        self.evaluations += 1;
        Ok(lambda)
    }

    pub fn free_energy(&mut self, l: u32, k: f64) -> Result<f64> {
        let lam = self.lambda0(l, k)?;
        Ok(spectral::free_energy_per_site(lam, l)?)
    }

    /// `c_eff(K)` at size `L` from the consecutive sizes `(L-2, L-1, L)`
    /// (three-point) or `(L-1, L)` (two-point).
    ///
    /// The fit formula takes the thermodynamic free energy per vertex,
    /// `−ln Λ₀ / L`; with it, `c_eff(K)` peaks at the critical point with
    /// the physical central charge.
    pub fn ceff(&mut self, l: u32, k: f64, mode: CeffMode) -> Result<f64> {
        let sizes: Vec<u32> = match mode {
            CeffMode::TwoPoint => vec![l - 1, l],
            CeffMode::ThreePoint => vec![l - 2, l - 1, l],
        };
        let mut pts = Vec::with_capacity(sizes.len());
        for s in sizes {
            pts.push((s, -self.free_energy(s, k)?));
        }
        Ok(cft::fit_ceff(&pts, mode)?.value)
    }
}

/// One finite-size critical-point estimate: the peak of `c_eff(K)`.
#[derive(Clone, Debug)]
pub struct KcPoint {
    pub l: u32,
    pub kc: f64,
    pub c: f64,
}

/// Full peak-search result with `1/L²` extrapolations.
#[derive(Clone, Debug)]
pub struct KcSearch {
    pub points: Vec<KcPoint>,
    pub kc: FitResult,
    pub c: FitResult,
}

/// Locate `K_c(L)` for each size by golden-section peak search on the
/// three-point `c_eff(K)` (tolerance `tol_k` in `K`), then extrapolate
/// `K_c(L)` and `c(L)` polynomially in `1/L²`.
pub fn find_kc(
    engine: &mut FreeEnergyEngine,
    sizes: &[u32],
    k_lo: f64,
    k_hi: f64,
    scan_points: usize,
    tol_k: f64,
    extrap_order: usize,
) -> Result<KcSearch> {
    let mut points = Vec::with_capacity(sizes.len());
    let mut window = (k_lo, k_hi);
    for &l in sizes {
        let mut eval_err: Option<SweepError> = None;
        let (kc, c) = {
            let f = |k: f64| -> f64 {
                match engine.ceff(l, k, CeffMode::ThreePoint) {
                    Ok(v) => v,
                    Err(e) => {
                        eval_err.get_or_insert(e);
                        f64::NEG_INFINITY
                    }
                }
            };
            cft::find_peak(f, window.0, window.1, scan_points, tol_k)?
        };
        if let Some(e) = eval_err {
            return Err(e);
        }
        points.push(KcPoint { l, kc, c });
        // successive sizes move little: tighten the scan window
        let half = 0.35 * (window.1 - window.0);
        window = (kc - half, kc + half);
    }
    let kc_series: Vec<(u32, f64)> = points.iter().map(|p| (p.l, p.kc)).collect();
    let c_series: Vec<(u32, f64)> = points.iter().map(|p| (p.l, p.c)).collect();
    let kc = cft::extrapolate_inv_l2(&kc_series, extrap_order)?;
    let c = cft::extrapolate_inv_l2(&c_series, extrap_order)?;
    Ok(KcSearch { points, kc, c })
}

/// Spectrum of the dilute Brauer row in a `λ`-sector at one size.
pub fn brauer_sector_spectrum(
    n: f64,
    w: f64,
    k: f64,
    lambda: &Partition,
    l: u32,
    n_eigs: usize,
    tol: f64,
    seed: u64,
) -> Result<(Arc<SectorBasis>, Vec<C64>, Vec<f64>)> {
    let family = AlgebraFamily::dilute_brauer_periodic();
    let sector = Sector::brauer(lambda.clone());
    let factory = AxialFactory::new(family, l as usize, &sector, false)?;
    let lp = LoopParams::from_n_real(n)?;
    let op = factory.operator(&ModelParams::new(lp, k, w))?;
    let k_eff = n_eigs.min(op.dim());
    let (vals, resids, _) = spectral::leading_spectrum(&op, k_eff, tol, seed)?;
    Ok((Arc::clone(factory.basis()), vals, resids))
}

/// Scaling-dimension tracks `x_i(L)` across sizes, measured against the
/// ground sector's `Λ₀(L)`, with complex-pair filtering optional.
pub struct ExponentTracks {
    /// Per size: the sector eigenvalues used.
    pub spectra: Vec<(u32, Vec<C64>)>,
    /// `tracks[i]` = the series of `x_i(L)` (sorted by `x` at each size).
    pub tracks: Vec<Vec<(u32, f64)>>,
}

/// Build `x_i(L)` tracks from per-size sector spectra and ground-state
/// eigenvalues. Eigenvalues with `|Im λ| > im_tol·|λ|` are dropped when
/// `drop_complex` (complex pairs are excluded from fits but still
/// reported in the spectra).
pub fn exponent_tracks(
    spectra: &[(u32, Vec<C64>, f64)],
    n_tracks: usize,
    drop_complex: bool,
) -> ExponentTracks {
    let mut tracks: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_tracks];
    let mut kept_spectra = Vec::new();
    for (l, vals, lambda0) in spectra {
        let mut xs: Vec<f64> = Vec::new();
        for v in vals {
            if drop_complex && v.im.abs() > 1e-8 * v.norm() {
                continue;
            }
            let (x, _) = spectral::scaling_dimension(*lambda0, *v, *l);
            xs.push(x);
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (i, track) in tracks.iter_mut().enumerate() {
            if let Some(&x) = xs.get(i) {
                track.push((*l, x));
            }
        }
        kept_spectra.push((*l, vals.clone()));
    }
    ExponentTracks { spectra: kept_spectra, tracks }
}
