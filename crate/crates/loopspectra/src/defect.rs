//! The non-invertible defect operators.
//!
//! `D` wraps a line once around the cylinder above the loops; resolving its
//! crossings gives the operator word
//!
//! ```text
//! D = (−q)^{−M/2} τ (1 − q e_{M−1}) ⋯ (1 − q e_1)
//!   + (−q)^{M/2} (1 − q⁻¹ e_1) ⋯ (1 − q⁻¹ e_{M−1}) τ⁻¹
//! ```
//!
//! acting on the `M` occupied strands of a configuration (`M = N` in the
//! dense case; empty sites are transparent and the empty row gets the bare
//! loop factor `n`). `D̄` goes under instead of over and is the `q → q⁻¹`
//! image on the fixed square-root branch.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::algebra::diagram::{braid_factor, TlElement};
use crate::algebra::generator::WorkState;
use crate::algebra::{AlgebraFamily, Boundary, LinkState, LoopParams, Sector, SectorBasis};
use crate::oracle::{SpinChain, SpinOp};
use crate::spectral::{dense_matrix, LinearOp, SparseOp};
use crate::C64;

#[derive(Debug, Error)]
pub enum DefectError {
    #[error("defect operators need a periodic TL-family basis (got {0})")]
    OpenBoundaryUnsupported(String),
    #[error("the open-boundary defect needs an open TL basis (got {0})")]
    PeriodicBoundaryUnsupported(String),
    #[error("operators act on different spaces ({0} vs {1})")]
    DomainMismatch(usize, usize),
    #[error("spin oracle needs integer n >= 1")]
    NonIntegerN,
}

pub type Result<T> = std::result::Result<T, DefectError>;

/// Over: the defect line passes above the loops (`D`). Under: below (`D̄`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectVariant {
    Over,
    Under,
}

/// Closed-form defect eigenvalue on a standard module.
///
/// `lines = 2r`; `s = (num, den)` is the pseudomomentum. The identity-like
/// sector gives `q + q⁻¹`; otherwise `e^{iπs}(−q)^r + e^{−iπs}(−q)^{−r}`.
/// The Under variant is the `q → q⁻¹` image with the global square-root
/// branch held fixed, i.e. `e^{iπs}(−q)^{−r} + e^{−iπs}(−q)^{r}`.
pub fn defect_eigenvalue(
    lines: u32,
    s: (i32, u32),
    q: C64,
    variant: DefectVariant,
    identity_like: bool,
) -> C64 {
    if identity_like || lines == 0 {
        return q + q.inv();
    }
    let z = C64::from_polar(1.0, std::f64::consts::PI * s.0 as f64 / s.1 as f64);
    let mq_half = C64::new(0.0, 1.0) * q.sqrt();
    let mq_r = mq_half.powi(lines as i32);
    match variant {
        DefectVariant::Over => z * mq_r + z.inv() * mq_r.inv(),
        DefectVariant::Under => z * mq_r.inv() + z.inv() * mq_r,
    }
}

/// Eigenvalue of the open-boundary defect `d` on the module with `2r`
/// through-lines: `q^{2r+1} + q^{−2r−1}` (the Casimir).
pub fn casimir_eigenvalue(lines: u32, q: C64) -> C64 {
    let p = q.powi(lines as i32 + 1);
    p + p.inv()
}

// ---------------------------------------------------------------------------
// The word machinery
// ---------------------------------------------------------------------------

/// Apply `state ↦ Σ c·state'` for one affine factor `(1 + coeff·e_{a,b})`
/// followed optionally by nothing; helper over weighted maps.
fn word_affine_e(
    terms: &BTreeMap<LinkState, C64>,
    a: usize,
    b: usize,
    coeff: C64,
    n: C64,
    twist: C64,
) -> BTreeMap<LinkState, C64> {
    let mut out = terms.clone();
    for (state, c) in terms {
        let mut w = WorkState::from_link(state);
        match w.join(a, b, false) {
            crate::algebra::generator::JoinOutcome::Killed
            | crate::algebra::generator::JoinOutcome::EmptySite => continue,
            crate::algebra::generator::JoinOutcome::Ok => {}
        }
        w.create_arc(a, b);
        let t = w.finish();
        let add = coeff * c * t.coeff(n, twist);
        *out.entry(t.state).or_insert(C64::new(0.0, 0.0)) += add;
    }
    out
}

/// Rotate the contents of the occupied positions by one step (`right`:
/// towards larger positions, wrapping the last into the first across the
/// seam).
fn rotate_occupied(
    terms: &BTreeMap<LinkState, C64>,
    occ: &[usize],
    right: bool,
    n: C64,
    twist: C64,
) -> BTreeMap<LinkState, C64> {
    let mut out = BTreeMap::new();
    for (state, c) in terms {
        let m = occ.len();
        let n_sites = state.n_sites();
        // occupied-position permutation: content at occ[k] -> occ[k±1]
        let mut dest = vec![usize::MAX; n_sites];
        for (k, &p) in occ.iter().enumerate() {
            let t = if right { occ[(k + 1) % m] } else { occ[(k + m - 1) % m] };
            dest[p] = t;
        }
        let mut code = vec![0xFFu8; n_sites];
        let mut seam_exp = 0i32;
        for (i, &d) in dest.iter().enumerate() {
            if d == usize::MAX {
                continue;
            }
            let content = state.code()[i];
            code[d] = if content == 0xFE {
                0xFE
            } else {
                dest[content as usize] as u8
            };
        }
        // the strand wrapping the seam: occ[m-1] -> occ[0] when right,
        // occ[0] -> occ[m-1] when left
        let wrap_src = if right { occ[m - 1] } else { occ[0] };
        if state.is_through(wrap_src) {
            seam_exp += if right { -1 } else { 1 };
        }
        let new_state = LinkState::from_code(code);
        let add = c * twist.powi(seam_exp);
        let _ = n;
        *out.entry(new_state).or_insert(C64::new(0.0, 0.0)) += add;
    }
    out
}

/// `D` (or `D̄`) applied to a single link state of a periodic TL-family
/// sector. The word acts blockwise on the occupied positions; the empty
/// configuration gets the bare non-contractible loop factor `n`.
pub fn apply_d_to_state(
    state: &LinkState,
    params: &LoopParams,
    sector: &Sector,
    variant: DefectVariant,
) -> BTreeMap<LinkState, C64> {
    let occ = state.occupied_positions();
    let m = occ.len();
    let n = params.n();
    let twist = sector.twist_phase();
    let mut out = BTreeMap::new();
    if m == 0 {
        out.insert(state.clone(), n);
        return out;
    }
    let smq = params.sqrt_minus_q();
    let (q_over, pref_sign) = match variant {
        DefectVariant::Over => (params.q(), 1),
        DefectVariant::Under => (params.q().inv(), -1),
    };
    // prefactors (−q)^{∓M/2}; the Under word per the displayed formula uses
    // (−q)^{+M/2} on the τ term
    let pref_tau = smq.powi(-pref_sign * m as i32);
    let pref_tau_inv = smq.powi(pref_sign * m as i32);

    // term 1: pref_tau · τ_occ (1 − q e_{M−1}) ⋯ (1 − q e_1)
    let mut t1 = BTreeMap::new();
    t1.insert(state.clone(), C64::new(1.0, 0.0));
    for k in 0..m.saturating_sub(1) {
        t1 = word_affine_e(&t1, occ[k], occ[k + 1], -q_over, n, twist);
    }
    t1 = rotate_occupied(&t1, &occ, true, n, twist);
    for (s, c) in t1 {
        *out.entry(s).or_insert(C64::new(0.0, 0.0)) += pref_tau * c;
    }
    // term 2: pref_tau_inv · (1 − q⁻¹ e_1) ⋯ (1 − q⁻¹ e_{M−1}) τ_occ⁻¹
    let mut t2 = BTreeMap::new();
    t2.insert(state.clone(), C64::new(1.0, 0.0));
    t2 = rotate_occupied(&t2, &occ, false, n, twist);
    for k in (0..m.saturating_sub(1)).rev() {
        t2 = word_affine_e(&t2, occ[k], occ[k + 1], -q_over.inv(), n, twist);
    }
    for (s, c) in t2 {
        *out.entry(s).or_insert(C64::new(0.0, 0.0)) += pref_tau_inv * c;
    }
    out
}

/// A cached sparse operator on a sector basis.
pub struct DefectOperator {
    pub basis: Arc<SectorBasis>,
    pub variant: DefectVariant,
    op: SparseOp,
}

impl LinearOp for DefectOperator {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.op.apply(x, y);
    }

    fn is_real(&self) -> bool {
        self.op.is_real()
    }
}

impl DefectOperator {
    /// If the operator is a scalar multiple of the identity (within `tol`
    /// per matrix entry), return the scalar.
    pub fn scalar_on_sector(&self, tol: f64) -> Option<C64> {
        let d = self.op.dim();
        let mut scalar = None;
        for j in 0..d {
            let col = &self.op.columns[j];
            let mut diag = C64::new(0.0, 0.0);
            for &(i, c) in col {
                if i as usize == j {
                    diag = c;
                } else if c.norm() > tol {
                    return None;
                }
            }
            match scalar {
                None => scalar = Some(diag),
                Some(s) => {
                    if (s - diag).norm() > tol {
                        return None;
                    }
                }
            }
        }
        scalar
    }

    pub fn columns(&self) -> &[Vec<(u32, C64)>] {
        &self.op.columns
    }
}

/// Build the defect operator `D` (Over) or `D̄` (Under) on a periodic
/// TL-family sector basis.
pub fn build_d(
    basis: &SectorBasis,
    params: &LoopParams,
    variant: DefectVariant,
) -> Result<DefectOperator> {
    if basis.family.boundary != Boundary::Periodic || basis.family.allows_crossings() {
        return Err(DefectError::OpenBoundaryUnsupported(format!("{:?}", basis.family)));
    }
    let dim = basis.dim();
    let mut columns = Vec::with_capacity(dim);
    for state in basis.states() {
        let image = apply_d_to_state(state, params, &basis.sector, variant);
        let mut col = Vec::with_capacity(image.len());
        for (s, c) in image {
            let idx = basis
                .index_of(&s)
                .expect("defect image leaves the sector basis");
            col.push((idx as u32, c));
        }
        col.sort_by_key(|&(i, _)| i);
        columns.push(col);
    }
    Ok(DefectOperator {
        basis: Arc::new(basis.clone()),
        variant,
        op: SparseOp::from_columns(dim, columns),
    })
}

// ---------------------------------------------------------------------------
// Fusion
// ---------------------------------------------------------------------------

/// The spin-`j` defect `D^{(j)}`, built from `D` through the fusion
/// recursion `D^{(j)} D = D^{(j+1/2)} + D^{(j−1/2)}`.
pub struct FusedDefect<'a> {
    pub d: &'a DefectOperator,
    /// Twice the spin (`2j`).
    pub j2: u32,
}

impl<'a> LinearOp for FusedDefect<'a> {
    fn dim(&self) -> usize {
        self.d.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        // Chebyshev-style recursion: u_{k+1} = D u_k − u_{k−1},
        // u_0 = x (spin 0 = identity), u_1 = D x; D^{(j)} x = u_{2j}.
        let d = self.dim();
        if self.j2 == 0 {
            y.copy_from_slice(x);
            return;
        }
        let mut prev: Vec<C64> = x.to_vec();
        let mut cur = vec![C64::new(0.0, 0.0); d];
        self.d.apply(x, &mut cur);
        for _ in 1..self.j2 {
            let mut next = vec![C64::new(0.0, 0.0); d];
            self.d.apply(&cur, &mut next);
            for (nv, pv) in next.iter_mut().zip(&prev) {
                *nv -= pv;
            }
            prev = cur;
            cur = next;
        }
        y.copy_from_slice(&cur);
    }
}

/// Build `D^{(j)}` with `j2 = 2j` from a prebuilt `D`.
pub fn fuse_defects<'a>(j2: u32, d: &'a DefectOperator) -> FusedDefect<'a> {
    FusedDefect { d, j2 }
}

/// Coefficients of the explicit polynomial `D^{(j)} = p_{2j}(D)`
/// (`p_2 = x² − 1`, `p_3 = x³ − 2x`, `p_4 = x⁴ − 3x² + 1`, …), lowest
/// degree first.
pub fn fusion_polynomial(j2: u32) -> Vec<f64> {
    let mut p0 = vec![1.0];
    if j2 == 0 {
        return p0;
    }
    let mut p1 = vec![0.0, 1.0];
    for _ in 1..j2 {
        // p_{k+1} = x p_k − p_{k−1}
        let mut next = vec![0.0; p1.len() + 1];
        for (i, c) in p1.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in p0.iter().enumerate() {
            next[i] -= c;
        }
        p0 = p1;
        p1 = next;
    }
    p1
}

// ---------------------------------------------------------------------------
// Commutators
// ---------------------------------------------------------------------------

/// Estimated max-norm of `AB − BA` on a deterministic probe set, with dense
/// evaluation when the dimension is small.
pub fn commutator_norm(a: &dyn LinearOp, b: &dyn LinearOp) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(DefectError::DomainMismatch(a.dim(), b.dim()));
    }
    let d = a.dim();
    if d <= 700 {
        let ma = dense_matrix(a);
        let mb = dense_matrix(b);
        let comm = &ma * &mb - &mb * &ma;
        return Ok(comm.iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    let mut worst = 0.0f64;
    for probe in 0..6u64 {
        let x = probe_vector(d, 1234 + probe);
        let mut ab = vec![C64::new(0.0, 0.0); d];
        let mut ba = vec![C64::new(0.0, 0.0); d];
        let mut tmp = vec![C64::new(0.0, 0.0); d];
        b.apply(&x, &mut tmp);
        a.apply(&tmp, &mut ab);
        tmp.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        a.apply(&x, &mut tmp);
        b.apply(&tmp, &mut ba);
        let xmax = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let dmax = ab
            .iter()
            .zip(&ba)
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dmax / xmax);
    }
    Ok(worst)
}

fn probe_vector(d: usize, seed: u64) -> Vec<C64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..d)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect()
}

/// A cached single-generator operator on a sector basis (used for
/// commutator checks against `D`).
pub fn generator_op(
    basis: &SectorBasis,
    gen: crate::algebra::GeneratorId,
    params: &LoopParams,
) -> crate::algebra::Result<SparseOp> {
    let dim = basis.dim();
    assert_eq!(basis.irrep_dim(), 1, "generator_op covers TL-family sectors");
    let mut columns = Vec::with_capacity(dim);
    for state in basis.states() {
        let sum = crate::algebra::apply_generator(basis.family, &basis.sector, gen, state, params)?;
        let mut col = Vec::new();
        for (k, c) in sum.terms {
            let idx = basis.index_of(&k.state).expect("generator image stays in basis");
            col.push((idx as u32, c));
        }
        col.sort_by_key(|&(i, _)| i);
        columns.push(col);
    }
    Ok(SparseOp::from_columns(dim, columns))
}

// ---------------------------------------------------------------------------
// Open-boundary defect
// ---------------------------------------------------------------------------

/// The open-boundary defect `d` on an open TL basis: the line goes over all
/// strands to the right edge, bounces, and comes back (word
/// `g_{N} ⋯ g_1 g_1 ⋯ g_N` on `N+1` strands, partially traced over the
/// ancilla strand).
pub fn open_defect_d(basis: &SectorBasis, params: &LoopParams) -> Result<DefectOperator> {
    if basis.family.boundary != Boundary::Open || basis.family.allows_crossings() {
        return Err(DefectError::PeriodicBoundaryUnsupported(format!("{:?}", basis.family)));
    }
    let n_sites = basis.n_sites;
    let m = n_sites + 1;
    let n = params.n();
    // word = g_{m-2} ∘ … ∘ g_0 ∘ g_0 ∘ … ∘ g_{m-2} (rightmost first)
    let mut word = TlElement::identity(m);
    for i in (0..n_sites).rev() {
        let g = braid_factor(m, i, params, false);
        word.left_mul(&g, n);
    }
    for i in 0..n_sites {
        let g = braid_factor(m, i, params, false);
        word.left_mul(&g, n);
    }
    let closed = word.partial_close_last(n);
    // apply the closed element to each basis state
    let dim = basis.dim();
    let mut columns = Vec::with_capacity(dim);
    for state in basis.states() {
        let mut image: BTreeMap<LinkState, C64> = BTreeMap::new();
        for (diag, coeff) in &closed.terms {
            if let Some((img, loops)) = diag.apply_to_state(state) {
                *image.entry(img).or_insert(C64::new(0.0, 0.0)) += coeff * n.powu(loops);
            }
        }
        let mut col = Vec::new();
        for (s, c) in image {
            let idx = basis.index_of(&s).expect("defect image stays in sector");
            col.push((idx as u32, c));
        }
        col.sort_by_key(|&(i, _)| i);
        columns.push(col);
    }
    Ok(DefectOperator {
        basis: Arc::new(basis.clone()),
        variant: DefectVariant::Over,
        op: SparseOp::from_columns(dim, columns),
    })
}

// ---------------------------------------------------------------------------
// Crossing (Brauer) limit
// ---------------------------------------------------------------------------

/// The O(n) integrable `Ř(u)` on `[1]⊗[1]` in the vector representation at
/// integer `n`: `P_[] − c₁ P_[11] + c₁c₂ P_[2]` with
/// `c₁ = (u−iπ)/(u+iπ)` and `c₂ = ((n−2)u−iπ)/((n−2)u+iπ)`.
/// `u = None` means `u = ∞`, where `Ř = Π` (the permutation).
pub fn brauer_crossing_limit(u: Option<f64>, n: u32) -> Result<DMatrix<C64>> {
    if n < 1 {
        return Err(DefectError::NonIntegerN);
    }
    let nn = n as usize;
    let d = nn * nn;
    let nf = n as f64;
    let ipi = C64::new(0.0, std::f64::consts::PI);
    let (c1, c2) = match u {
        None => (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
        Some(u) => {
            let uu = C64::new(u, 0.0);
            (
                (uu - ipi) / (uu + ipi),
                ((nf - 2.0) * uu - ipi) / ((nf - 2.0) * uu + ipi),
            )
        }
    };
    let mut m = DMatrix::<C64>::zeros(d, d);
    let idx = |a: usize, b: usize| a * nn + b;
    for a in 0..nn {
        for b in 0..nn {
            for c in 0..nn {
                for e in 0..nn {
                    // P_[]  = δ_ab δ_ce / n
                    // P_[11] = (δ_ac δ_be − δ_ae δ_bc)/2
                    // P_[2]  = (δ_ac δ_be + δ_ae δ_bc)/2 − δ_ab δ_ce / n
                    let d_ab_ce = ((a == b && c == e) as u32) as f64 / nf;
                    let sym = (((a == c && b == e) as u32) as f64
                        + ((a == e && b == c) as u32) as f64)
                        / 2.0;
                    let asym = (((a == c && b == e) as u32) as f64
                        - ((a == e && b == c) as u32) as f64)
                        / 2.0;
                    let p0 = C64::new(d_ab_ce, 0.0);
                    let p11 = C64::new(asym, 0.0);
                    let p2 = C64::new(sym - d_ab_ce, 0.0);
                    m[(idx(a, b), idx(c, e))] = p0 - c1 * p11 + c1 * c2 * p2;
                }
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Spin-representation oracle for D
// ---------------------------------------------------------------------------

/// Apply `D`/`D̄` to a spin basis state (letters `1..=n`; `0` = empty site
/// in the dilute chain). Independent of the link-state machinery: this is
/// the integer-`n` oracle.
pub fn spin_rep_apply_d(
    letters: &[u8],
    n: u32,
    params: &LoopParams,
    variant: DefectVariant,
) -> Result<BTreeMap<Vec<u8>, C64>> {
    if n == 0 {
        return Err(DefectError::NonIntegerN);
    }
    let occ: Vec<usize> = (0..letters.len()).filter(|&i| letters[i] != 0).collect();
    let m = occ.len();
    let mut out: BTreeMap<Vec<u8>, C64> = BTreeMap::new();
    if m == 0 {
        out.insert(letters.to_vec(), params.n());
        return Ok(out);
    }
    let smq = params.sqrt_minus_q();
    let (q_over, pref_sign) = match variant {
        DefectVariant::Over => (params.q(), 1),
        DefectVariant::Under => (params.q().inv(), -1),
    };
    let pref_tau = smq.powi(-pref_sign * m as i32);
    let pref_tau_inv = smq.powi(pref_sign * m as i32);

    let apply_e = |terms: &BTreeMap<Vec<u8>, C64>, a: usize, b: usize, coeff: C64| {
        let mut next = terms.clone();
        for (ls, c) in terms {
            if ls[a] == ls[b] && ls[a] != 0 {
                for v in 1..=n as u8 {
                    let mut img = ls.clone();
                    img[a] = v;
                    img[b] = v;
                    *next.entry(img).or_insert(C64::new(0.0, 0.0)) += coeff * c;
                }
            }
        }
        next
    };
    let rotate = |terms: &BTreeMap<Vec<u8>, C64>, right: bool| {
        let mut next = BTreeMap::new();
        for (ls, c) in terms {
            let mut img = ls.clone();
            let vals: Vec<u8> = occ.iter().map(|&p| ls[p]).collect();
            for (k, &p) in occ.iter().enumerate() {
                let src = if right { (k + m - 1) % m } else { (k + 1) % m };
                img[p] = vals[src];
            }
            *next.entry(img).or_insert(C64::new(0.0, 0.0)) += c;
        }
        next
    };

    let mut t1 = BTreeMap::new();
    t1.insert(letters.to_vec(), C64::new(1.0, 0.0));
    for k in 0..m - 1 {
        t1 = apply_e(&t1, occ[k], occ[k + 1], -q_over);
    }
    t1 = rotate(&t1, true);
    for (s, c) in t1 {
        *out.entry(s).or_insert(C64::new(0.0, 0.0)) += pref_tau * c;
    }
    let mut t2 = BTreeMap::new();
    t2.insert(letters.to_vec(), C64::new(1.0, 0.0));
    t2 = rotate(&t2, false);
    for k in (0..m - 1).rev() {
        t2 = apply_e(&t2, occ[k], occ[k + 1], -q_over.inv());
    }
    for (s, c) in t2 {
        *out.entry(s).or_insert(C64::new(0.0, 0.0)) += pref_tau_inv * c;
    }
    Ok(out)
}

/// Dense matrix of `D` in the spin representation.
pub fn spin_rep_d_matrix(
    chain: &SpinChain,
    params: &LoopParams,
    variant: DefectVariant,
) -> Result<DMatrix<C64>> {
    let d = chain.dim();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for col in 0..d {
        let letters = chain.decode(col);
        let image = spin_rep_apply_d(&letters, chain.n, params, variant)?;
        for (ls, c) in image {
            m[(chain.encode(&ls), col)] += c;
        }
    }
    Ok(m)
}

/// Dense matrix of a spin operator, re-exported convenience.
pub fn spin_op_matrix(chain: &SpinChain, op: SpinOp) -> DMatrix<C64> {
    chain.matrix(op)
}

/// Shorthand: the family/sector pair `D` lives on must be TL and periodic.
pub fn tl_periodic(dilute: bool) -> AlgebraFamily {
    if dilute {
        AlgebraFamily::dilute_periodic()
    } else {
        AlgebraFamily::dense_periodic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Sector;

    fn params_n(n: f64) -> LoopParams {
        LoopParams::from_n_real(n).unwrap()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn two_site_spin_expansion() {
        // D|ab> = -(q+q^{-1})|ba> + 2 δ_ab Σ_c |cc>
        let p = params_n(3.0);
        let q = p.q();
        let image = spin_rep_apply_d(&[1, 2], 3, &p, DefectVariant::Over).unwrap();
        assert!(close(image[&vec![2, 1]], -(q + q.inv())));
        assert_eq!(image.iter().filter(|(_, c)| c.norm() > 1e-12).count(), 1);
        let image_aa = spin_rep_apply_d(&[1, 1], 3, &p, DefectVariant::Over).unwrap();
        // coefficient of |11>: -(q+q^{-1}) from the swap plus 2 from the sum
        assert!(close(image_aa[&vec![1, 1]], -(q + q.inv()) + C64::new(2.0, 0.0)));
        assert!(close(image_aa[&vec![2, 2]], C64::new(2.0, 0.0)));
        assert!(close(image_aa[&vec![3, 3]], C64::new(2.0, 0.0)));
    }

    #[test]
    fn three_site_spin_expansion_matches_paper_coefficients() {
        // D|abc> for distinct a,b,c: (−q)^{−3/2}|cab⟩ + (−q)^{3/2}|bca⟩
        let p = params_n(3.0);
        let smq = p.sqrt_minus_q();
        let image = spin_rep_apply_d(&[1, 2, 3], 3, &p, DefectVariant::Over).unwrap();
        assert!(close(image[&vec![3, 1, 2]], smq.powi(-3)));
        assert!(close(image[&vec![2, 3, 1]], smq.powi(3)));
        assert_eq!(image.iter().filter(|(_, c)| c.norm() > 1e-12).count(), 2);
        // δ_ab terms: D|aac> ⊃ (−q)^{1/2} Σ_d |dcd⟩ + (−q)^{−1/2} Σ_d |cdd⟩
        let image2 = spin_rep_apply_d(&[1, 1, 3], 3, &p, DefectVariant::Over).unwrap();
        assert!(close(image2[&vec![2, 3, 2]], smq));
        assert!(close(image2[&vec![3, 2, 2]], smq.inv()));
        // and the through terms (−q)^{∓3/2}|c a b⟩ patterns with a=b
        assert!(close(
            image2[&vec![3, 1, 1]],
            smq.powi(-3) + smq.inv() // |caa⟩ from τ and from Σ_d |cdd⟩ at d=1
        ));
    }

    #[test]
    fn dilute_transparency() {
        // D|0a0b> = -(q+q^{-1})|0b0a> + 2 δ_ab Σ_c |0c0c>
        let p = params_n(2.0);
        let q = p.q();
        let image = spin_rep_apply_d(&[0, 1, 0, 2], 2, &p, DefectVariant::Over).unwrap();
        assert!(close(image[&vec![0, 2, 0, 1]], -(q + q.inv())));
        let image_aa = spin_rep_apply_d(&[0, 1, 0, 1], 2, &p, DefectVariant::Over).unwrap();
        assert!(close(image_aa[&vec![0, 2, 0, 2]], C64::new(2.0, 0.0)));
    }

    #[test]
    fn defect_scalar_on_standard_modules() {
        // D = scalar on every W_{(r,s)} at generic n; the scalar is the
        // closed-form eigenvalue. N = 5 dense covers half-integer r.
        let p = params_n(1.0 / 2.0_f64.sqrt());
        for (n_sites, dilute) in [(6usize, false), (5, false), (5, true)] {
            let fam = tl_periodic(dilute);
            for sector in Sector::tl_tower(n_sites as u32, (!dilute).then_some(n_sites)) {
                if sector.validate(fam, n_sites).is_err() {
                    continue;
                }
                let basis = SectorBasis::enumerate(fam, n_sites, &sector).unwrap();
                if basis.dim() == 0 {
                    continue;
                }
                for variant in [DefectVariant::Over, DefectVariant::Under] {
                    let d = build_d(&basis, &p, variant).unwrap();
                    let scalar = d.scalar_on_sector(1e-10).unwrap_or_else(|| {
                        panic!("D not scalar on {} (dilute={dilute})", sector.tag())
                    });
                    let (lines, s) = match &sector {
                        Sector::TlStandard { lines, s_num, s_den } => (*lines, (*s_num, *s_den)),
                        _ => unreachable!(),
                    };
                    let expect = defect_eigenvalue(lines, s, p.q(), variant, false);
                    assert!(
                        close(scalar, expect),
                        "sector {} variant {variant:?}: got {scalar}, expected {expect}",
                        sector.tag()
                    );
                }
            }
            // identity-like sector: eigenvalue q + q^{-1} = n
            let basis =
                SectorBasis::enumerate(fam, n_sites - n_sites % 2, &Sector::identity()).unwrap();
            let d = build_d(&basis, &p, DefectVariant::Over).unwrap();
            let scalar = d.scalar_on_sector(1e-10).expect("scalar on identity");
            assert!(close(scalar, p.n()));
        }
    }

    #[test]
    fn fusion_polynomials() {
        assert_eq!(fusion_polynomial(2), vec![-1.0, 0.0, 1.0]); // x^2 - 1
        assert_eq!(fusion_polynomial(3), vec![0.0, -2.0, 0.0, 1.0]); // x^3 - 2x
        assert_eq!(fusion_polynomial(4), vec![1.0, 0.0, -3.0, 0.0, 1.0]); // x^4 - 3x^2 + 1
    }

    #[test]
    fn open_defect_two_sites() {
        // d on N=2: eigenvalues q^3 + q^{-3} on the two-through module and
        // q + q^{-1} on the contracted one.
        let p = params_n(1.0 / 2.0_f64.sqrt());
        let fam = AlgebraFamily::dense_open();
        let q = p.q();
        let b2 = SectorBasis::enumerate(fam, 2, &Sector::open(2)).unwrap();
        let d2 = open_defect_d(&b2, &p).unwrap();
        let s2 = d2.scalar_on_sector(1e-10).expect("scalar on W_1");
        assert!(close(s2, q.powi(3) + q.powi(-3)));
        let b0 = SectorBasis::enumerate(fam, 2, &Sector::open(0)).unwrap();
        let d0 = open_defect_d(&b0, &p).unwrap();
        let s0 = d0.scalar_on_sector(1e-10).expect("scalar on W_0");
        assert!(close(s0, q + q.inv()));
        assert!(close(s0, p.n()));
    }

    #[test]
    fn r_matrix_limits() {
        // u = ∞ is the permutation; u = 0 the identity
        let inf = brauer_crossing_limit(None, 3).unwrap();
        for a in 0..3usize {
            for b in 0..3usize {
                for c in 0..3usize {
                    for e in 0..3usize {
                        let expect = ((a == e && b == c) as u32) as f64;
                        let got = inf[(a * 3 + b, c * 3 + e)];
                        assert!((got - C64::new(expect, 0.0)).norm() < 1e-13);
                    }
                }
            }
        }
        let zero = brauer_crossing_limit(Some(0.0), 3).unwrap();
        let id = DMatrix::<C64>::identity(9, 9);
        assert!((zero - id).norm() < 1e-12);
    }

    #[test]
    fn yang_baxter_at_infinity() {
        // Ř₁₂Ř₂₃Ř₁₂ = Ř₂₃Ř₁₂Ř₂₃ at u = ∞, n = 3 (27-dimensional check)
        let r = brauer_crossing_limit(None, 3).unwrap();
        let n = 3usize;
        let d3 = n * n * n;
        let mut r12 = DMatrix::<C64>::zeros(d3, d3);
        let mut r23 = DMatrix::<C64>::zeros(d3, d3);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for ap in 0..n {
                        for bp in 0..n {
                            for cp in 0..n {
                                let row = (a * n + b) * n + c;
                                let col = (ap * n + bp) * n + cp;
                                if c == cp {
                                    r12[(row, col)] += r[(a * n + b, ap * n + bp)];
                                }
                                if a == ap {
                                    r23[(row, col)] += r[(b * n + c, bp * n + cp)];
                                }
                            }
                        }
                    }
                }
            }
        }
        let lhs = &r12 * &r23 * &r12;
        let rhs = &r23 * &r12 * &r23;
        let resid = (lhs - rhs).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(resid < 1e-12, "YBE residual {resid}");
    }
}
