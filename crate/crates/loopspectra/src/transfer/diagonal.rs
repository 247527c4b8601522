//! Diagonal-geometry (natural-propagation) rows and defect-decorated rows.
//!
//! A diagonal row is the product of two staggered half-rows of faces; each
//! face carries the nine dilute tiles weighted `{1, K×6, K²×2}` (the two
//! two-monomer tiles pick up the optional close-contact weight `μ`), and
//! the fully dense case restricts to the last two tiles.
//!
//! The defect row threads the red line through one row: every strand
//! crossing it splits into the two planar smoothings with weights
//! `(−q)^{∓1/2}`, and the red line closes around the cylinder. The
//! resulting operator equals `D` composed with the plain row.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::generator::apply_raw;
use crate::algebra::{
    DiluteTile, GeneratorId, LinkState, Sector, SectorBasis, ThroughPerm, ALL_TILES,
};
use crate::defect::DefectVariant;
use crate::spectral::SparseOp;
use crate::C64;

use super::work::{ExtWork, Tally};
use super::{Geometry, ModelParams, Result, RowKind, RowOperator, TransferError};

type StateMap = BTreeMap<LinkState, C64>;

/// Weight class of one diagonal tile: number of monomers and whether it is
/// one of the two close-contact (two-monomer) tiles.
fn tile_weight(tile: DiluteTile, model: &ModelParams) -> f64 {
    let (monomers, contact) = match tile {
        DiluteTile::Vacuum => (0, false),
        DiluteTile::PassLeft
        | DiluteTile::PassRight
        | DiluteTile::Annihilate
        | DiluteTile::Create
        | DiluteTile::MoveRight
        | DiluteTile::MoveLeft => (1, false),
        DiluteTile::PassBoth | DiluteTile::AnnihilateCreate => (2, true),
    };
    let mut w = model.k.powi(monomers);
    if contact {
        w *= model.mu.unwrap_or(1.0);
    }
    w
}

/// Apply one face at sites `(i, i+1 mod N)` to a weighted state map.
fn apply_face(
    basis: &SectorBasis,
    model: &ModelParams,
    i: usize,
    map: &StateMap,
) -> Result<StateMap> {
    let fam = basis.family;
    let n = model.loop_params.n();
    let twist = basis.sector.twist_phase();
    let mut out = StateMap::new();
    for (state, coeff) in map {
        if fam.allows_empty() {
            for tile in ALL_TILES {
                let w = tile_weight(tile, model);
                if w == 0.0 {
                    continue;
                }
                for term in apply_raw(fam, GeneratorId::Tile(tile, i), state)? {
                    // TL-family throughs are indistinguishable; the raw
                    // permutation tag is ignored here
                    let c = coeff * w * term.coeff(n, twist);
                    *out.entry(term.state).or_insert(C64::new(0.0, 0.0)) += c;
                }
            }
        } else {
            // dense face: K²(1 + e_i), optionally with the contact weight
            let w = model.k.powi(2) * model.mu.unwrap_or(1.0);
            *out.entry(state.clone()).or_insert(C64::new(0.0, 0.0)) += coeff * w;
            for term in apply_raw(fam, GeneratorId::E(i), state)? {
                let c = coeff * w * term.coeff(n, twist);
                *out.entry(term.state).or_insert(C64::new(0.0, 0.0)) += c;
            }
        }
    }
    Ok(out)
}

/// One full diagonal row (even faces then odd faces) applied to a state.
pub(crate) fn diagonal_apply(
    basis: &SectorBasis,
    model: &ModelParams,
    state: &LinkState,
) -> Result<StateMap> {
    let n_sites = basis.n_sites;
    let mut map = StateMap::new();
    map.insert(state.clone(), C64::new(1.0, 0.0));
    for i in (0..n_sites).step_by(2) {
        map = apply_face(basis, model, i, &map)?;
    }
    for i in (1..n_sites).step_by(2) {
        map = apply_face(basis, model, i, &map)?;
    }
    Ok(map)
}

/// Build the diagonal plain row as a cached sparse operator. Requires an
/// even number of sites (the two half-rows must tile the circle) and a
/// crossing-free family.
pub fn build_diagonal_row(basis: &Arc<SectorBasis>, model: &ModelParams) -> Result<SparseOp> {
    if basis.family.allows_crossings() {
        return Err(TransferError::UnsupportedGeometry(
            "the diagonal tile set has no crossing tile".into(),
        ));
    }
    if basis.n_sites % 2 != 0 {
        return Err(TransferError::UnsupportedGeometry(
            "diagonal rows need an even number of sites".into(),
        ));
    }
    if !basis.family.is_periodic() {
        return Err(TransferError::OpenBoundaryUnsupported);
    }
    if basis.irrep_dim() != 1 {
        return Err(TransferError::IncompatibleSector(
            "diagonal rows cover TL-family sectors".into(),
        ));
    }
    model.validate()?;
    let mut columns = Vec::with_capacity(basis.dim());
    for state in basis.states() {
        let map = diagonal_apply(basis, model, state)?;
        let mut col = Vec::with_capacity(map.len());
        for (s, c) in map {
            let idx = basis.index_of(&s).expect("diagonal row leaves the sector");
            col.push((idx as u32, c));
        }
        col.sort_by_key(|&(i, _)| i);
        columns.push(col);
    }
    Ok(SparseOp::from_columns(basis.dim(), columns))
}

// ---------------------------------------------------------------------------
// The red sweep
// ---------------------------------------------------------------------------

/// Resolve the red defect line against one link state: every occupied site
/// splits into the two smoothings, the red line closes around the seam.
pub(crate) fn red_sweep_state(
    state: &LinkState,
    sector: &Sector,
    params: &crate::algebra::LoopParams,
    variant: DefectVariant,
) -> Vec<(LinkState, C64)> {
    let n_sites = state.n_sites();
    let redcur = n_sites;
    let token = n_sites + 1;
    let scratch = n_sites + 2;
    let track = matches!(
        sector,
        Sector::TlStandard { lines: 1.., .. } | Sector::TlTwisted { .. }
    );
    let n = params.n();
    let twist = sector.twist_phase();
    // smoothing A joins red-in to the upper blue end: (−q)^{−1/2} for Over.
    // Under swaps the two weights (the q → q⁻¹ image on the fixed branch).
    let s = params.sqrt_minus_q();
    let (coeff_a, coeff_b) = match variant {
        DefectVariant::Over => (s.inv(), s),
        DefectVariant::Under => (s, s.inv()),
    };
    let mut w0 = ExtWork::empty(n_sites + 3, track);
    w0.load_state(state, false);
    w0.link_new(redcur, token, 0);
    let mut out = Vec::new();
    let mut stack: Vec<(ExtWork, usize, C64, Tally)> =
        vec![(w0, 0, C64::new(1.0, 0.0), Tally::default())];
    while let Some((f, x, coeff, tally)) = stack.pop() {
        if x == n_sites {
            let mut work = f;
            let mut t = tally;
            work.join(token, redcur, 1, &mut t);
            if t.killed {
                continue;
            }
            let (st, _perm) = work.extract_state(n_sites);
            let mut c = coeff;
            for _ in 0..t.loops + t.wound_loops {
                c *= n;
            }
            c *= twist.powi(t.seam_exp as i32);
            out.push((st, c));
            continue;
        }
        if !f.occupied(x) {
            stack.push((f, x + 1, coeff, tally));
            continue;
        }
        // smoothing A: the red left part continues upward at x; the strand
        // from below becomes the red continuation
        {
            let mut work = f.clone();
            let t = tally;
            work.move_endpoint(x, scratch);
            work.move_endpoint(redcur, x);
            work.move_endpoint(scratch, redcur);
            stack.push((work, x + 1, coeff * coeff_a, t));
        }
        // smoothing B: the red left part joins the strand from below; the
        // upward continuation at x becomes the red continuation
        {
            let mut work = f.clone();
            let mut t = tally;
            work.join(redcur, x, 0, &mut t);
            if !t.killed {
                work.link_new(x, redcur, 0);
                stack.push((work, x + 1, coeff * coeff_b, t));
            }
        }
    }
    out
}

/// The bare red-line sweep as a sparse operator on a sector basis (equal to
/// the defect operator `D`; kept as an independent construction).
pub fn red_sweep_op(
    basis: &Arc<SectorBasis>,
    params: &crate::algebra::LoopParams,
    variant: DefectVariant,
) -> Result<SparseOp> {
    if !basis.family.is_periodic() || basis.family.allows_crossings() {
        return Err(TransferError::OpenBoundaryUnsupported);
    }
    let mut columns = Vec::with_capacity(basis.dim());
    for state in basis.states() {
        let mut acc: StateMap = StateMap::new();
        for (s, c) in red_sweep_state(state, &basis.sector, params, variant) {
            *acc.entry(s).or_insert(C64::new(0.0, 0.0)) += c;
        }
        let mut col = Vec::with_capacity(acc.len());
        for (s, c) in acc {
            let idx = basis.index_of(&s).expect("red sweep leaves the sector");
            col.push((idx as u32, c));
        }
        col.sort_by_key(|&(i, _)| i);
        columns.push(col);
    }
    Ok(SparseOp::from_columns(basis.dim(), columns))
}

/// Build the defect-decorated row: the red line threaded through one plain
/// row, so the operator equals `D` (or `D̄`) composed with the plain row.
pub fn build_defect_row(
    basis: &Arc<SectorBasis>,
    model: &ModelParams,
    variant: DefectVariant,
    geometry: Geometry,
) -> Result<RowOperator> {
    if !basis.family.is_periodic() {
        return Err(TransferError::OpenBoundaryUnsupported);
    }
    model.validate()?;
    let params = &model.loop_params;
    let mut columns = Vec::with_capacity(basis.dim());
    for state in basis.states() {
        let row_map: StateMap = match geometry {
            Geometry::Diagonal => diagonal_apply(basis, model, state)?,
            Geometry::Axial => {
                let mut m = StateMap::new();
                for (s, _perm, c) in
                    super::axial::axial_apply_interpreted(state, basis, model, model.mu.is_some())
                {
                    *m.entry(s).or_insert(C64::new(0.0, 0.0)) += c;
                }
                m
            }
        };
        let mut acc: StateMap = StateMap::new();
        for (mid, c1) in row_map {
            for (s, c2) in red_sweep_state(&mid, &basis.sector, params, variant) {
                *acc.entry(s).or_insert(C64::new(0.0, 0.0)) += c1 * c2;
            }
        }
        let mut col = Vec::with_capacity(acc.len());
        for (s, c) in acc {
            let idx = basis.index_of(&s).expect("defect row leaves the sector");
            col.push((idx as u32, c));
        }
        col.sort_by_key(|&(i, _)| i);
        columns.push(col);
    }
    let kind = match variant {
        DefectVariant::Over => RowKind::DefectRowOver,
        DefectVariant::Under => RowKind::DefectRowUnder,
    };
    let op = SparseOp::from_columns(basis.dim(), columns);
    Ok(super::sparse_row(Arc::clone(basis), model, geometry, kind, op))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraFamily, LoopParams};
    use crate::defect::build_d;
    use crate::spectral::{dense_matrix, LinearOp};

    fn model(n: f64, k: f64) -> ModelParams {
        ModelParams::new(LoopParams::from_n_real(n).unwrap(), k, 0.0)
    }

    #[test]
    fn dense_diagonal_row_matches_hand_computed_two_by_two() {
        // N = 4 identity sector: states (01)(23) and (03)(12); K = 1.
        // T_even = (1+e_0)(1+e_2), T_odd = (1+e_1)(1+e_3):
        //   T s1 = (1+n)² s1 + (1+n)²(2+n) s2
        //   T s2 = (2+n) s1 + [(1+n)² + (2+n)²] s2
        let fam = AlgebraFamily::dense_periodic();
        let basis =
            Arc::new(crate::algebra::SectorBasis::enumerate(fam, 4, &Sector::identity()).unwrap());
        let m = model(1.0 / 2.0_f64.sqrt(), 1.0);
        let row = build_diagonal_row(&basis, &m).unwrap();
        let mat = dense_matrix(&row);
        let n = 1.0 / 2.0_f64.sqrt();
        let s1 = LinkState::from_code(vec![1, 0, 3, 2]);
        let s2 = LinkState::from_code(vec![3, 2, 1, 0]);
        let i1 = basis.index_of(&s1).unwrap();
        let i2 = basis.index_of(&s2).unwrap();
        let a = (1.0 + n) * (1.0 + n);
        let b = 2.0 + n;
        assert!((mat[(i1, i1)] - C64::new(a, 0.0)).norm() < 1e-12);
        assert!((mat[(i2, i1)] - C64::new(a * b, 0.0)).norm() < 1e-12);
        assert!((mat[(i1, i2)] - C64::new(b, 0.0)).norm() < 1e-12);
        assert!((mat[(i2, i2)] - C64::new(a + b * b, 0.0)).norm() < 1e-12);
        // N = 2 sanity: the single identity-sector state gets (1+n)²
        let basis2 =
            Arc::new(crate::algebra::SectorBasis::enumerate(fam, 2, &Sector::identity()).unwrap());
        let row2 = build_diagonal_row(&basis2, &m).unwrap();
        let mat2 = dense_matrix(&row2);
        assert_eq!(basis2.dim(), 1);
        assert!((mat2[(0, 0)] - C64::new(a, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn red_sweep_equals_defect_operator() {
        // the tile-by-tile red sweep reproduces the operator word for D
        let p = LoopParams::from_n_real(1.0 / 2.0_f64.sqrt()).unwrap();
        for (fam, n_sites, sectors) in [
            (AlgebraFamily::dense_periodic(), 4usize, Sector::tl_tower(4, Some(4))),
            (AlgebraFamily::dilute_periodic(), 4, Sector::tl_tower(3, None)),
        ] {
            let mut all = sectors.clone();
            all.push(Sector::identity());
            for sector in all {
                if sector.validate(fam, n_sites).is_err() {
                    continue;
                }
                let basis = Arc::new(
                    crate::algebra::SectorBasis::enumerate(fam, n_sites, &sector).unwrap(),
                );
                if basis.dim() == 0 {
                    continue;
                }
                for variant in [DefectVariant::Over, DefectVariant::Under] {
                    let sweep = red_sweep_op(&basis, &p, variant).unwrap();
                    let word = build_d(&basis, &p, variant).unwrap();
                    let ms = dense_matrix(&sweep);
                    let mw = dense_matrix(&word);
                    let diff = (&ms - &mw).iter().map(|c| c.norm()).fold(0.0, f64::max);
                    assert!(
                        diff < 1e-12,
                        "sector {} {variant:?}: |red-sweep - D| = {diff}",
                        sector.tag()
                    );
                }
            }
        }
    }

    #[test]
    fn defect_row_equals_d_composed_with_plain_row() {
        let p = LoopParams::from_n_real(1.0 / 2.0_f64.sqrt()).unwrap();
        let fam = AlgebraFamily::dense_periodic();
        for sector in [Sector::identity(), Sector::tl(2, 0, 1)] {
            let basis =
                Arc::new(crate::algebra::SectorBasis::enumerate(fam, 6, &sector).unwrap());
            let m = model(1.0 / 2.0_f64.sqrt(), 1.0);
            let defect_row = build_defect_row(&basis, &m, DefectVariant::Over, Geometry::Diagonal)
                .unwrap();
            let plain = build_diagonal_row(&basis, &m).unwrap();
            let d = build_d(&basis, &p, DefectVariant::Over).unwrap();
            let md = dense_matrix(&defect_row);
            let mp = dense_matrix(&plain);
            let mdo = dense_matrix(&d);
            let diff = (&md - &mdo * &mp)
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "sector {}: residual {diff}", sector.tag());
        }
    }
}
