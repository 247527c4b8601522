//! Exact torus partition functions from the transfer matrix.
//!
//! The trace over the periodic time direction is taken diagrammatically:
//! the evolution carries the matching between the bottom-boundary points
//! and the current frontier, and the final gluing closes every cycle with
//! one factor `n` per loop. This is the faithful "traced product of row
//! operators" that the brute-force oracle must reproduce.

use std::collections::BTreeMap;

use crate::algebra::{AlgebraFamily, DiluteTile, ALL_TILES};
use crate::C64;

use super::axial::AxialTile;
use super::work::{ExtWork, Tally};
use super::{Geometry, ModelParams, Result, TransferError};

/// A small torus: `width` sites around the cylinder, `height` rows traced.
#[derive(Clone, Debug)]
pub struct TorusSpec {
    pub family: AlgebraFamily,
    pub width: usize,
    pub height: usize,
    pub geometry: Geometry,
    pub contacts: bool,
}

type Map = BTreeMap<Vec<u8>, C64>;

/// Exact `Z` on the torus by doubled-diagram evolution.
pub fn torus_trace(spec: &TorusSpec, model: &ModelParams) -> Result<C64> {
    model.validate()?;
    if !spec.family.is_periodic() {
        return Err(TransferError::OpenBoundaryUnsupported);
    }
    match spec.geometry {
        Geometry::Axial => axial_torus(spec, model),
        Geometry::Diagonal => diagonal_torus(spec, model),
    }
}

fn axial_torus(spec: &TorusSpec, model: &ModelParams) -> Result<C64> {
    let w = spec.width;
    let aux = 2 * w;
    let token = 2 * w + 1;
    let n_slots = 2 * w + 2;
    let crossings = spec.family.allows_crossings();
    let dilute = spec.family.allows_empty();
    let contacts = spec.contacts && dilute;
    let n = model.loop_params.n();
    let sqrt_k = model.sqrt_k_tables(w);

    // initial states: every bottom occupancy pattern (dense: all occupied)
    let mut map: Map = Map::new();
    let patterns: Vec<usize> = if dilute { (0..1usize << w).collect() } else { vec![(1 << w) - 1] };
    for pat in patterns {
        let mut work = ExtWork::empty(n_slots, false);
        for x in 0..w {
            if pat >> x & 1 == 1 {
                work.link_new(x, w + x, 0);
            }
        }
        map.insert(work.encode(), C64::new(1.0, 0.0));
    }

    for _row in 0..spec.height {
        let mut next: Map = Map::new();
        for (enc, coeff) in &map {
            let base = decode(enc, n_slots);
            // two seam variants per row
            let mut variants = vec![base.clone()];
            let mut seamed = base.clone();
            seamed.link_new(aux, token, 0);
            variants.push(seamed);
            for start in variants {
                let mut stack: Vec<(ExtWork, usize, C64)> = vec![(start, 0, *coeff)];
                while let Some((f, x, c)) = stack.pop() {
                    if x == w {
                        if f.occupied(aux) != f.occupied(token) {
                            continue;
                        }
                        let mut work = f;
                        let mut tally = Tally::default();
                        if work.occupied(aux) {
                            work.join(token, aux, 1, &mut tally);
                            if tally.killed {
                                continue;
                            }
                        }
                        let mut cc = c;
                        for _ in 0..tally.loops + tally.wound_loops {
                            cc *= n;
                        }
                        *next.entry(work.encode()).or_insert(C64::new(0.0, 0.0)) += cc;
                        continue;
                    }
                    let s_occ = f.occupied(x);
                    let w_occ = f.occupied(aux);
                    for tile in AxialTile::choices(s_occ, w_occ, crossings, contacts) {
                        if !dilute && tile.mask() & (1 | 4) != (1 | 4) {
                            continue;
                        }
                        let mut work = f.clone();
                        let mut tally = Tally::default();
                        tile.apply(&mut work, x, aux, &mut tally);
                        if tally.killed {
                            continue;
                        }
                        let mut cc = c;
                        let mask = tile.mask();
                        if mask & 1 != 0 {
                            cc *= sqrt_k.vert_below[x];
                        }
                        if mask & 2 != 0 {
                            cc *= sqrt_k.horiz[(x + w - 1) % w];
                        }
                        if mask & 4 != 0 {
                            cc *= sqrt_k.vert_above[x];
                        }
                        if mask & 8 != 0 {
                            cc *= sqrt_k.horiz[x];
                        }
                        if tile.is_crossing() {
                            cc *= model.w;
                        }
                        if tile.is_contact() {
                            cc *= model.mu.unwrap_or(1.0);
                        }
                        for _ in 0..tally.loops + tally.wound_loops {
                            cc *= n;
                        }
                        stack.push((work, x + 1, cc));
                    }
                }
            }
        }
        map = next;
    }
    Ok(glue(&map, w, n_slots, n))
}

fn diagonal_torus(spec: &TorusSpec, model: &ModelParams) -> Result<C64> {
    let w = spec.width;
    if w % 2 != 0 {
        return Err(TransferError::UnsupportedGeometry(
            "diagonal tori need an even number of sites".into(),
        ));
    }
    if spec.family.allows_crossings() {
        return Err(TransferError::UnsupportedGeometry(
            "the diagonal tile set has no crossing tile".into(),
        ));
    }
    let dilute = spec.family.allows_empty();
    let n = model.loop_params.n();
    let n_slots = 2 * w;

    let mut map: Map = Map::new();
    let patterns: Vec<usize> = if dilute { (0..1usize << w).collect() } else { vec![(1 << w) - 1] };
    for pat in patterns {
        let mut work = ExtWork::empty(n_slots, false);
        for x in 0..w {
            if pat >> x & 1 == 1 {
                work.link_new(x, w + x, 0);
            }
        }
        map.insert(work.encode(), C64::new(1.0, 0.0));
    }

    let tiles: Vec<DiluteTile> = if dilute {
        ALL_TILES.to_vec()
    } else {
        vec![DiluteTile::PassBoth, DiluteTile::AnnihilateCreate]
    };

    for row in 0..spec.height {
        let off = row % 2;
        for face in 0..w / 2 {
            let a = (2 * face + off) % w;
            let b = (2 * face + 1 + off) % w;
            let mut next: Map = Map::new();
            for (enc, coeff) in &map {
                let base = decode(enc, n_slots);
                for &tile in &tiles {
                    let need = match tile {
                        DiluteTile::Vacuum | DiluteTile::Create => (false, false),
                        DiluteTile::PassLeft | DiluteTile::MoveRight => (true, false),
                        DiluteTile::PassRight | DiluteTile::MoveLeft => (false, true),
                        DiluteTile::Annihilate
                        | DiluteTile::PassBoth
                        | DiluteTile::AnnihilateCreate => (true, true),
                    };
                    if (base.occupied(a), base.occupied(b)) != need {
                        continue;
                    }
                    let mut work = base.clone();
                    let mut tally = Tally::default();
                    match tile {
                        DiluteTile::Vacuum
                        | DiluteTile::PassLeft
                        | DiluteTile::PassRight
                        | DiluteTile::PassBoth => {}
                        DiluteTile::Create => work.link_new(a, b, 0),
                        DiluteTile::Annihilate => work.join(a, b, 0, &mut tally),
                        DiluteTile::AnnihilateCreate => {
                            work.join(a, b, 0, &mut tally);
                            work.link_new(a, b, 0);
                        }
                        DiluteTile::MoveRight => work.move_endpoint(a, b),
                        DiluteTile::MoveLeft => work.move_endpoint(b, a),
                    }
                    if tally.killed {
                        continue;
                    }
                    let mut cc = *coeff * tile_weight_diag(tile, model);
                    for _ in 0..tally.loops + tally.wound_loops {
                        cc *= n;
                    }
                    *next.entry(work.encode()).or_insert(C64::new(0.0, 0.0)) += cc;
                }
            }
            map = next;
        }
    }
    Ok(glue(&map, w, n_slots, n))
}

fn tile_weight_diag(tile: DiluteTile, model: &ModelParams) -> f64 {
    let (monomers, contact) = match tile {
        DiluteTile::Vacuum => (0, false),
        DiluteTile::PassBoth | DiluteTile::AnnihilateCreate => (2, true),
        _ => (1, false),
    };
    let mut w = model.k.powi(monomers);
    if contact {
        w *= model.mu.unwrap_or(1.0);
    }
    w
}

fn decode(enc: &[u8], n_slots: usize) -> ExtWork {
    let mut w = ExtWork::empty(n_slots, false);
    w.slots.copy_from_slice(&enc[..n_slots]);
    w
}

/// Glue the frontier back onto the bottom boundary, closing all cycles.
fn glue(map: &Map, w: usize, n_slots: usize, n: C64) -> C64 {
    let mut z = C64::new(0.0, 0.0);
    'state: for (enc, coeff) in map {
        let mut work = decode(enc, n_slots);
        let mut tally = Tally::default();
        for x in 0..w {
            match (work.occupied(x), work.occupied(w + x)) {
                (false, false) => {}
                (true, true) => work.join(x, w + x, 0, &mut tally),
                _ => continue 'state, // occupancy mismatch: no gluing
            }
        }
        let mut cc = *coeff;
        for _ in 0..tally.loops + tally.wound_loops {
            cc *= n;
        }
        z += cc;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LoopParams;
    use crate::oracle::{enumerate_z, LatticePatch};

    fn model(n: f64, k: f64, w: f64) -> ModelParams {
        ModelParams::new(LoopParams::from_n_real(n).unwrap(), k, w)
    }

    #[test]
    fn axial_trace_matches_oracle() {
        let m = model(1.0 / 2.0_f64.sqrt(), 0.55, 1.2);
        for (w, h) in [(1usize, 1usize), (2, 2), (3, 2), (2, 3)] {
            let spec = TorusSpec {
                family: AlgebraFamily::dilute_brauer_periodic(),
                width: w,
                height: h,
                geometry: Geometry::Axial,
                contacts: false,
            };
            let z_tm = torus_trace(&spec, &m).unwrap();
            let patch = LatticePatch::axial(w, h, 0.55, 1.2);
            let z_or = enumerate_z(&patch, &m.loop_params, None).unwrap();
            assert!(
                (z_tm - z_or).norm() / z_or.norm() < 1e-12,
                "{w}x{h}: TM {z_tm} vs oracle {z_or}"
            );
        }
    }

    #[test]
    fn diagonal_trace_matches_oracle() {
        let m = model(0.6, 0.5, 0.0);
        for (w, h, dense) in [(2usize, 1usize, true), (2, 2, true), (4, 2, true), (2, 2, false), (4, 1, false)] {
            let spec = TorusSpec {
                family: if dense {
                    AlgebraFamily::dense_periodic()
                } else {
                    AlgebraFamily::dilute_periodic()
                },
                width: w,
                height: h,
                geometry: Geometry::Diagonal,
                contacts: false,
            };
            let z_tm = torus_trace(&spec, &m).unwrap();
            let patch = if dense {
                LatticePatch::diagonal_dense(w, h, 0.5)
            } else {
                LatticePatch::diagonal_dilute(w, h, 0.5)
            };
            let z_or = enumerate_z(&patch, &m.loop_params, None).unwrap();
            assert!(
                (z_tm - z_or).norm() / z_or.norm() < 1e-12,
                "{w}x{h} dense={dense}: TM {z_tm} vs oracle {z_or}"
            );
        }
    }
}
