//! Compiled axial-geometry row transfer.
//!
//! One application advances the cylinder by one row of `N` vertices carrying
//! the eight-vertex dilute Brauer tile set (crossing weight `K²w`, optional
//! close-contact tiles `K²μ`). The row is compiled once per
//! `(family, N, sector)` into per-vertex sparse transition levels between
//! interned frontier states; monomial weight codes are evaluated per
//! parameter point, so coupling sweeps reuse the structure.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::algebra::{Boundary, LinkState, Sector, SectorBasis, ThroughPerm};
use crate::spectral::LinearOp;
use crate::C64;

use super::work::{ExtWork, Tally};
use super::{ModelParams, TransferError};

/// The eight axial vertex tiles plus the two optional contact tiles,
/// selected by the (south, west) occupancies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum AxialTile {
    Empty,
    CornerEN,
    CornerSN,
    CornerSE,
    CornerNW,
    CornerWE,
    CornerWS,
    Crossing,
    ContactSeWn,
    ContactSwNe,
}

impl AxialTile {
    pub fn choices(s: bool, w: bool, crossings: bool, contacts: bool) -> Vec<AxialTile> {
        use AxialTile::*;
        match (s, w) {
            (false, false) => vec![Empty, CornerEN],
            (true, false) => vec![CornerSN, CornerSE],
            (false, true) => vec![CornerNW, CornerWE],
            (true, true) => {
                let mut v = vec![CornerWS];
                if crossings {
                    v.push(Crossing);
                }
                if contacts {
                    v.push(ContactSeWn);
                    v.push(ContactSwNe);
                }
                v
            }
        }
    }

    /// Covered half-edges as bits: S = 1, W = 2, N = 4, E = 8.
    pub fn mask(&self) -> u8 {
        use AxialTile::*;
        match self {
            Empty => 0,
            CornerEN => 4 | 8,
            CornerSN => 1 | 4,
            CornerSE => 1 | 8,
            CornerNW => 4 | 2,
            CornerWE => 2 | 8,
            CornerWS => 1 | 2,
            Crossing | ContactSeWn | ContactSwNe => 1 | 2 | 4 | 8,
        }
    }

    pub fn is_crossing(&self) -> bool {
        matches!(self, AxialTile::Crossing)
    }

    pub fn is_contact(&self) -> bool {
        matches!(self, AxialTile::ContactSeWn | AxialTile::ContactSwNe)
    }

    /// Apply to a frontier: site slot `x`, auxiliary slot `aux`.
    pub fn apply(&self, w: &mut ExtWork, x: usize, aux: usize, tally: &mut Tally) {
        use AxialTile::*;
        match self {
            Empty | CornerSN | CornerWE => {}
            CornerEN => w.link_new(x, aux, 0),
            CornerSE => w.move_endpoint(x, aux),
            CornerNW => w.move_endpoint(aux, x),
            CornerWS => w.join(x, aux, 0, tally),
            Crossing => {}
            ContactSeWn => w.swap(x, aux),
            ContactSwNe => {
                w.join(x, aux, 0, tally);
                w.link_new(x, aux, 0);
            }
        }
    }
}

/// Symbolic weight of one transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct CodeDef {
    pub mask: u8,
    pub crossing: bool,
    pub contact: bool,
    pub loops: u8,
    pub wound: u8,
    pub seam: i8,
    pub perm_idx: u16,
}

impl CodeDef {
    fn unit() -> Self {
        CodeDef { mask: 0, crossing: false, contact: false, loops: 0, wound: 0, seam: 0, perm_idx: 0 }
    }
}

/// One sparse transition level in CSR-by-source form.
pub(crate) struct Level {
    pub row_ptr: Vec<u32>,
    pub targets: Vec<u32>,
    pub codes: Vec<u16>,
    pub code_defs: Vec<CodeDef>,
}

struct LevelBuilder {
    entries: Vec<Vec<(u32, u16)>>,
    code_index: HashMap<CodeDef, u16>,
    code_defs: Vec<CodeDef>,
}

impl LevelBuilder {
    fn new(n_from: usize) -> Self {
        LevelBuilder {
            entries: vec![Vec::new(); n_from],
            code_index: HashMap::new(),
            code_defs: Vec::new(),
        }
    }

    fn push(&mut self, from: usize, to: u32, code: CodeDef) {
        let idx = *self.code_index.entry(code).or_insert_with(|| {
            self.code_defs.push(code);
            (self.code_defs.len() - 1) as u16
        });
        self.entries[from].push((to, idx));
    }

    fn finish(self) -> Level {
        let mut row_ptr = Vec::with_capacity(self.entries.len() + 1);
        let mut targets = Vec::new();
        let mut codes = Vec::new();
        row_ptr.push(0);
        for row in &self.entries {
            for &(t, c) in row {
                targets.push(t);
                codes.push(c);
            }
            row_ptr.push(targets.len() as u32);
        }
        Level { row_ptr, targets, codes, code_defs: self.code_defs }
    }
}

struct Interner {
    map: HashMap<Vec<u8>, u32>,
    states: Vec<ExtWork>,
}

impl Interner {
    fn new() -> Self {
        Interner { map: HashMap::new(), states: Vec::new() }
    }

    fn intern(&mut self, w: ExtWork) -> u32 {
        let key = w.encode();
        match self.map.get(&key) {
            Some(&i) => i,
            None => {
                let i = self.states.len() as u32;
                self.map.insert(key, i);
                self.states.push(w);
                i
            }
        }
    }
}

/// Compiled row structure, shareable across coupling values.
pub struct AxialCompiled {
    pub basis: Arc<SectorBasis>,
    pub(crate) levels: Vec<Level>,
    pub(crate) perms: Vec<ThroughPerm>,
    pub(crate) interface_sizes: Vec<usize>,
    contacts: bool,
}

const AUX_OFFSET: usize = 0; // aux slot index is n_sites + AUX_OFFSET
const TOKEN_OFFSET: usize = 1;

impl AxialCompiled {
    /// Compile the row for a sector basis. `contacts` enables the two
    /// close-contact tiles.
    pub fn compile(basis: Arc<SectorBasis>, contacts: bool) -> Result<Self, TransferError> {
        if basis.family.boundary != Boundary::Periodic {
            return Err(TransferError::UnsupportedGeometry(
                "axial rows need periodic boundary".into(),
            ));
        }
        let n = basis.n_sites;
        let aux = n + AUX_OFFSET;
        let token = n + TOKEN_OFFSET;
        let crossings = basis.family.allows_crossings();
        let with_ids = basis.irrep().is_some();
        let track = matches!(
            basis.sector,
            Sector::TlStandard { lines: 1.., .. } | Sector::TlTwisted { .. }
        );
        let dilute = basis.family.allows_empty();

        let mut perms: Vec<ThroughPerm> = vec![ThroughPerm::identity()];
        let mut levels: Vec<Level> = Vec::with_capacity(n + 2);
        let mut interface_sizes = vec![basis.n_classes()];

        // injection: basis class -> frontier with the two seam variants
        let mut cur = Interner::new();
        let mut inject = LevelBuilder::new(basis.n_classes());
        for (ci, state) in basis.states().iter().enumerate() {
            let mut w = ExtWork::empty(n + 2, track);
            w.load_state(state, with_ids);
            let plain = cur.intern(w.clone());
            inject.push(ci, plain, CodeDef::unit());
            w.link_new(aux, token, 0);
            let seamed = cur.intern(w);
            inject.push(ci, seamed, CodeDef::unit());
        }
        levels.push(inject.finish());
        interface_sizes.push(cur.states.len());

        // vertices
        for x in 0..n {
            let from_states = std::mem::replace(&mut cur, Interner::new()).states;
            let mut lb = LevelBuilder::new(from_states.len());
            for (fi, f) in from_states.iter().enumerate() {
                let s_occ = f.occupied(x);
                let w_occ = f.occupied(aux);
                for tile in AxialTile::choices(s_occ, w_occ, crossings, contacts && dilute) {
                    // dense families forbid empty sites entirely
                    if !dilute && tile.mask() & (1 | 4) != (1 | 4) {
                        continue;
                    }
                    let mut work = f.clone();
                    let mut tally = Tally::default();
                    tile.apply(&mut work, x, aux, &mut tally);
                    if tally.killed {
                        continue;
                    }
                    let code = CodeDef {
                        mask: tile.mask(),
                        crossing: tile.is_crossing(),
                        contact: tile.is_contact(),
                        loops: tally.loops as u8,
                        wound: tally.wound_loops as u8,
                        seam: tally.seam_exp as i8,
                        perm_idx: 0,
                    };
                    let to = cur.intern(work);
                    lb.push(fi, to, code);
                }
            }
            levels.push(lb.finish());
            interface_sizes.push(cur.states.len());
        }

        // closure
        let final_states = cur.states;
        let mut close = LevelBuilder::new(final_states.len());
        let mut perm_index: HashMap<ThroughPerm, u16> = HashMap::new();
        perm_index.insert(ThroughPerm::identity(), 0);
        for (fi, f) in final_states.iter().enumerate() {
            if f.occupied(aux) != f.occupied(token) {
                continue;
            }
            let mut work = f.clone();
            let mut tally = Tally::default();
            if work.occupied(aux) {
                work.join(token, aux, 1, &mut tally);
                if tally.killed {
                    continue;
                }
            }
            let (state, perm) = work.extract_state(n);
            let Some(to) = basis.index_of(&state) else {
                panic!("axial sweep left the sector basis: {:?}", state);
            };
            let pid = *perm_index.entry(perm.clone()).or_insert_with(|| {
                perms.push(perm.clone());
                (perms.len() - 1) as u16
            });
            let code = CodeDef {
                mask: 0,
                crossing: false,
                contact: false,
                loops: tally.loops as u8,
                wound: tally.wound_loops as u8,
                seam: tally.seam_exp as i8,
                perm_idx: pid,
            };
            close.push(fi, to as u32, code);
        }
        levels.push(close.finish());
        interface_sizes.push(basis.n_classes());

        Ok(AxialCompiled { basis, levels, perms, interface_sizes, contacts })
    }

    pub fn contacts(&self) -> bool {
        self.contacts
    }

    /// Instantiate at a parameter point.
    pub fn instantiate(self: &Arc<Self>, model: &ModelParams) -> Result<AxialRowOp, TransferError> {
        model.validate()?;
        let n = self.basis.n_sites;
        let nn = model.loop_params.n();
        let twist = self.basis.sector.twist_phase();
        let sqrt_k = model.sqrt_k_tables(n);
        let mut level_weights = Vec::with_capacity(self.levels.len());
        let mut real = true;
        for (li, level) in self.levels.iter().enumerate() {
            // vertex index for levels 1..=n; injection/closure carry no mask
            let x = li.wrapping_sub(1);
            let weights: Vec<C64> = level
                .code_defs
                .iter()
                .map(|c| {
                    let mut w = C64::new(1.0, 0.0);
                    if c.mask != 0 {
                        // S=1, W=2, N=4, E=8
                        if c.mask & 1 != 0 {
                            w *= sqrt_k.vert_below[x];
                        }
                        if c.mask & 2 != 0 {
                            w *= sqrt_k.horiz[(x + n - 1) % n];
                        }
                        if c.mask & 4 != 0 {
                            w *= sqrt_k.vert_above[x];
                        }
                        if c.mask & 8 != 0 {
                            w *= sqrt_k.horiz[x];
                        }
                    }
                    if c.crossing {
                        w *= model.w;
                    }
                    if c.contact {
                        w *= model.mu.unwrap_or(1.0);
                    }
                    for _ in 0..c.loops + c.wound {
                        w *= nn;
                    }
                    if c.seam != 0 {
                        w *= twist.powi(c.seam as i32);
                    }
                    w
                })
                .collect();
            if weights.iter().any(|w| w.im.abs() > 1e-300) {
                real = false;
            }
            level_weights.push(weights);
        }
        let irrep_dim = self.basis.irrep_dim();
        let perm_mats: Vec<DMatrix<f64>> = match self.basis.irrep() {
            Some(rep) => self.perms.iter().map(|p| rep.matrix_of(p)).collect(),
            None => Vec::new(),
        };
        Ok(AxialRowOp {
            compiled: Arc::clone(self),
            level_weights,
            perm_mats,
            irrep_dim,
            real,
        })
    }
}

pub(crate) struct SqrtKTables {
    pub vert_below: Vec<f64>,
    pub vert_above: Vec<f64>,
    pub horiz: Vec<f64>,
}

/// A row operator at a fixed parameter point.
pub struct AxialRowOp {
    pub compiled: Arc<AxialCompiled>,
    level_weights: Vec<Vec<C64>>,
    perm_mats: Vec<DMatrix<f64>>,
    irrep_dim: usize,
    real: bool,
}

impl AxialRowOp {
    fn propagate<T, F>(&self, x: &[T], y: &mut [T], zero: T, mul_add: F)
    where
        T: Copy,
        F: Fn(&mut T, T, C64),
    {
        // plain scalar (irrep_dim == 1) pipeline
        let sizes = &self.compiled.interface_sizes;
        let mut cur: Vec<T> = x.to_vec();
        for (li, level) in self.compiled.levels.iter().enumerate() {
            let mut next = vec![zero; sizes[li + 1]];
            let weights = &self.level_weights[li];
            for from in 0..(level.row_ptr.len() - 1) {
                let xv = cur[from];
                let (a, b) = (level.row_ptr[from] as usize, level.row_ptr[from + 1] as usize);
                for e in a..b {
                    let w = weights[level.codes[e] as usize];
                    mul_add(&mut next[level.targets[e] as usize], xv, w);
                }
            }
            cur = next;
        }
        y.copy_from_slice(&cur);
    }

    fn propagate_blocks(&self, x: &[C64], y: &mut [C64]) {
        // irrep blocks: vectors live in (class ⊗ irrep) with irrep fastest
        let d = self.irrep_dim;
        let sizes = &self.compiled.interface_sizes;
        let mut cur: Vec<C64> = x.to_vec();
        let n_levels = self.compiled.levels.len();
        for (li, level) in self.compiled.levels.iter().enumerate() {
            let mut next = vec![C64::new(0.0, 0.0); sizes[li + 1] * d];
            let weights = &self.level_weights[li];
            let is_closure = li == n_levels - 1;
            for from in 0..(level.row_ptr.len() - 1) {
                let (a, b) = (level.row_ptr[from] as usize, level.row_ptr[from + 1] as usize);
                if a == b {
                    continue;
                }
                let src = &cur[from * d..(from + 1) * d];
                for e in a..b {
                    let code = &level.code_defs[level.codes[e] as usize];
                    let w = weights[level.codes[e] as usize];
                    let to = level.targets[e] as usize;
                    if is_closure && code.perm_idx != 0 {
                        let m = &self.perm_mats[code.perm_idx as usize];
                        for r in 0..d {
                            let mut acc = C64::new(0.0, 0.0);
                            for c in 0..d {
                                acc += m[(r, c)] * src[c];
                            }
                            next[to * d + r] += w * acc;
                        }
                    } else {
                        for r in 0..d {
                            next[to * d + r] += w * src[r];
                        }
                    }
                }
            }
            cur = next;
        }
        y.copy_from_slice(&cur);
    }
}

impl LinearOp for AxialRowOp {
    fn dim(&self) -> usize {
        self.compiled.basis.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        if self.irrep_dim == 1 {
            self.propagate(x, y, C64::new(0.0, 0.0), |acc, v, w| *acc += w * v);
        } else {
            self.propagate_blocks(x, y);
        }
    }

    fn is_real(&self) -> bool {
        self.real
    }

    fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        debug_assert!(self.real);
        if self.irrep_dim == 1 {
            self.propagate(x, y, 0.0f64, |acc, v, w| *acc += w.re * v);
        } else {
            // real block pipeline
            let d = self.irrep_dim;
            let sizes = &self.compiled.interface_sizes;
            let mut cur: Vec<f64> = x.to_vec();
            let n_levels = self.compiled.levels.len();
            for (li, level) in self.compiled.levels.iter().enumerate() {
                let mut next = vec![0.0f64; sizes[li + 1] * d];
                let weights = &self.level_weights[li];
                let is_closure = li == n_levels - 1;
                for from in 0..(level.row_ptr.len() - 1) {
                    let (a, b) = (level.row_ptr[from] as usize, level.row_ptr[from + 1] as usize);
                    if a == b {
                        continue;
                    }
                    let src = &cur[from * d..(from + 1) * d];
                    for e in a..b {
                        let code = &level.code_defs[level.codes[e] as usize];
                        let w = weights[level.codes[e] as usize].re;
                        let to = level.targets[e] as usize;
                        if is_closure && code.perm_idx != 0 {
                            let m = &self.perm_mats[code.perm_idx as usize];
                            for r in 0..d {
                                let mut acc = 0.0;
                                for c in 0..d {
                                    acc += m[(r, c)] * src[c];
                                }
                                next[to * d + r] += w * acc;
                            }
                        } else {
                            for r in 0..d {
                                next[to * d + r] += w * src[r];
                            }
                        }
                    }
                }
                cur = next;
            }
            y.copy_from_slice(&cur);
        }
    }
}

/// Interpreted single-state application of the axial row; used by the torus
/// trace and as a cross-check of the compiled engine.
pub(crate) fn axial_apply_interpreted(
    state: &LinkState,
    basis: &SectorBasis,
    model: &ModelParams,
    contacts: bool,
) -> Vec<(LinkState, ThroughPerm, C64)> {
    let n = basis.n_sites;
    let aux = n;
    let token = n + 1;
    let crossings = basis.family.allows_crossings();
    let dilute = basis.family.allows_empty();
    let with_ids = basis.irrep().is_some();
    let track = matches!(
        basis.sector,
        Sector::TlStandard { lines: 1.., .. } | Sector::TlTwisted { .. }
    );
    let nn = model.loop_params.n();
    let twist = basis.sector.twist_phase();
    let sqrt_k = model.sqrt_k_tables(n);

    let mut out = Vec::new();
    let mut stack: Vec<(ExtWork, usize, C64)> = Vec::new();
    let mut w0 = ExtWork::empty(n + 2, track);
    w0.load_state(state, with_ids);
    stack.push((w0.clone(), 0, C64::new(1.0, 0.0)));
    w0.link_new(aux, token, 0);
    stack.push((w0, 0, C64::new(1.0, 0.0)));
    while let Some((f, x, coeff)) = stack.pop() {
        if x == n {
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
            let (st, perm) = work.extract_state(n);
            let mut c = coeff;
            for _ in 0..tally.loops + tally.wound_loops {
                c *= nn;
            }
            c *= twist.powi(tally.seam_exp as i32);
            out.push((st, perm, c));
            continue;
        }
        let s_occ = f.occupied(x);
        let w_occ = f.occupied(aux);
        for tile in AxialTile::choices(s_occ, w_occ, crossings, contacts && dilute) {
            if !dilute && tile.mask() & (1 | 4) != (1 | 4) {
                continue;
            }
            let mut work = f.clone();
            let mut tally = Tally::default();
            tile.apply(&mut work, x, aux, &mut tally);
            if tally.killed {
                continue;
            }
            let mut c = coeff;
            let mask = tile.mask();
            if mask & 1 != 0 {
                c *= sqrt_k.vert_below[x];
            }
            if mask & 2 != 0 {
                c *= sqrt_k.horiz[(x + n - 1) % n];
            }
            if mask & 4 != 0 {
                c *= sqrt_k.vert_above[x];
            }
            if mask & 8 != 0 {
                c *= sqrt_k.horiz[x];
            }
            if tile.is_crossing() {
                c *= model.w;
            }
            if tile.is_contact() {
                c *= model.mu.unwrap_or(1.0);
            }
            for _ in 0..tally.loops + tally.wound_loops {
                c *= nn;
            }
            c *= twist.powi(tally.seam_exp as i32);
            stack.push((work, x + 1, c));
        }
    }
    out
}
