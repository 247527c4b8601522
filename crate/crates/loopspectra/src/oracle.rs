//! Independent brute-force engines.
//!
//! Everything in this module is deliberately naive: partition functions are
//! exact sums over all tile assignments with union-find loop counting, and
//! spin chains are dense matrices in the vector representation at integer
//! `n`. These engines validate the transfer-matrix and defect machinery;
//! they share no code path with it.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::algebra::LoopParams;
use crate::C64;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("patch of {0} vertices exceeds the enumeration cap of {1}")]
    CapExceeded(usize, usize),
    #[error("spin-chain dimension {0} exceeds the dense cap of {1}")]
    DimensionTooLarge(usize, usize),
    #[error("loop fugacity must be a positive integer for the spin oracle")]
    NonIntegerN,
    #[error("defect path crosses edge {0:?} more than once")]
    RepeatedEdgeCrossing(EdgeId),
    #[error("defect path is not closed")]
    OpenPath,
    #[error("symbolic mode does not support {0}")]
    SymbolicUnsupported(&'static str),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Default cap on the number of lattice vertices in one enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 20;

// ---------------------------------------------------------------------------
// Patches
// ---------------------------------------------------------------------------

/// Tile geometry of a patch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatchGeometry {
    /// Axially oriented square lattice with the eight-vertex dilute Brauer
    /// tile set (crossing weight `w`, optional close-contact weight `mu`).
    Axial,
    /// Diagonal (natural-propagation) geometry: faces carry the nine dilute
    /// tiles; the dense variant restricts to the last two.
    DiagonalDilute,
    /// Diagonal geometry, fully dense (only the two two-monomer tiles).
    DiagonalDense,
}

/// A small doubly periodic patch: `width` columns on a cylinder, `height`
/// rows traced around the periodic time direction.
#[derive(Clone, Debug)]
pub struct LatticePatch {
    pub geometry: PatchGeometry,
    pub width: usize,
    pub height: usize,
    /// Uniform monomer fugacity, used when `edge_k` is `None`.
    pub k: f64,
    /// Optional per-edge override of `K` (Axial only), keyed by edge id.
    pub edge_k: Option<BTreeMap<EdgeId, f64>>,
    pub w: f64,
    /// Close-contact tile weight; `None` disables the contact tiles.
    pub mu: Option<f64>,
    pub cap: usize,
}

impl LatticePatch {
    pub fn axial(width: usize, height: usize, k: f64, w: f64) -> Self {
        LatticePatch {
            geometry: PatchGeometry::Axial,
            width,
            height,
            k,
            edge_k: None,
            w,
            mu: None,
            cap: DEFAULT_VERTEX_CAP,
        }
    }

    pub fn diagonal_dense(width: usize, height: usize, k: f64) -> Self {
        LatticePatch {
            geometry: PatchGeometry::DiagonalDense,
            width,
            height,
            k,
            edge_k: None,
            w: 0.0,
            mu: None,
            cap: DEFAULT_VERTEX_CAP,
        }
    }

    pub fn diagonal_dilute(width: usize, height: usize, k: f64) -> Self {
        LatticePatch {
            geometry: PatchGeometry::DiagonalDilute,
            width,
            height,
            k,
            edge_k: None,
            w: 0.0,
            mu: None,
            cap: DEFAULT_VERTEX_CAP,
        }
    }

    fn n_vertices(&self) -> usize {
        match self.geometry {
            PatchGeometry::Axial => self.width * self.height,
            // faces per row = width/2
            _ => self.width / 2 * self.height,
        }
    }

    fn check_cap(&self) -> Result<()> {
        let n = self.n_vertices();
        if n > self.cap {
            return Err(OracleError::CapExceeded(n, self.cap));
        }
        Ok(())
    }

    fn k_of(&self, e: EdgeId) -> f64 {
        match &self.edge_k {
            Some(map) => *map.get(&e).unwrap_or(&self.k),
            None => self.k,
        }
    }
}

/// An edge of the axial patch: `Vertical(x, y)` joins vertex `(x,y)` to
/// `(x, y+1 mod H)`; `Horizontal(x, y)` joins `(x,y)` to `(x+1 mod W, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeId {
    Vertical(usize, usize),
    Horizontal(usize, usize),
}

/// A closed defect path on the dual lattice: a starting plaquette and a
/// sequence of moves. Plaquette `(x, y)` of the axial patch has corners
/// `(x,y) … (x+1,y+1)`; moving `Right` crosses `Vertical(x+1, y)`, moving
/// `Up` crosses `Horizontal(x, y+1)`.
#[derive(Clone, Debug)]
pub struct DefectPath {
    pub variant: DefectSide,
    pub start: (usize, usize),
    pub moves: Vec<PathMove>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectSide {
    Over,
    Under,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMove {
    Up,
    Down,
    Left,
    Right,
}

impl DefectPath {
    /// A straight loop winding the cylinder between rows `y` and `y+1`
    /// (crosses every `Vertical(·, y)`).
    pub fn straight_row(width: usize, y: usize, variant: DefectSide) -> Self {
        DefectPath {
            variant,
            start: (0, y),
            moves: vec![PathMove::Right; width],
        }
    }

    /// A rectangular contractible loop around the plaquettes
    /// `x0..x0+w, y0..y0+h` (counterclockwise).
    pub fn rectangle(x0: usize, y0: usize, w: usize, h: usize, variant: DefectSide) -> Self {
        let mut moves = Vec::new();
        moves.extend(std::iter::repeat(PathMove::Right).take(w));
        moves.extend(std::iter::repeat(PathMove::Up).take(h));
        moves.extend(std::iter::repeat(PathMove::Left).take(w));
        moves.extend(std::iter::repeat(PathMove::Down).take(h));
        DefectPath { variant, start: (x0, y0), moves }
    }

    /// The straight row loop with a one-plaquette detour over plaquette
    /// `(x_detour, y+1)`.
    pub fn row_with_detour(width: usize, y: usize, x_detour: usize, variant: DefectSide) -> Self {
        let mut moves = Vec::new();
        for x in 0..width {
            if x == x_detour {
                moves.push(PathMove::Up);
                moves.push(PathMove::Right);
                moves.push(PathMove::Down);
            } else {
                moves.push(PathMove::Right);
            }
        }
        DefectPath { variant, start: (0, y), moves }
    }

    /// Ordered list of crossed edges with the red direction of travel.
    fn crossings(&self, width: usize, height: usize) -> Result<Vec<(EdgeId, PathMove)>> {
        let (mut x, mut y) = self.start;
        let mut out = Vec::new();
        for &m in &self.moves {
            let crossing = match m {
                PathMove::Right => {
                    let e = EdgeId::Vertical((x + 1) % width, y % height);
                    x = (x + 1) % width;
                    (e, m)
                }
                PathMove::Left => {
                    let e = EdgeId::Vertical(x % width, y % height);
                    x = (x + width - 1) % width;
                    (e, m)
                }
                PathMove::Up => {
                    let e = EdgeId::Horizontal(x % width, (y + 1) % height);
                    y = (y + 1) % height;
                    (e, m)
                }
                PathMove::Down => {
                    let e = EdgeId::Horizontal(x % width, y % height);
                    y = (y + height - 1) % height;
                    (e, m)
                }
            };
            out.push(crossing);
        }
        if (x % width, y % height) != (self.start.0 % width, self.start.1 % height) {
            return Err(OracleError::OpenPath);
        }
        let mut seen = Vec::new();
        for (e, _) in &out {
            if seen.contains(e) {
                return Err(OracleError::RepeatedEdgeCrossing(*e));
            }
            seen.push(*e);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Symbolic partition function
// ---------------------------------------------------------------------------

/// `Z` as an exact polynomial: integer counts keyed by
/// `(loops, monomers, crossings, contacts)`, i.e.
/// `Z = Σ c · n^loops · K^monomers · w^crossings · μ^contacts`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZPolynomial {
    pub terms: BTreeMap<(u32, u32, u32, u32), i64>,
}

impl ZPolynomial {
    fn add(&mut self, key: (u32, u32, u32, u32), count: i64) {
        *self.terms.entry(key).or_insert(0) += count;
    }

    pub fn eval(&self, n: f64, k: f64, w: f64, mu: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b, c, d), &cnt)| {
                cnt as f64 * n.powi(a as i32) * k.powi(b as i32) * w.powi(c as i32)
                    * mu.powi(d as i32)
            })
            .sum()
    }
}

impl fmt::Display for ZPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b, c, d), &cnt) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{cnt}")?;
            if a > 0 {
                write!(f, " * n^{a}")?;
            }
            if b > 0 {
                write!(f, " * K^{b}")?;
            }
            if c > 0 {
                write!(f, " * w^{c}")?;
            }
            if d > 0 {
                write!(f, " * mu^{d}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Union-find
// ---------------------------------------------------------------------------

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let p = self.parent[i as usize];
            self.parent[i as usize] = self.parent[p as usize];
            i = self.parent[i as usize];
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra as usize] = rb;
        }
    }
}

// ---------------------------------------------------------------------------
// Axial enumeration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AxialTile {
    EmptyTile,
    CornerSN, // straight through, south-north
    CornerWE, // straight through, west-east
    CornerSE,
    CornerEN,
    CornerNW,
    CornerWS,
    Crossing,
    ContactSeWn, // close contact: (S–E)(W–N)
    ContactSwNe, // close contact: (S–W)(N–E)
}

impl AxialTile {
    fn choices(s: bool, w_occ: bool, has_w: bool, has_mu: bool) -> &'static [AxialTile] {
        use AxialTile::*;
        match (s, w_occ) {
            (false, false) => &[EmptyTile, CornerEN],
            (true, false) => &[CornerSN, CornerSE],
            (false, true) => &[CornerWE, CornerNW],
            (true, true) => {
                if has_w && has_mu {
                    &[CornerWS, Crossing, ContactSeWn, ContactSwNe]
                } else if has_w {
                    &[CornerWS, Crossing]
                } else if has_mu {
                    &[CornerWS, ContactSeWn, ContactSwNe]
                } else {
                    &[CornerWS]
                }
            }
        }
    }

    fn outputs(&self) -> (bool, bool) {
        use AxialTile::*;
        match self {
            EmptyTile => (false, false),
            CornerSN => (true, false),
            CornerWE => (false, true),
            CornerSE => (false, true),
            CornerEN => (true, true),
            CornerNW => (true, false),
            CornerWS => (false, false),
            Crossing | ContactSeWn | ContactSwNe => (true, true),
        }
    }

    /// Pairs of connected half-edges: 0 = S, 1 = W, 2 = N, 3 = E.
    fn connections(&self) -> &'static [(u8, u8)] {
        use AxialTile::*;
        match self {
            EmptyTile => &[],
            CornerSN => &[(0, 2)],
            CornerWE => &[(1, 3)],
            CornerSE => &[(0, 3)],
            CornerEN => &[(3, 2)],
            CornerNW => &[(2, 1)],
            CornerWS => &[(1, 0)],
            Crossing => &[(0, 2), (1, 3)],
            ContactSeWn => &[(0, 3), (1, 2)],
            ContactSwNe => &[(0, 1), (2, 3)],
        }
    }

    fn crossings(&self) -> u32 {
        matches!(self, AxialTile::Crossing) as u32
    }

    fn contacts(&self) -> u32 {
        matches!(self, AxialTile::ContactSeWn | AxialTile::ContactSwNe) as u32
    }
}

struct AxialEnumerator<'a> {
    patch: &'a LatticePatch,
    params: Option<&'a LoopParams>,
    defect: Option<(&'a DefectPath, Vec<(EdgeId, PathMove)>)>,
    symbolic: Option<ZPolynomial>,
    numeric: C64,
}

fn axial_edge_of(w: usize, h: usize, x: usize, y: usize, side: u8) -> EdgeId {
    match side {
        0 => EdgeId::Vertical(x, (y + h - 1) % h),
        2 => EdgeId::Vertical(x, y),
        1 => EdgeId::Horizontal((x + w - 1) % w, y),
        3 => EdgeId::Horizontal(x, y),
        _ => unreachable!(),
    }
}

/// Count the closed loops of one resolved configuration: tile pairings plus
/// the red-line splices given by `choices`.
fn axial_count_loops(
    w: usize,
    h: usize,
    tiles: &[AxialTile],
    occupied: &BTreeMap<EdgeId, usize>,
    crossed: &[(EdgeId, PathMove)],
    choices: &[bool],
) -> u32 {
    let n_el = 2 * occupied.len() + 1;
    let red_start = (n_el - 1) as u32;
    let mut uf = UnionFind::new(n_el);
    for y in 0..h {
        for x in 0..w {
            for &(s1, s2) in tiles[y * w + x].connections() {
                let el = |side: u8| -> u32 {
                    let e = axial_edge_of(w, h, x, y, side);
                    let i = occupied[&e];
                    // which end of the edge touches this vertex
                    let hi = match (e, side) {
                        (EdgeId::Vertical(..), 0) => true,
                        (EdgeId::Vertical(..), 2) => false,
                        (EdgeId::Horizontal(..), 1) => true,
                        (EdgeId::Horizontal(..), 3) => false,
                        _ => unreachable!(),
                    };
                    (2 * i + hi as usize) as u32
                };
                uf.union(el(s1), el(s2));
            }
        }
    }
    for (e, &i) in occupied {
        if !crossed.iter().any(|(ce, _)| ce == e) {
            uf.union(2 * i as u32, 2 * i as u32 + 1);
        }
    }
    let mut cur = red_start;
    for (ci, (e, dir)) in crossed.iter().enumerate() {
        let Some(&i) = occupied.get(e) else { continue };
        let lo = 2 * i as u32;
        let hi = lo + 1;
        // blue end reached by turning left from the red direction
        let (b_left, b_right) = match dir {
            PathMove::Right => (hi, lo),
            PathMove::Left => (lo, hi),
            PathMove::Up => (lo, hi),
            PathMove::Down => (hi, lo),
        };
        if choices[ci] {
            uf.union(cur, b_left);
            cur = b_right;
        } else {
            uf.union(cur, b_right);
            cur = b_left;
        }
    }
    uf.union(cur, red_start);
    let mut roots = Vec::new();
    for i in 0..n_el as u32 {
        let r = uf.find(i);
        if !roots.contains(&r) {
            roots.push(r);
        }
    }
    roots.len() as u32
}

impl<'a> AxialEnumerator<'a> {

    fn run(&mut self) -> Result<()> {
        let w = self.patch.width;
        for bottom in 0usize..(1 << w) {
            let south: Vec<bool> = (0..w).map(|x| bottom >> x & 1 == 1).collect();
            let mut tiles = vec![AxialTile::EmptyTile; w * self.patch.height];
            self.recurse_row(0, &south, &south.clone(), None, &mut tiles)?;
        }
        Ok(())
    }

    /// DFS over the vertices of row `y`. `south` is the occupancy of the
    /// edges below this row; `bottom` that below row 0 (for the final
    /// gluing); `row_state = (left0, west, tiles so far)` tracks the seam
    /// choice and the running horizontal edge.
    fn recurse_row(
        &mut self,
        y: usize,
        south: &[bool],
        bottom: &[bool],
        row_state: Option<(bool, bool, Vec<AxialTile>)>,
        all_tiles: &mut Vec<AxialTile>,
    ) -> Result<()> {
        let w = self.patch.width;
        let h = self.patch.height;
        let Some((left0, west, row_tiles)) = row_state else {
            for left0 in [false, true] {
                self.recurse_row(y, south, bottom, Some((left0, left0, Vec::new())), all_tiles)?;
            }
            return Ok(());
        };
        let x = row_tiles.len();
        if x == w {
            // seam closure: the last east edge must match the chosen left0
            if west != left0 {
                return Ok(());
            }
            let north: Vec<bool> = row_tiles.iter().map(|t| t.outputs().0).collect();
            for (i, t) in row_tiles.iter().enumerate() {
                all_tiles[y * w + i] = *t;
            }
            if y + 1 == h {
                if north == bottom {
                    self.account(all_tiles)?;
                }
                return Ok(());
            }
            return self.recurse_row(y + 1, &north, bottom, None, all_tiles);
        }
        let has_w = self.patch.w != 0.0;
        let has_mu = self.patch.mu.is_some();
        for &tile in AxialTile::choices(south[x], west, has_w, has_mu) {
            let (_, east) = tile.outputs();
            let mut row2 = row_tiles.clone();
            row2.push(tile);
            self.recurse_row(y, south, bottom, Some((left0, east, row2)), all_tiles)?;
        }
        Ok(())
    }

    /// Weight one complete tile assignment, resolving defect crossings.
    fn account(&mut self, tiles: &[AxialTile]) -> Result<()> {
        let w = self.patch.width;
        let h = self.patch.height;
        let mut occupied: BTreeMap<EdgeId, usize> = BTreeMap::new();
        let mut monomers = 0u32;
        let mut crossings = 0u32;
        let mut contacts = 0u32;
        let mut k_weight = 1.0f64;
        for y in 0..h {
            for x in 0..w {
                let t = tiles[y * w + x];
                crossings += t.crossings();
                contacts += t.contacts();
                for &(s1, s2) in t.connections() {
                    for s in [s1, s2] {
                        let e = axial_edge_of(w, h, x, y, s);
                        let next = occupied.len();
                        if let std::collections::btree_map::Entry::Vacant(v) = occupied.entry(e) {
                            v.insert(next);
                            monomers += 1;
                            k_weight *= self.patch.k_of(e);
                        }
                    }
                }
            }
        }

        let model_weight = {
            let wfac = if crossings > 0 { self.patch.w.powi(crossings as i32) } else { 1.0 };
            wfac * self.patch.mu.unwrap_or(1.0).powi(contacts as i32)
        };

        if let Some((path, crossings_list)) = &self.defect {
            let active: Vec<usize> = crossings_list
                .iter()
                .enumerate()
                .filter(|(_, (e, _))| occupied.contains_key(e))
                .map(|(i, _)| i)
                .collect();
            let m = active.len();
            let params = self.params.expect("defect paths need numeric parameters");
            // choices[ci] = true joins red-in to the left blue end; Under
            // swaps the two weights (q -> 1/q on the fixed branch)
            let s = params.sqrt_minus_q();
            let (w_a, w_b) = match path.variant {
                DefectSide::Over => (s.inv(), s),
                DefectSide::Under => (s, s.inv()),
            };
            let mut total = C64::new(0.0, 0.0);
            for mask in 0..(1u32 << m) {
                let mut choices = vec![false; crossings_list.len()];
                let mut weight = C64::new(1.0, 0.0);
                for (bit, &ci) in active.iter().enumerate() {
                    let c = mask >> bit & 1 == 1;
                    choices[ci] = c;
                    weight *= if c { w_a } else { w_b };
                }
                let loops = axial_count_loops(w, h, tiles, &occupied, crossings_list, &choices);
                total += weight * params.n().powu(loops);
            }
            self.numeric += total * k_weight * model_weight;
        } else {
            // the lone red node is not a loop
            let loops = axial_count_loops(w, h, tiles, &occupied, &[], &[]) - 1;
            if let Some(z) = &mut self.symbolic {
                if self.patch.edge_k.is_some() {
                    return Err(OracleError::SymbolicUnsupported("per-edge K"));
                }
                z.add((loops, monomers, crossings, contacts), 1);
            } else {
                self.numeric +=
                    self.params.unwrap().n().powu(loops) * k_weight * model_weight;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Diagonal enumeration
// ---------------------------------------------------------------------------

/// A diagonal tile: corner occupancies (SW, SE, NW, NE), connections among
/// occupied corners (0 = SW, 1 = SE, 2 = NW, 3 = NE) and monomer count.
#[derive(Clone, Copy, Debug)]
struct DiagTile {
    occ: (bool, bool, bool, bool),
    conn: &'static [(u8, u8)],
    monomers: u32,
}

const DIAG_TILES: [DiagTile; 9] = [
    DiagTile { occ: (false, false, false, false), conn: &[], monomers: 0 },
    DiagTile { occ: (true, false, true, false), conn: &[(0, 2)], monomers: 1 }, // left bounce
    DiagTile { occ: (false, true, false, true), conn: &[(1, 3)], monomers: 1 }, // right bounce
    DiagTile { occ: (true, true, false, false), conn: &[(0, 1)], monomers: 1 }, // bottom bounce
    DiagTile { occ: (false, false, true, true), conn: &[(2, 3)], monomers: 1 }, // top bounce
    DiagTile { occ: (false, true, true, false), conn: &[(1, 2)], monomers: 1 }, // NW–SE pass
    DiagTile { occ: (true, false, false, true), conn: &[(0, 3)], monomers: 1 }, // SW–NE pass
    DiagTile { occ: (true, true, true, true), conn: &[(0, 2), (1, 3)], monomers: 2 }, // double vertical
    DiagTile { occ: (true, true, true, true), conn: &[(0, 1), (2, 3)], monomers: 2 }, // double horizontal
];

struct DiagonalEnumerator<'a> {
    patch: &'a LatticePatch,
    tiles: Vec<&'static DiagTile>,
    params: Option<&'a LoopParams>,
    symbolic: Option<ZPolynomial>,
    numeric: C64,
}

impl<'a> DiagonalEnumerator<'a> {
    fn run(&mut self) -> Result<()> {
        let n_links = self.patch.width;
        let dense = self.patch.geometry == PatchGeometry::DiagonalDense;
        for mask in 0usize..(1 << n_links) {
            let level0: Vec<bool> = (0..n_links).map(|x| mask >> x & 1 == 1).collect();
            if dense && level0.iter().any(|&o| !o) {
                continue;
            }
            let mut assignment = Vec::new();
            self.recurse(&level0, &level0.clone(), 0, &mut assignment);
            if dense {
                break;
            }
        }
        Ok(())
    }

    fn recurse(&mut self, level0: &[bool], cur: &[bool], row: usize, assignment: &mut Vec<usize>) {
        if row == self.patch.height {
            if cur == level0 {
                self.account(level0, assignment);
            }
            return;
        }
        self.faces(level0, cur, &mut cur.to_vec(), row, 0, assignment);
    }

    fn faces(
        &mut self,
        level0: &[bool],
        cur: &[bool],
        next: &mut Vec<bool>,
        row: usize,
        face: usize,
        assignment: &mut Vec<usize>,
    ) {
        let n_links = self.patch.width;
        let faces_per_row = n_links / 2;
        if face == faces_per_row {
            let frozen = next.clone();
            self.recurse(level0, &frozen, row + 1, assignment);
            return;
        }
        let off = row % 2;
        let a = (2 * face + off) % n_links;
        let b = (2 * face + 1 + off) % n_links;
        let n_tiles = self.tiles.len();
        for ti in 0..n_tiles {
            let t = self.tiles[ti];
            if t.occ.0 != cur[a] || t.occ.1 != cur[b] {
                continue;
            }
            assignment.push(ti);
            next[a] = t.occ.2;
            next[b] = t.occ.3;
            self.faces(level0, cur, next, row, face + 1, assignment);
            assignment.pop();
        }
    }

    fn account(&mut self, level0: &[bool], assignment: &[usize]) {
        let n_links = self.patch.width;
        let faces_per_row = n_links / 2;
        let h = self.patch.height;
        // reconstruct link occupancies per level
        let mut levels: Vec<Vec<bool>> = vec![level0.to_vec()];
        for row in 0..h {
            let mut next = levels[row].clone();
            let off = row % 2;
            for face in 0..faces_per_row {
                let t = self.tiles[assignment[row * faces_per_row + face]];
                let a = (2 * face + off) % n_links;
                let b = (2 * face + 1 + off) % n_links;
                next[a] = t.occ.2;
                next[b] = t.occ.3;
            }
            levels.push(next);
        }
        let mut index: BTreeMap<(usize, usize), u32> = BTreeMap::new();
        let mut count = 0u32;
        for (y, lv) in levels.iter().take(h).enumerate() {
            for (x, &occ) in lv.iter().enumerate() {
                if occ {
                    index.insert((x, y), count);
                    count += 1;
                }
            }
        }
        let mut uf = UnionFind::new(count as usize);
        let mut monomers = 0u32;
        for row in 0..h {
            let off = row % 2;
            for face in 0..faces_per_row {
                let t = self.tiles[assignment[row * faces_per_row + face]];
                monomers += t.monomers;
                let a = (2 * face + off) % n_links;
                let b = (2 * face + 1 + off) % n_links;
                let corner = |c: u8| -> u32 {
                    let (x, y) = match c {
                        0 => (a, row),
                        1 => (b, row),
                        2 => (a, (row + 1) % h),
                        3 => (b, (row + 1) % h),
                        _ => unreachable!(),
                    };
                    index[&(x, y)]
                };
                for &(c1, c2) in t.conn {
                    uf.union(corner(c1), corner(c2));
                }
            }
        }
        let mut roots = Vec::new();
        for i in 0..count {
            let r = uf.find(i);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        let loops = roots.len() as u32;
        if let Some(z) = &mut self.symbolic {
            z.add((loops, monomers, 0, 0), 1);
        } else {
            let p = self.params.unwrap();
            self.numeric += p.n().powu(loops) * self.patch.k.powi(monomers as i32);
        }
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Exact partition function of a patch with numeric parameters and an
/// optional defect loop.
pub fn enumerate_z(
    patch: &LatticePatch,
    params: &LoopParams,
    defect: Option<&DefectPath>,
) -> Result<C64> {
    patch.check_cap()?;
    match patch.geometry {
        PatchGeometry::Axial => {
            let crossings = match defect {
                Some(p) => Some((p, p.crossings(patch.width, patch.height)?)),
                None => None,
            };
            let mut e = AxialEnumerator {
                patch,
                params: Some(params),
                defect: crossings,
                symbolic: None,
                numeric: C64::new(0.0, 0.0),
            };
            e.run()?;
            Ok(e.numeric)
        }
        PatchGeometry::DiagonalDense | PatchGeometry::DiagonalDilute => {
            if defect.is_some() {
                return Err(OracleError::SymbolicUnsupported(
                    "defect paths on diagonal patches",
                ));
            }
            let dense = patch.geometry == PatchGeometry::DiagonalDense;
            let tiles: Vec<&'static DiagTile> = if dense {
                DIAG_TILES[7..9].iter().collect()
            } else {
                DIAG_TILES.iter().collect()
            };
            let mut e = DiagonalEnumerator {
                patch,
                tiles,
                params: Some(params),
                symbolic: None,
                numeric: C64::new(0.0, 0.0),
            };
            e.run()?;
            Ok(e.numeric)
        }
    }
}

/// Exact partition function as an integer-coefficient polynomial in
/// `(n, K, w, μ)`. Defect paths are not supported symbolically.
pub fn enumerate_z_symbolic(patch: &LatticePatch) -> Result<ZPolynomial> {
    patch.check_cap()?;
    match patch.geometry {
        PatchGeometry::Axial => {
            let mut e = AxialEnumerator {
                patch,
                params: None,
                defect: None,
                symbolic: Some(ZPolynomial::default()),
                numeric: C64::new(0.0, 0.0),
            };
            e.run()?;
            Ok(e.symbolic.unwrap())
        }
        PatchGeometry::DiagonalDense | PatchGeometry::DiagonalDilute => {
            let dense = patch.geometry == PatchGeometry::DiagonalDense;
            let tiles: Vec<&'static DiagTile> = if dense {
                DIAG_TILES[7..9].iter().collect()
            } else {
                DIAG_TILES.iter().collect()
            };
            let mut e = DiagonalEnumerator {
                patch,
                tiles,
                params: None,
                symbolic: Some(ZPolynomial::default()),
                numeric: C64::new(0.0, 0.0),
            };
            e.run()?;
            Ok(e.symbolic.unwrap())
        }
    }
}

/// Relative residual `|Z(path1) − Z(path2)| / |Z(path1)|` between two
/// homotopic defect paths.
pub fn verify_topological_move(
    patch: &LatticePatch,
    params: &LoopParams,
    path1: &DefectPath,
    path2: &DefectPath,
) -> Result<f64> {
    let z1 = enumerate_z(patch, params, Some(path1))?;
    let z2 = enumerate_z(patch, params, Some(path2))?;
    Ok((z1 - z2).norm() / z1.norm())
}

// ---------------------------------------------------------------------------
// Integer-n spin chains
// ---------------------------------------------------------------------------

/// Dense-matrix cap for the spin oracle.
pub const SPIN_DENSE_CAP: usize = 20_000;

/// The vector representation `[1]^{⊗N}` (dense, letters `1..=n`) or
/// `([ ]+[1])^{⊗N}` (dilute, letters `0..=n` with `0` the empty state).
#[derive(Clone, Copy, Debug)]
pub struct SpinChain {
    pub n: u32,
    pub n_sites: usize,
    pub dilute: bool,
}

/// Operators in the vector representation.
#[derive(Clone, Copy, Debug)]
pub enum SpinOp {
    E(usize),
    Tau,
    TauInv,
    Pi(usize),
}

impl SpinChain {
    pub fn new(n: u32, n_sites: usize, dilute: bool) -> Result<Self> {
        if n == 0 {
            return Err(OracleError::NonIntegerN);
        }
        let chain = SpinChain { n, n_sites, dilute };
        if chain.dim() > SPIN_DENSE_CAP {
            return Err(OracleError::DimensionTooLarge(chain.dim(), SPIN_DENSE_CAP));
        }
        Ok(chain)
    }

    pub fn alphabet(&self) -> u32 {
        if self.dilute {
            self.n + 1
        } else {
            self.n
        }
    }

    pub fn dim(&self) -> usize {
        (self.alphabet() as usize).pow(self.n_sites as u32)
    }

    /// Letters of basis vector `idx` (dense letters are `1..=n`).
    pub fn decode(&self, mut idx: usize) -> Vec<u8> {
        let a = self.alphabet() as usize;
        let mut out = vec![0u8; self.n_sites];
        for site in (0..self.n_sites).rev() {
            out[site] = (idx % a) as u8;
            idx /= a;
        }
        if !self.dilute {
            for b in &mut out {
                *b += 1;
            }
        }
        out
    }

    pub fn encode(&self, letters: &[u8]) -> usize {
        let a = self.alphabet() as usize;
        letters.iter().fold(0usize, |acc, &b| {
            let v = if self.dilute { b as usize } else { b as usize - 1 };
            acc * a + v
        })
    }

    /// Dense matrix of a single operator. `e_i` checks site occupation in
    /// the dilute chain (letter 0 is transparent to nothing: the dense
    /// Temperley–Lieb move needs both letters nonzero and equal).
    pub fn matrix(&self, op: SpinOp) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::<C64>::zeros(d, d);
        let one = C64::new(1.0, 0.0);
        for col in 0..d {
            let letters = self.decode(col);
            match op {
                SpinOp::Tau => {
                    let mut out = letters.clone();
                    out.rotate_right(1);
                    m[(self.encode(&out), col)] += one;
                }
                SpinOp::TauInv => {
                    let mut out = letters.clone();
                    out.rotate_left(1);
                    m[(self.encode(&out), col)] += one;
                }
                SpinOp::Pi(i) => {
                    let j = (i + 1) % self.n_sites;
                    let mut out = letters.clone();
                    out.swap(i, j);
                    m[(self.encode(&out), col)] += one;
                }
                SpinOp::E(i) => {
                    let j = (i + 1) % self.n_sites;
                    let (a, b) = (letters[i], letters[j]);
                    let occupied = !self.dilute || (a != 0 && b != 0);
                    if a == b && occupied {
                        for c in 1..=self.n as u8 {
                            let mut out = letters.clone();
                            out[i] = c;
                            out[j] = c;
                            m[(self.encode(&out), col)] += one;
                        }
                    }
                }
            }
        }
        m
    }

    /// Dense matrix of an operator word (leftmost factor acts last).
    pub fn word(&self, ops: &[SpinOp]) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::<C64>::identity(d, d);
        for op in ops.iter().rev() {
            m = self.matrix(*op) * m;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: f64) -> LoopParams {
        LoopParams::from_n_real(n).unwrap()
    }

    #[test]
    fn axial_one_by_one_hand_value() {
        // Z(1x1 torus) = 1 + 2 K n + K^2 w n^2, enumerated by hand
        let patch = LatticePatch::axial(1, 1, 0.3, 1.7);
        let params = p(0.75);
        let z = enumerate_z(&patch, &params, None).unwrap();
        let n = 0.75;
        let expect = 1.0 + 2.0 * 0.3 * n + 0.3 * 0.3 * 1.7 * n * n;
        assert!((z - C64::new(expect, 0.0)).norm() < 1e-13, "z = {z}");
        let sym = enumerate_z_symbolic(&patch).unwrap();
        assert!((sym.eval(n, 0.3, 1.7, 1.0) - expect).abs() < 1e-13);
    }

    #[test]
    fn diagonal_dense_hand_values() {
        // N=2 sites, H=1 face row: Z = K^2 n (n + 1)
        let params = p(0.6);
        let n = 0.6;
        let z1 = enumerate_z(&LatticePatch::diagonal_dense(2, 1, 0.5), &params, None).unwrap();
        assert!((z1.re - 0.25 * n * (n + 1.0)).abs() < 1e-13, "z1 = {z1}");
        // N=2, H=2: Z = K^4 · 2 n (n + 1)
        let z2 = enumerate_z(&LatticePatch::diagonal_dense(2, 2, 0.5), &params, None).unwrap();
        assert!((z2.re - 0.0625 * 2.0 * n * (n + 1.0)).abs() < 1e-13, "z2 = {z2}");
    }

    #[test]
    fn k_zero_dilute_patch_is_empty_only() {
        let patch = LatticePatch::axial(3, 3, 0.0, 0.0);
        let z = enumerate_z(&patch, &p(0.5), None).unwrap();
        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn symbolic_substitution_matches_numeric() {
        let patch = LatticePatch::axial(2, 2, 0.8, 1.3);
        let sym = enumerate_z_symbolic(&patch).unwrap();
        let z = enumerate_z(&patch, &p(0.9), None).unwrap();
        assert!((z.re - sym.eval(0.9, 0.8, 1.3, 1.0)).abs() < 1e-11);
        // n = 1 turns Z into the plain weighted configuration count
        let z1 = enumerate_z(&patch, &p(1.0), None).unwrap();
        assert!((z1.re - sym.eval(1.0, 0.8, 1.3, 1.0)).abs() < 1e-11);
    }

    #[test]
    fn contractible_defect_loop_gives_factor_n() {
        let params = p(1.0 / 2.0_f64.sqrt());
        for (w, k) in [(0.0, 0.45), (0.0, 0.9)] {
            let patch = LatticePatch::axial(3, 3, k, w);
            let z0 = enumerate_z(&patch, &params, None).unwrap();
            for variant in [DefectSide::Over, DefectSide::Under] {
                let loop1 = DefectPath::rectangle(0, 0, 1, 1, variant);
                let z1 = enumerate_z(&patch, &params, Some(&loop1)).unwrap();
                assert!(
                    (z1 - params.n() * z0).norm() / z0.norm() < 1e-12,
                    "w={w} k={k} {variant:?}: z1={z1}, n z0={}",
                    params.n() * z0
                );
                let loop2 = DefectPath::rectangle(0, 0, 2, 2, variant);
                let z2 = enumerate_z(&patch, &params, Some(&loop2)).unwrap();
                assert!((z2 - params.n() * z0).norm() / z0.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn deformation_invariance_without_crossings_and_breaking_with() {
        let params = p(1.0 / 2.0_f64.sqrt());
        let patch = LatticePatch::axial(3, 3, 0.5, 0.0);
        let straight = DefectPath::straight_row(3, 0, DefectSide::Over);
        let detour = DefectPath::row_with_detour(3, 0, 1, DefectSide::Over);
        let res = verify_topological_move(&patch, &params, &straight, &detour).unwrap();
        assert!(res < 1e-12, "residual {res}");
        // with crossings the defect line is pinned
        let patch_w = LatticePatch::axial(3, 3, 0.5, 1.3);
        let res_w = verify_topological_move(&patch_w, &params, &straight, &detour).unwrap();
        assert!(res_w > 1e-6, "residual {res_w}");
    }

    #[test]
    fn spin_e_matrix_is_rank_one_scaled_projector() {
        // n = 2, N = 2: e_0 has trace n and satisfies e² = n e
        let chain = SpinChain::new(2, 2, false).unwrap();
        let e = chain.matrix(SpinOp::E(0));
        let tr: C64 = (0..e.nrows()).map(|i| e[(i, i)]).sum();
        assert!((tr - C64::new(2.0, 0.0)).norm() < 1e-14);
        let e2 = &e * &e;
        assert!((e2 - e.scale(2.0)).norm() < 1e-12);
    }

    #[test]
    fn edge_dependent_k_reduces_to_uniform() {
        let mut patch = LatticePatch::axial(2, 2, 0.37, 0.8);
        let uniform = enumerate_z(&patch, &p(0.9), None).unwrap();
        let mut map = BTreeMap::new();
        for x in 0..2 {
            for y in 0..2 {
                map.insert(EdgeId::Vertical(x, y), 0.37);
                map.insert(EdgeId::Horizontal(x, y), 0.37);
            }
        }
        patch.edge_k = Some(map);
        let per_edge = enumerate_z(&patch, &p(0.9), None).unwrap();
        assert_eq!(uniform, per_edge);
    }
}
