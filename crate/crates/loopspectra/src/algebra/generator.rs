use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use super::link::LinkState;
use super::npoly::NPoly;
use super::symgroup::ThroughPerm;
use super::{AlgebraError, AlgebraFamily, Boundary, LoopParams, Result, Sector};
use crate::C64;

pub(crate) const W_EMPTY: u8 = 0xFF;
const ID_BASE: u8 = 0xD0;

#[inline]
pub(crate) fn is_through_code(b: u8) -> bool {
    (ID_BASE..0xFE).contains(&b) || b == 0xFE
}

/// One of the nine dilute tile generators acting on a pair of adjacent
/// sites. Tiles are occupancy-conditioned partial isometries; their
/// weighted sum (with monomer fugacities) builds the diagonal-geometry
/// transfer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiluteTile {
    /// Both sites empty, nothing happens.
    Vacuum,
    /// Left site occupied and passing straight up, right site empty.
    PassLeft,
    /// Right site occupied and passing straight up, left site empty.
    PassRight,
    /// Both sites occupied, strands joined (cap).
    Annihilate,
    /// Both sites empty, a new arc is created (cup).
    Create,
    /// Strand moves from the left site to the right site.
    MoveRight,
    /// Strand moves from the right site to the left site.
    MoveLeft,
    /// Both sites occupied and passing straight up.
    PassBoth,
    /// Cap followed by cup: the dense Temperley–Lieb move.
    AnnihilateCreate,
}

pub const ALL_TILES: [DiluteTile; 9] = [
    DiluteTile::Vacuum,
    DiluteTile::PassLeft,
    DiluteTile::PassRight,
    DiluteTile::Annihilate,
    DiluteTile::Create,
    DiluteTile::MoveRight,
    DiluteTile::MoveLeft,
    DiluteTile::PassBoth,
    DiluteTile::AnnihilateCreate,
];

/// Generators of the diagram algebras (0-based site indices; `E(i)` and
/// `Pi(i)` act on sites `(i, i+1 mod N)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorId {
    E(usize),
    Tau,
    TauInv,
    Pi(usize),
    Tile(DiluteTile, usize),
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorId::E(i) => write!(f, "e_{i}"),
            GeneratorId::Tau => write!(f, "tau"),
            GeneratorId::TauInv => write!(f, "tau^-1"),
            GeneratorId::Pi(i) => write!(f, "Pi_{i}"),
            GeneratorId::Tile(t, i) => write!(f, "{t:?}_{i}"),
        }
    }
}

/// A basis state together with the through-line permutation it carries
/// (identity for Temperley–Lieb sectors).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabeledState {
    pub state: LinkState,
    pub perm: ThroughPerm,
}

/// A finite map from labeled link states to complex coefficients. Exact
/// retention by default; zero terms are only removed when a caller opts in
/// through [`WeightedStateSum::prune`].
#[derive(Clone, Debug, Default)]
pub struct WeightedStateSum {
    pub terms: BTreeMap<LabeledState, C64>,
}

impl WeightedStateSum {
    pub fn prune(&mut self, eps: f64) {
        self.terms.retain(|_, c| c.norm() > eps);
    }

    pub fn add_term(&mut self, key: LabeledState, coeff: C64) {
        *self.terms.entry(key).or_insert(C64::new(0.0, 0.0)) += coeff;
    }
}

/// Symbolic outcome of a single diagram move: the image state, the induced
/// through-line permutation, the number of closed loops and the net seam
/// crossing exponent of through-lines.
#[derive(Clone, Debug)]
pub(crate) struct RawTerm {
    pub state: LinkState,
    pub perm: ThroughPerm,
    pub loops: u32,
    pub seam_exp: i32,
}

impl RawTerm {
    pub fn coeff(&self, n: C64, twist: C64) -> C64 {
        n.powu(self.loops) * twist.powi(self.seam_exp)
    }
}

/// Mutable working copy of a link state with through-line identities and
/// loop/seam accumulators. All diagram moves are expressed through this
/// type so that loop weights, twist phases and through-line permutations
/// are bookkept in exactly one place.
#[derive(Clone)]
pub(crate) struct WorkState {
    pub slots: Vec<u8>,
    pub loops: u32,
    pub seam_exp: i32,
    n_ids: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum JoinOutcome {
    Ok,
    /// The two contents were through-lines: the move annihilates the state
    /// in a standard module.
    Killed,
    /// A site was empty: the dense diagram does not apply.
    EmptySite,
}

impl WorkState {
    pub fn from_link(state: &LinkState) -> Self {
        let mut slots = Vec::with_capacity(state.n_sites());
        let mut n_ids = 0u8;
        for i in 0..state.n_sites() {
            let b = state.code()[i];
            if b == 0xFE {
                slots.push(ID_BASE + n_ids);
                n_ids += 1;
            } else {
                slots.push(b);
            }
        }
        WorkState { slots, loops: 0, seam_exp: 0, n_ids }
    }

    pub fn n_sites(&self) -> usize {
        self.slots.len()
    }

    fn is_through(&self, i: usize) -> bool {
        is_through_code(self.slots[i])
    }

    fn is_empty(&self, i: usize) -> bool {
        self.slots[i] == W_EMPTY
    }

    pub fn occupied(&self, i: usize) -> bool {
        !self.is_empty(i)
    }

    /// Whether the arc `(a,b)` of the current configuration is drawn across
    /// the seam: with through-lines present it is drawn on its through-free
    /// side; without through-lines the disc convention applies.
    fn arc_wraps(&self, a: usize, b: usize) -> bool {
        let (x, y) = if a < b { (a, b) } else { (b, a) };
        (x + 1..y).any(|i| self.is_through(i))
    }

    /// Seam-crossing exponent for a through-line traversing the arc `(from,
    /// to)` starting at `from`: drawn-across-the-seam arcs contribute
    /// `+1` when walked leftward (ascending site index) and `−1` when
    /// walked rightward.
    fn arc_crossing(&self, from: usize, to: usize) -> i32 {
        if !self.arc_wraps(from, to) {
            return 0;
        }
        if from < to {
            1 // walk left from `from`, wrapping 0 -> N-1
        } else {
            -1
        }
    }

    /// Join the strand contents of sites `a` and `b` with a cap;
    /// `cap_wraps` marks the cap between sites `N-1` and `0` (then `a` must
    /// be `N-1` and `b` must be `0`). Both sites end empty.
    pub fn join(&mut self, a: usize, b: usize, cap_wraps: bool) -> JoinOutcome {
        debug_assert!(!cap_wraps || (a == self.n_sites() - 1 && b == 0));
        let ca = self.slots[a];
        let cb = self.slots[b];
        if ca == W_EMPTY || cb == W_EMPTY {
            return JoinOutcome::EmptySite;
        }
        match (is_through_code(ca), is_through_code(cb)) {
            (true, true) => JoinOutcome::Killed,
            (true, false) => {
                // through at a slides over the cap to b, then along the arc
                let p = cb as usize;
                if cap_wraps {
                    self.seam_exp -= 1; // N-1 -> 0 is a rightward crossing
                }
                self.seam_exp += self.arc_crossing(b, p);
                self.slots[a] = W_EMPTY;
                self.slots[b] = W_EMPTY;
                self.slots[p] = ca;
                JoinOutcome::Ok
            }
            (false, true) => {
                let p = ca as usize;
                if cap_wraps {
                    self.seam_exp += 1; // 0 -> N-1 is a leftward crossing
                }
                self.seam_exp += self.arc_crossing(a, p);
                self.slots[a] = W_EMPTY;
                self.slots[b] = W_EMPTY;
                self.slots[p] = cb;
                JoinOutcome::Ok
            }
            (false, false) => {
                let p = ca as usize;
                let r = cb as usize;
                if p == b {
                    self.loops += 1;
                    self.slots[a] = W_EMPTY;
                    self.slots[b] = W_EMPTY;
                } else {
                    self.slots[a] = W_EMPTY;
                    self.slots[b] = W_EMPTY;
                    self.slots[p] = r as u8;
                    self.slots[r] = p as u8;
                }
                JoinOutcome::Ok
            }
        }
    }

    /// Create a new arc between two empty sites.
    pub fn create_arc(&mut self, a: usize, b: usize) {
        debug_assert!(self.is_empty(a) && self.is_empty(b));
        self.slots[a] = b as u8;
        self.slots[b] = a as u8;
    }

    /// Move the content of site `from` to the empty site `to`, where the
    /// two sites are adjacent (`to = from ± 1 mod N`). `wraps` marks the
    /// move across the seam.
    pub fn move_content(&mut self, from: usize, to: usize, wraps: bool) {
        debug_assert!(self.is_empty(to));
        let c = self.slots[from];
        if wraps && is_through_code(c) {
            // from = N-1, to = 0 is rightward; the reverse leftward
            self.seam_exp += if from > to { -1 } else { 1 };
        }
        if !is_through_code(c) && c != W_EMPTY {
            let p = c as usize;
            self.slots[p] = to as u8;
        }
        self.slots[to] = c;
        self.slots[from] = W_EMPTY;
    }

    /// Cyclic translation by one site to the right (`τ`) or left (`τ⁻¹`).
    pub fn translate(&mut self, right: bool) {
        let n = self.n_sites();
        let mut new = vec![W_EMPTY; n];
        for i in 0..n {
            let j = if right { (i + 1) % n } else { (i + n - 1) % n };
            let c = self.slots[i];
            new[j] = if is_through_code(c) || c == W_EMPTY {
                c
            } else if right {
                ((c as usize + 1) % n) as u8
            } else {
                ((c as usize + n - 1) % n) as u8
            };
        }
        let boundary = if right { n - 1 } else { 0 };
        if self.is_through(boundary) {
            self.seam_exp += if right { -1 } else { 1 };
        }
        self.slots = new;
    }

    /// Swap the contents of adjacent sites `a` and `b` (the Π move).
    pub fn swap(&mut self, a: usize, b: usize) {
        let ca = self.slots[a];
        let cb = self.slots[b];
        if !is_through_code(ca) && ca != W_EMPTY && ca as usize != b {
            self.slots[ca as usize] = b as u8;
        }
        if !is_through_code(cb) && cb != W_EMPTY && cb as usize != a {
            self.slots[cb as usize] = a as u8;
        }
        if ca as usize == b && cb as usize == a {
            // one arc joining a and b: swapping its ends changes nothing
            return;
        }
        self.slots.swap(a, b);
    }

    /// Close into a `RawTerm`, extracting the through-line permutation from
    /// the identity tags.
    pub fn finish(self) -> RawTerm {
        let n = self.n_sites();
        let mut code = Vec::with_capacity(n);
        let mut placed: Vec<(usize, u8)> = Vec::new();
        for (i, &c) in self.slots.iter().enumerate() {
            if is_through_code(c) {
                placed.push((i, c - ID_BASE));
                code.push(0xFE);
            } else {
                code.push(c);
            }
        }
        debug_assert_eq!(placed.len(), self.n_ids as usize);
        let mut images = vec![0u8; placed.len()];
        for (new_rank, &(_, id)) in placed.iter().enumerate() {
            images[id as usize] = new_rank as u8;
        }
        RawTerm {
            state: LinkState::from_code(code),
            perm: ThroughPerm::from_images(images),
            loops: self.loops,
            seam_exp: self.seam_exp,
        }
    }
}

fn pair_indices(i: usize, n: usize, boundary: Boundary) -> Result<(usize, usize, bool)> {
    match boundary {
        Boundary::Open => {
            if i + 1 >= n {
                Err(AlgebraError::IndexOutOfRange { index: i, n_sites: n })
            } else {
                Ok((i, i + 1, false))
            }
        }
        Boundary::Periodic => {
            if i >= n {
                Err(AlgebraError::IndexOutOfRange { index: i, n_sites: n })
            } else if i == n - 1 {
                Ok((n - 1, 0, true))
            } else {
                Ok((i, i + 1, false))
            }
        }
    }
}

/// Apply a single generator to a link state, returning the symbolic terms.
pub(crate) fn apply_raw(
    family: AlgebraFamily,
    gen: GeneratorId,
    state: &LinkState,
) -> Result<Vec<RawTerm>> {
    let n = state.n_sites();
    let mut w = WorkState::from_link(state);
    match gen {
        GeneratorId::E(i) => {
            let (a, b, wraps) = pair_indices(i, n, family.boundary)?;
            match w.join(a, b, wraps) {
                JoinOutcome::Killed | JoinOutcome::EmptySite => Ok(vec![]),
                JoinOutcome::Ok => {
                    w.create_arc(a, b);
                    Ok(vec![w.finish()])
                }
            }
        }
        GeneratorId::Tau | GeneratorId::TauInv => {
            if family.boundary == Boundary::Open {
                return Err(AlgebraError::InvalidGenerator(
                    "tau needs periodic boundary".into(),
                ));
            }
            w.translate(matches!(gen, GeneratorId::Tau));
            Ok(vec![w.finish()])
        }
        GeneratorId::Pi(i) => {
            if !family.allows_crossings() {
                return Err(AlgebraError::InvalidGenerator(
                    "Pi needs a Brauer family".into(),
                ));
            }
            let (a, b, _) = pair_indices(i, n, family.boundary)?;
            w.swap(a, b);
            Ok(vec![w.finish()])
        }
        GeneratorId::Tile(tile, i) => {
            if !family.allows_empty() {
                return Err(AlgebraError::InvalidGenerator(
                    "dilute tiles need a dilute family".into(),
                ));
            }
            let (a, b, wraps) = pair_indices(i, n, family.boundary)?;
            let occ = (w.occupied(a), w.occupied(b));
            use DiluteTile::*;
            let fires = match tile {
                Vacuum => occ == (false, false),
                PassLeft => occ == (true, false),
                PassRight => occ == (false, true),
                Annihilate | PassBoth | AnnihilateCreate => occ == (true, true),
                Create => occ == (false, false),
                MoveRight => occ == (true, false),
                MoveLeft => occ == (false, true),
            };
            if !fires {
                return Ok(vec![]);
            }
            match tile {
                Vacuum | PassLeft | PassRight | PassBoth => Ok(vec![w.finish()]),
                Create => {
                    w.create_arc(a, b);
                    Ok(vec![w.finish()])
                }
                Annihilate => match w.join(a, b, wraps) {
                    JoinOutcome::Killed => Ok(vec![]),
                    _ => Ok(vec![w.finish()]),
                },
                AnnihilateCreate => match w.join(a, b, wraps) {
                    JoinOutcome::Killed => Ok(vec![]),
                    _ => {
                        w.create_arc(a, b);
                        Ok(vec![w.finish()])
                    }
                },
                MoveRight => {
                    w.move_content(a, b, wraps);
                    Ok(vec![w.finish()])
                }
                MoveLeft => {
                    w.move_content(b, a, wraps);
                    Ok(vec![w.finish()])
                }
            }
        }
    }
}

/// Apply a generator with numeric coefficients: every closed contractible
/// loop contributes one factor `n`, and each through-line seam crossing one
/// factor of the sector twist phase (non-contractible loops cannot close
/// inside a standard module; their `z + z⁻¹` weight appears only in the
/// brute-force oracles, where it equals `n` at the default twist).
pub fn apply_generator(
    family: AlgebraFamily,
    sector: &Sector,
    gen: GeneratorId,
    state: &LinkState,
    params: &LoopParams,
) -> Result<WeightedStateSum> {
    let twist = sector.twist_phase();
    let mut out = WeightedStateSum::default();
    for term in apply_raw(family, gen, state)? {
        let coeff = term.coeff(params.n(), twist);
        out.add_term(
            LabeledState { state: term.state, perm: term.perm },
            coeff,
        );
    }
    Ok(out)
}

/// Exact-arithmetic variant: coefficients are polynomials in `n` with
/// rational coefficients. Requires the sector twist to be `±1`.
pub fn apply_generator_exact(
    family: AlgebraFamily,
    sector: &Sector,
    gen: GeneratorId,
    state: &LinkState,
) -> Result<BTreeMap<LabeledState, NPoly>> {
    let twist = sector.twist_phase();
    let sign = if (twist - C64::new(1.0, 0.0)).norm() < 1e-12 {
        1i64
    } else if (twist + C64::new(1.0, 0.0)).norm() < 1e-12 {
        -1i64
    } else {
        return Err(AlgebraError::InvalidParams(
            "exact mode needs a sector twist of +1 or -1".into(),
        ));
    };
    let mut out: BTreeMap<LabeledState, NPoly> = BTreeMap::new();
    for term in apply_raw(family, gen, state)? {
        let s = if sign == -1 && term.seam_exp.rem_euclid(2) == 1 {
            -1
        } else {
            1
        };
        let poly = NPoly::monomial(Ratio::new(s, 1), term.loops as usize);
        let key = LabeledState { state: term.state, perm: term.perm };
        let cur = out.remove(&key).unwrap_or_else(NPoly::zero);
        let sum = cur + poly;
        out.insert(key, sum);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SectorBasis;

    fn n_val() -> LoopParams {
        LoopParams::from_n_real(1.0 / 2.0_f64.sqrt()).unwrap()
    }

    #[test]
    fn loop_closure_gives_one_factor_n() {
        // e_0 on a state where sites 0,1 are joined by an arc -> n x same state
        let fam = AlgebraFamily::dense_periodic();
        let state = LinkState::from_code(vec![1, 0, 3, 2]);
        let out = apply_generator(fam, &Sector::identity(), GeneratorId::E(0), &state, &n_val())
            .unwrap();
        assert_eq!(out.terms.len(), 1);
        let (k, c) = out.terms.iter().next().unwrap();
        assert_eq!(k.state, state);
        assert!((c - n_val().n()).norm() < 1e-15);
    }

    #[test]
    fn through_through_join_annihilates() {
        let fam = AlgebraFamily::dense_periodic();
        let basis = SectorBasis::enumerate(fam, 4, &Sector::tl(4, 0, 1)).unwrap();
        let state = basis.states()[0].clone();
        let out = apply_generator(fam, &Sector::tl(4, 0, 1), GeneratorId::E(1), &state, &n_val())
            .unwrap();
        assert!(out.terms.is_empty());
    }

    #[test]
    fn tau_to_the_n_is_identity_times_total_winding() {
        // On W_{(1, s=1)} (2 through-lines, z = -1), τ^N must act as
        // z^{2r} = 1 on every state.
        let fam = AlgebraFamily::dense_periodic();
        let sector = Sector::tl(2, 1, 1);
        let basis = SectorBasis::enumerate(fam, 4, &sector).unwrap();
        for s in basis.states() {
            let mut sum = WeightedStateSum::default();
            sum.add_term(
                LabeledState { state: s.clone(), perm: ThroughPerm::identity() },
                C64::new(1.0, 0.0),
            );
            for _ in 0..4 {
                let mut next = WeightedStateSum::default();
                for (k, c) in &sum.terms {
                    let step =
                        apply_generator(fam, &sector, GeneratorId::Tau, &k.state, &n_val())
                            .unwrap();
                    for (k2, c2) in step.terms {
                        next.add_term(k2, c2 * c);
                    }
                }
                sum = next;
            }
            assert_eq!(sum.terms.len(), 1);
            let (k, c) = sum.terms.iter().next().unwrap();
            assert_eq!(&k.state, s);
            assert!((c - C64::new(1.0, 0.0)).norm() < 1e-12, "got {c}");
        }
    }

    #[test]
    fn pi_swaps_through_lines_with_a_transposition() {
        let fam = AlgebraFamily::dilute_brauer_periodic();
        let state = LinkState::from_code(vec![0xFE, 0xFE, 0xFF, 0xFF]);
        let out = apply_raw(fam, GeneratorId::Pi(0), &state).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].state, state);
        assert_eq!(out[0].perm, ThroughPerm::from_images(vec![1, 0]));
        // swapping an arc's two ends is the identity
        let arc = LinkState::from_code(vec![1, 0, 0xFF, 0xFF]);
        let out = apply_raw(fam, GeneratorId::Pi(0), &arc).unwrap();
        assert_eq!(out[0].state, arc);
        assert!(out[0].perm.is_identity());
    }

    #[test]
    fn exact_mode_matches_numeric_mode() {
        let fam = AlgebraFamily::dense_periodic();
        let sector = Sector::tl(2, 0, 1);
        let basis = SectorBasis::enumerate(fam, 6, &sector).unwrap();
        let p = n_val();
        for s in basis.states() {
            for i in 0..6 {
                let numeric =
                    apply_generator(fam, &sector, GeneratorId::E(i), s, &p).unwrap();
                let exact =
                    apply_generator_exact(fam, &sector, GeneratorId::E(i), s).unwrap();
                assert_eq!(numeric.terms.len(), exact.len());
                for (k, c) in &numeric.terms {
                    let poly = &exact[k];
                    assert!((c.re - poly.eval(p.n().re)).abs() < 1e-14);
                    assert!(c.im.abs() < 1e-14);
                }
            }
        }
    }
}
