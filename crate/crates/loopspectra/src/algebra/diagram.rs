use std::collections::BTreeMap;

use crate::C64;

use super::link::LinkState;
use super::LoopParams;

/// An open Temperley–Lieb diagram on `m` strands: a non-crossing perfect
/// matching of the `2m` points `0..m-1` (bottom) and `m..2m-1` (top).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TlDiagram {
    m: usize,
    pairs: Vec<u8>,
}

impl TlDiagram {
    pub fn identity(m: usize) -> Self {
        let mut pairs = vec![0u8; 2 * m];
        for i in 0..m {
            pairs[i] = (m + i) as u8;
            pairs[m + i] = i as u8;
        }
        TlDiagram { m, pairs }
    }

    /// The cup-cap generator joining bottom `(i, i+1)` and top `(i, i+1)`.
    pub fn e(m: usize, i: usize) -> Self {
        let mut d = Self::identity(m);
        d.pairs[i] = (i + 1) as u8;
        d.pairs[i + 1] = i as u8;
        d.pairs[m + i] = (m + i + 1) as u8;
        d.pairs[m + i + 1] = (m + i) as u8;
        TlDiagram { m, pairs: d.pairs }
    }

    fn partner(&self, p: usize) -> usize {
        self.pairs[p] as usize
    }

    /// Composition `self ∘ other` (apply `other` first): `other`'s top row
    /// is glued to `self`'s bottom row. Returns the composed diagram and
    /// the number of loops closed in the middle layer.
    pub fn compose(&self, other: &TlDiagram) -> (TlDiagram, u32) {
        let m = self.m;
        assert_eq!(m, other.m);
        // Result bottom = other's bottom (0..m-1); result top = self's top
        // (m..2m-1). Walks alternate between the two diagrams through the
        // middle layer (other's top i+m ≡ self's bottom i = "strand i").
        let mut pairs = vec![0u8; 2 * m];
        let mut mid_visited = vec![false; m];
        let walk = |in_other0: bool, p0: usize, mid_visited: &mut Vec<bool>| -> usize {
            let (mut in_other, mut p) = (in_other0, p0);
            loop {
                let q = if in_other { other.partner(p) } else { self.partner(p) };
                if in_other {
                    if q < m {
                        return q; // other's bottom: outer
                    }
                    mid_visited[q - m] = true;
                    in_other = false;
                    p = q - m;
                } else {
                    if q >= m {
                        return q; // self's top: outer (already in m..2m-1)
                    }
                    mid_visited[q] = true;
                    in_other = true;
                    p = m + q;
                }
            }
        };
        for i in 0..m {
            pairs[i] = walk(true, i, &mut mid_visited) as u8;
            pairs[m + i] = walk(false, m + i, &mut mid_visited) as u8;
        }
        // loops: middle cycles never reaching an outer point
        let mut loops = 0u32;
        for s in 0..m {
            if mid_visited[s] {
                continue;
            }
            loops += 1;
            let (mut in_other, mut p) = (false, s); // enter self at bottom s
            loop {
                let q = if in_other { other.partner(p) } else { self.partner(p) };
                let mid = if in_other { q - m } else { q };
                mid_visited[mid] = true;
                if in_other {
                    in_other = false;
                    p = q - m;
                } else {
                    in_other = true;
                    p = m + q;
                }
                if !in_other && p == s {
                    break;
                }
            }
        }
        (TlDiagram { m, pairs }, loops)
    }

    /// Close the last strand: connect top `m-1` to bottom `m-1` around the
    /// right edge. Returns the diagram on `m-1` strands and the loop count
    /// (0 or 1).
    pub fn partial_close_last(&self) -> (TlDiagram, u32) {
        let m = self.m;
        let bot = m - 1;
        let top = 2 * m - 1;
        let pb = self.partner(bot);
        let pt = self.partner(top);
        let mut loops = 0;
        let mut conn: Vec<(usize, usize)> = Vec::new();
        if pb == top {
            loops = 1;
        } else {
            conn.push((pb, pt));
        }
        // re-index: drop points bot and top; old index -> new index
        let reindex = |p: usize| -> usize {
            if p < bot {
                p
            } else {
                p - 1 // skip bottom m-1; top points shift down by one
            }
        };
        let mut pairs = vec![0u8; 2 * (m - 1)];
        let mut assigned = vec![false; 2 * (m - 1)];
        for p in 0..2 * m {
            if p == bot || p == top {
                continue;
            }
            let q = self.partner(p);
            if q == bot || q == top {
                continue; // handled by conn
            }
            pairs[reindex(p)] = reindex(q) as u8;
            assigned[reindex(p)] = true;
        }
        for (a, b) in conn {
            pairs[reindex(a)] = reindex(b) as u8;
            pairs[reindex(b)] = reindex(a) as u8;
            assigned[reindex(a)] = true;
            assigned[reindex(b)] = true;
        }
        debug_assert!(assigned.iter().all(|&x| x));
        (TlDiagram { m: m - 1, pairs }, loops)
    }

    /// Apply the diagram to an open-chain link state (no seam, no twist).
    /// Returns `None` when two through-lines are contracted, otherwise the
    /// image state and the number of closed loops.
    pub fn apply_to_state(&self, state: &LinkState) -> Option<(LinkState, u32)> {
        let m = self.m;
        assert_eq!(m, state.n_sites());
        let mut out = LinkState::vacuum(m);
        let mut visited_state = vec![false; m];
        // walk from a top point down through (diagram bottom <-> state)
        for t in 0..m {
            let top_point = m + t;
            if !out.is_empty_site(t) {
                continue;
            }
            let mut q = self.partner(top_point);
            if q >= m {
                // arc between two top points: output arc
                out.link(t, q - m);
                continue;
            }
            // descend into the state
            loop {
                visited_state[q] = true;
                if state.is_through(q) {
                    out.set(t, super::link::SiteContent::Through);
                    break;
                }
                match state.partner(q) {
                    None => return None, // empty site under a strand: occupancy mismatch
                    Some(j) => {
                        visited_state[j] = true;
                        let up = self.partner(j);
                        if up >= m {
                            out.link(t, up - m);
                            break;
                        }
                        q = up;
                    }
                }
            }
        }
        // through-through contractions: a state through whose walk upward
        // ends at another through
        let mut loops = 0u32;
        let mut seen = vec![false; m];
        for s in 0..m {
            if seen[s] || visited_state[s] {
                continue;
            }
            if state.is_through(s) {
                // this through was never reached from a top point: it must
                // have been routed into another through -> annihilated
                return None;
            }
            // closed loop through the state arcs and diagram bottom arcs
            loops += 1;
            let mut cur = s;
            loop {
                seen[cur] = true;
                let j = state.partner(cur).expect("walk stays on arcs");
                seen[j] = true;
                let up = self.partner(j);
                debug_assert!(up < m, "loop walk must stay in the bottom layer");
                if up == s {
                    break;
                }
                cur = up;
            }
        }
        Some((out, loops))
    }
}

/// A linear combination of open TL diagrams with complex coefficients,
/// with loop factors evaluated at the given fugacity as they close.
#[derive(Clone, Debug)]
pub struct TlElement {
    pub m: usize,
    pub terms: BTreeMap<TlDiagram, C64>,
}

impl TlElement {
    pub fn identity(m: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(TlDiagram::identity(m), C64::new(1.0, 0.0));
        TlElement { m, terms }
    }

    /// Left-multiply by `a + b·e_i`.
    pub fn left_mul_affine_e(&mut self, i: usize, a: C64, b: C64, n: C64) {
        let e = TlDiagram::e(self.m, i);
        let mut out: BTreeMap<TlDiagram, C64> = BTreeMap::new();
        for (d, c) in &self.terms {
            *out.entry(d.clone()).or_insert(C64::new(0.0, 0.0)) += a * c;
            let (ed, loops) = e.compose(d);
            *out.entry(ed).or_insert(C64::new(0.0, 0.0)) += b * c * n.powu(loops);
        }
        self.terms = out;
    }

    /// Left-multiply by a general element.
    pub fn left_mul(&mut self, other: &TlElement, n: C64) {
        let mut out: BTreeMap<TlDiagram, C64> = BTreeMap::new();
        for (d2, c2) in &other.terms {
            for (d1, c1) in &self.terms {
                let (d, loops) = d2.compose(d1);
                *out.entry(d).or_insert(C64::new(0.0, 0.0)) += c1 * c2 * n.powu(loops);
            }
        }
        self.terms = out;
    }

    /// Partial Markov trace over the last strand.
    pub fn partial_close_last(&self, n: C64) -> TlElement {
        let mut out: BTreeMap<TlDiagram, C64> = BTreeMap::new();
        for (d, c) in &self.terms {
            let (cd, loops) = d.partial_close_last();
            *out.entry(cd).or_insert(C64::new(0.0, 0.0)) += c * n.powu(loops);
        }
        TlElement { m: self.m - 1, terms: out }
    }
}

/// The braiding factor `g_i = (−q)^{1/2} + (−q)^{−1/2} e_i` as an element.
pub fn braid_factor(m: usize, i: usize, params: &LoopParams, inverse: bool) -> TlElement {
    let s = params.sqrt_minus_q();
    let (a, b) = if inverse { (s.inv(), s) } else { (s, s.inv()) };
    let mut el = TlElement::identity(m);
    el.left_mul_affine_e(i, a, b, params.n());
    el
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LoopParams;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn diagram_composition_and_loops() {
        // e_0 ∘ e_0 = loop × e_0
        let e = TlDiagram::e(2, 0);
        let (d, loops) = e.compose(&e);
        assert_eq!(d, e);
        assert_eq!(loops, 1);
        // e_0 e_1 e_0 = e_0 in TL_3
        let e0 = TlDiagram::e(3, 0);
        let e1 = TlDiagram::e(3, 1);
        let (d01, l1) = e0.compose(&e1);
        let (d010, l2) = d01.compose(&e0);
        assert_eq!(d010, e0);
        assert_eq!(l1 + l2, 0);
    }

    #[test]
    fn reidemeister_two_on_two_strands() {
        // over followed by under is the identity: g ḡ = 1
        let p = LoopParams::from_n_real(1.0 / 2.0_f64.sqrt()).unwrap();
        let mut el = braid_factor(2, 0, &p, true);
        let g = braid_factor(2, 0, &p, false);
        el.left_mul(&g, p.n());
        let id = TlDiagram::identity(2);
        for (d, c) in &el.terms {
            if *d == id {
                assert!(close(*c, C64::new(1.0, 0.0)), "identity coeff {c}");
            } else {
                assert!(c.norm() < 1e-12, "residual diagram {d:?} with {c}");
            }
        }
    }

    #[test]
    fn partial_closure_of_identity_gives_loop() {
        let id = TlDiagram::identity(3);
        let (d, loops) = id.partial_close_last();
        assert_eq!(loops, 1);
        assert_eq!(d, TlDiagram::identity(2));
        // closing e_1 of TL_3 splices into the identity on 2 strands
        let e1 = TlDiagram::e(3, 1);
        let (d2, loops2) = e1.partial_close_last();
        assert_eq!(loops2, 0);
        assert_eq!(d2, TlDiagram::identity(2));
    }

    #[test]
    fn diagram_action_on_link_states() {
        use crate::algebra::SiteContent;
        // e_0 on the two-through state of TL_2 kills it
        let through2 =
            LinkState::from_contents(&[SiteContent::Through, SiteContent::Through]);
        assert!(TlDiagram::e(2, 0).apply_to_state(&through2).is_none());
        // e_0 on the arc state closes one loop
        let arc = LinkState::from_contents(&[SiteContent::ArcWith(1), SiteContent::ArcWith(0)]);
        let (img, loops) = TlDiagram::e(2, 0).apply_to_state(&arc).unwrap();
        assert_eq!(img, arc);
        assert_eq!(loops, 1);
    }
}
