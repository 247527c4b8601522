use serde::{Deserialize, Serialize};
use std::fmt;

const EMPTY: u8 = 0xFF;
const THROUGH: u8 = 0xFE;

/// Content of a single site in a link state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteContent {
    Empty,
    Through,
    /// Paired by an arc with the given site.
    ArcWith(usize),
}

/// A connectivity pattern of `N` sites: arcs (an involution without fixed
/// points on the occupied non-through sites), through-lines, and empty
/// sites. The byte encoding (partner index per site, `0xFE` for a
/// through-line, `0xFF` for empty) is the canonical form used for ordering,
/// hashing and CSV dumps; it is stable across runs and platforms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkState(Vec<u8>);

impl LinkState {
    pub fn from_contents(contents: &[SiteContent]) -> Self {
        let code = contents
            .iter()
            .map(|c| match c {
                SiteContent::Empty => EMPTY,
                SiteContent::Through => THROUGH,
                SiteContent::ArcWith(p) => *p as u8,
            })
            .collect();
        let s = LinkState(code);
        debug_assert!(s.involution_ok(), "arc pairing must be a fixed-point-free involution");
        s
    }

    pub fn from_code(code: Vec<u8>) -> Self {
        let s = LinkState(code);
        debug_assert!(s.involution_ok());
        s
    }

    /// All sites empty (dilute vacuum).
    pub fn vacuum(n_sites: usize) -> Self {
        LinkState(vec![EMPTY; n_sites])
    }

    pub fn n_sites(&self) -> usize {
        self.0.len()
    }

    pub fn code(&self) -> &[u8] {
        &self.0
    }

    /// Canonical textual encoding, e.g. `".(01)|."` style compacted to
    /// per-site tokens; used in basis CSV dumps.
    pub fn encoding(&self) -> String {
        self.0
            .iter()
            .map(|&b| match b {
                EMPTY => ".".to_string(),
                THROUGH => "|".to_string(),
                p => format!("{p}"),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn content(&self, i: usize) -> SiteContent {
        match self.0[i] {
            EMPTY => SiteContent::Empty,
            THROUGH => SiteContent::Through,
            p => SiteContent::ArcWith(p as usize),
        }
    }

    pub fn is_empty_site(&self, i: usize) -> bool {
        self.0[i] == EMPTY
    }

    pub fn is_through(&self, i: usize) -> bool {
        self.0[i] == THROUGH
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        match self.0[i] {
            EMPTY | THROUGH => None,
            p => Some(p as usize),
        }
    }

    pub fn through_positions(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&i| self.is_through(i)).collect()
    }

    pub fn through_count(&self) -> usize {
        self.0.iter().filter(|&&b| b == THROUGH).count()
    }

    pub fn occupied_positions(&self) -> Vec<usize> {
        (0..self.n_sites()).filter(|&i| !self.is_empty_site(i)).collect()
    }

    fn involution_ok(&self) -> bool {
        (0..self.n_sites()).all(|i| match self.partner(i) {
            None => true,
            Some(p) => p != i && p < self.n_sites() && self.partner(p) == Some(i),
        })
    }

    /// Whether the arc `(a, b)` is drawn across the marked seam (between
    /// site `N-1` and site `0`). Arcs are drawn on their through-free side;
    /// with no through-lines the disc convention applies and no arc crosses
    /// the seam.
    pub fn arc_spans_seam(&self, a: usize, b: usize) -> bool {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if self.through_count() == 0 {
            return false;
        }
        // interior side a+1..b-1
        let interior_has_through = (a + 1..b).any(|i| self.is_through(i));
        interior_has_through
    }

    /// Planarity for Temperley–Lieb families.
    ///
    /// Open boundary: arcs must be non-crossing in the linear order and no
    /// through-line may sit under an arc. Periodic: every arc needs a
    /// through-free side (it is drawn there), and the drawn arcs must be
    /// pairwise non-crossing on the annulus; with no through-lines this is
    /// chord non-crossingness on the disc.
    pub fn tl_valid(&self, periodic: bool) -> bool {
        let n = self.n_sites();
        let mut arcs = Vec::new();
        for i in 0..n {
            if let Some(p) = self.partner(i) {
                if p > i {
                    arcs.push((i, p));
                }
            }
        }
        let throughs = self.through_positions();
        if !periodic || throughs.is_empty() {
            // Disc / line geometry: chords cross iff endpoints interleave.
            for (k, &(a, b)) in arcs.iter().enumerate() {
                for &(c, d) in &arcs[k + 1..] {
                    let c_in = a < c && c < b;
                    let d_in = a < d && d < b;
                    if c_in != d_in {
                        return false;
                    }
                }
                if !periodic {
                    // no through-line strictly inside an arc on the strip
                    if throughs.iter().any(|&t| a < t && t < b) {
                        return false;
                    }
                }
            }
            return true;
        }
        // Periodic with through-lines: each arc must have a through-free side.
        // Represent each arc by the set of interior sites on that side and
        // require pairwise nesting/disjointness.
        let mut spans: Vec<Vec<usize>> = Vec::with_capacity(arcs.len());
        for &(a, b) in &arcs {
            let inner: Vec<usize> = (a + 1..b).collect();
            let outer: Vec<usize> = (b + 1..n).chain(0..a).collect();
            let inner_free = !inner.iter().any(|&i| self.is_through(i));
            let outer_free = !outer.iter().any(|&i| self.is_through(i));
            if inner_free {
                spans.push(inner);
            } else if outer_free {
                spans.push(outer);
            } else {
                return false;
            }
        }
        for (k, &(a, b)) in arcs.iter().enumerate() {
            for (j, &(c, d)) in arcs.iter().enumerate() {
                if j <= k {
                    continue;
                }
                let in_span_k = spans[k].contains(&c) as u8 + spans[k].contains(&d) as u8;
                let in_span_j = spans[j].contains(&a) as u8 + spans[j].contains(&b) as u8;
                // crossing = exactly one endpoint of one arc inside the other's span
                if in_span_k == 1 || in_span_j == 1 {
                    return false;
                }
            }
        }
        true
    }

    pub fn set(&mut self, i: usize, content: SiteContent) {
        self.0[i] = match content {
            SiteContent::Empty => EMPTY,
            SiteContent::Through => THROUGH,
            SiteContent::ArcWith(p) => p as u8,
        };
    }

    /// Make `a` and `b` partners of one arc.
    pub fn link(&mut self, a: usize, b: usize) {
        self.0[a] = b as u8;
        self.0[b] = a as u8;
    }
}

impl fmt::Debug for LinkState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinkState({})", self.encoding())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planarity_checks() {
        // (0,1)(2,3) non-crossing; (0,2)(1,3) crossing
        let good = LinkState::from_code(vec![1, 0, 3, 2]);
        let bad = LinkState::from_code(vec![2, 3, 0, 1]);
        assert!(good.tl_valid(true));
        assert!(good.tl_valid(false));
        assert!(!bad.tl_valid(true));
        assert!(!bad.tl_valid(false));
    }

    #[test]
    fn through_free_side_rule() {
        // N=4, throughs at 1,2, arc (0,3): inner side {1,2} blocked, outer
        // side (wrapping the seam) free -> valid, and the arc spans the seam.
        let s = LinkState::from_code(vec![3, THROUGH, THROUGH, 0]);
        assert!(s.tl_valid(true));
        assert!(s.arc_spans_seam(0, 3));
        // N=4, throughs at 0 and 2, arc (1,3): both sides blocked -> invalid.
        let s2 = LinkState::from_code(vec![THROUGH, 3, THROUGH, 1]);
        assert!(!s2.tl_valid(true));
        // open boundary: a through under an arc is invalid
        let s3 = LinkState::from_code(vec![2, THROUGH, 0, THROUGH]);
        assert!(!s3.tl_valid(false));
    }
}
