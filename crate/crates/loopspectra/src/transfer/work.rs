//! Shared frontier work-state for tile sweeps.
//!
//! A frontier is a pairing over "slots": the `N` site positions (holding the
//! not-yet-consumed bottom content or the already-emitted top content), plus
//! an auxiliary horizontal edge, a seam token, and — for torus traces — a
//! passive copy of the bottom boundary. Each strand end optionally carries
//! a signed seam-winding `ω` (crossings of the marked seam when the strand
//! is traversed from this end to its partner: leftward crossings count +1),
//! and through-lines carry identity tags for permutation extraction.

use crate::algebra::{LinkState, ThroughPerm};

pub(crate) const W_EMPTY: u8 = 0xFF;
const ID_BASE: u8 = 0xD0;

#[inline]
pub(crate) fn is_through(code: u8) -> bool {
    (ID_BASE..W_EMPTY).contains(&code)
}

/// Outcome bookkeeping of a sequence of frontier operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) struct Tally {
    /// Closed loops with zero net winding (weight `n`).
    pub loops: u16,
    /// Closed loops with nonzero net winding (still weight `n`: the model
    /// gives every loop the fugacity `n` at the default twist; sectors that
    /// track windings can never close such a loop).
    pub wound_loops: u16,
    /// Net seam-crossing exponent accumulated by through-line moves.
    pub seam_exp: i16,
    /// Set when two through-lines were joined (annihilates the state).
    pub killed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ExtWork {
    pub slots: Vec<u8>,
    /// `omega[s]` = seam winding from end `s` towards its partner; only
    /// meaningful when `track_winding` and the slot holds a partner pointer.
    pub omega: Vec<i8>,
    pub track_winding: bool,
}

impl ExtWork {
    pub fn empty(n_slots: usize, track_winding: bool) -> Self {
        ExtWork {
            slots: vec![W_EMPTY; n_slots],
            omega: vec![0; n_slots],
            track_winding,
        }
    }

    /// Initialize slots `0..N-1` from a link state (through-lines tagged in
    /// position order when `with_ids`); arc windings derived from the seam
    /// spans of the state's embedding.
    pub fn load_state(&mut self, state: &LinkState, with_ids: bool) {
        let mut next_id = 0u8;
        for i in 0..state.n_sites() {
            let c = state.code()[i];
            self.slots[i] = if c == 0xFE {
                let tag = ID_BASE + if with_ids { next_id } else { 0 };
                next_id += 1;
                tag
            } else {
                c
            };
        }
        if self.track_winding {
            for a in 0..state.n_sites() {
                if let Some(b) = state.partner(a) {
                    if b > a {
                        let w = if state.arc_spans_seam(a, b) { 1 } else { 0 };
                        self.omega[a] = w;
                        self.omega[b] = -w;
                    }
                }
            }
        }
    }

    #[inline]
    pub fn occupied(&self, s: usize) -> bool {
        self.slots[s] != W_EMPTY
    }

    #[inline]
    pub fn is_through_slot(&self, s: usize) -> bool {
        is_through(self.slots[s])
    }

    /// Move the strand end at `from` to the empty slot `to` (no seam
    /// crossing: the move is within the row).
    pub fn move_endpoint(&mut self, from: usize, to: usize) {
        debug_assert!(self.occupied(from) && !self.occupied(to));
        let c = self.slots[from];
        if !is_through(c) {
            let p = c as usize;
            self.slots[p] = to as u8;
        }
        self.slots[to] = c;
        self.omega[to] = self.omega[from];
        self.slots[from] = W_EMPTY;
        self.omega[from] = 0;
    }

    /// Join the strand ends at `a` and `b` through a connector whose seam
    /// winding, traversed from `a` to `b`, is `ext`. Both slots end empty.
    pub fn join(&mut self, a: usize, b: usize, ext: i32, tally: &mut Tally) {
        debug_assert!(self.occupied(a) && self.occupied(b));
        let ca = self.slots[a];
        let cb = self.slots[b];
        let (wa, wb) = (self.omega[a] as i32, self.omega[b] as i32);
        self.slots[a] = W_EMPTY;
        self.slots[b] = W_EMPTY;
        self.omega[a] = 0;
        self.omega[b] = 0;
        match (is_through(ca), is_through(cb)) {
            (true, true) => tally.killed = true,
            (true, false) => {
                // through at a slides over the connector and along b's strand
                let p = cb as usize;
                tally.seam_exp += (ext + wb) as i16;
                self.slots[p] = ca;
                self.omega[p] = 0;
            }
            (false, true) => {
                let p = ca as usize;
                tally.seam_exp += (-ext + wa) as i16;
                self.slots[p] = cb;
                self.omega[p] = 0;
            }
            (false, false) => {
                let p = ca as usize;
                let r = cb as usize;
                if p == b {
                    // closing a loop: net winding along strand a→b minus the
                    // connector traversed b→a
                    let net = wa - ext;
                    if net == 0 || !self.track_winding {
                        if net == 0 {
                            tally.loops += 1;
                        } else {
                            tally.wound_loops += 1;
                        }
                    } else {
                        debug_assert!(false, "wound loop in a winding-tracked sector");
                        tally.wound_loops += 1;
                    }
                } else {
                    // new strand p—r: ω(p→r) = ω(p→a) + ext + ω(b→r)
                    let w = -wa + ext + wb;
                    self.slots[p] = r as u8;
                    self.slots[r] = p as u8;
                    self.omega[p] = w as i8;
                    self.omega[r] = -w as i8;
                }
            }
        }
    }

    /// Create a new arc between two empty slots with winding `ω(a→b)`.
    pub fn link_new(&mut self, a: usize, b: usize, omega_a_to_b: i32) {
        debug_assert!(!self.occupied(a) && !self.occupied(b));
        self.slots[a] = b as u8;
        self.slots[b] = a as u8;
        self.omega[a] = omega_a_to_b as i8;
        self.omega[b] = -omega_a_to_b as i8;
    }

    /// Swap the contents of two slots (the close-contact tile).
    pub fn swap(&mut self, a: usize, b: usize) {
        let ca = self.slots[a];
        let cb = self.slots[b];
        if ca as usize == b && cb as usize == a {
            return; // one arc joining a and b
        }
        if !is_through(ca) && ca != W_EMPTY {
            self.slots[ca as usize] = b as u8;
        }
        if !is_through(cb) && cb != W_EMPTY {
            self.slots[cb as usize] = a as u8;
        }
        self.slots.swap(a, b);
        self.omega.swap(a, b);
    }

    /// Canonical byte encoding for interning.
    pub fn encode(&self) -> Vec<u8> {
        if self.track_winding {
            let mut out = Vec::with_capacity(2 * self.slots.len());
            out.extend_from_slice(&self.slots);
            out.extend(self.omega.iter().map(|&w| (w + 8) as u8));
            out
        } else {
            self.slots.clone()
        }
    }

    /// Extract the first `n_sites` slots as a link state plus the
    /// through-line permutation (old rank → new rank). Without identity
    /// tags (all tags equal) the permutation is reported as the identity.
    pub fn extract_state(&self, n_sites: usize) -> (LinkState, ThroughPerm) {
        let mut code = Vec::with_capacity(n_sites);
        let mut placed: Vec<u8> = Vec::new();
        for s in 0..n_sites {
            let c = self.slots[s];
            if is_through(c) {
                placed.push(c - ID_BASE);
                code.push(0xFE);
            } else {
                debug_assert!(
                    c == W_EMPTY || (c as usize) < n_sites,
                    "dangling pointer out of the site range"
                );
                code.push(c);
            }
        }
        let tagged = placed.len() < 2 || placed.iter().any(|&id| id != placed[0]);
        let perm = if tagged {
            let mut images = vec![0u8; placed.len()];
            for (new_rank, &id) in placed.iter().enumerate() {
                images[id as usize] = new_rank as u8;
            }
            ThroughPerm::from_images(images)
        } else {
            ThroughPerm::identity()
        };
        (LinkState::from_code(code), perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SiteContent;

    #[test]
    fn join_closes_loops_and_slides_throughs() {
        // arc (0,1): joining its ends closes a loop
        let state = LinkState::from_contents(&[SiteContent::ArcWith(1), SiteContent::ArcWith(0)]);
        let mut w = ExtWork::empty(4, true);
        w.load_state(&state, false);
        let mut tally = Tally::default();
        w.join(0, 1, 0, &mut tally);
        assert_eq!(tally.loops, 1);
        assert!(!tally.killed);

        // through at 0, arc (1,2): join(0,1) slides the through to 2
        let state = LinkState::from_contents(&[
            SiteContent::Through,
            SiteContent::ArcWith(2),
            SiteContent::ArcWith(1),
        ]);
        let mut w = ExtWork::empty(5, true);
        w.load_state(&state, true);
        let mut tally = Tally::default();
        w.join(0, 1, 0, &mut tally);
        assert!(w.is_through_slot(2));
        assert_eq!(tally.seam_exp, 0);
    }

    #[test]
    fn winding_accumulates_through_connectors() {
        // through at TOKEN-side and an arc with ω: the slide picks up both
        let mut w = ExtWork::empty(4, true);
        w.slots[0] = ID_BASE; // through at slot 0
        w.link_new(1, 2, 1); // arc with ω(1→2) = +1
        let mut tally = Tally::default();
        // connector 0→1 crossing the seam rightward (ext = −1)
        w.join(0, 1, -1, &mut tally);
        assert!(w.is_through_slot(2));
        assert_eq!(tally.seam_exp, 0); // −1 + 1 = 0
    }
}
