//! Vertex penalties and availability for dynamic local search.
//!
//! Penalties steer the search away from vertices that keep appearing in
//! cliques at perturbation time. Every round the members of the current
//! clique are incremented; every `pd`-th round all positive penalties
//! decay by one, so with `pd = 1` penalties stay identically zero and
//! selection degenerates to uniform choice. Selection ignores vertices
//! whose penalty exceeds a fixed cap, and a vertex that has been selected
//! becomes unavailable until the availability is cleared (after the next
//! perturbation).

use rand::Rng;

use crate::vertex_set::IndexedVertexSet;

/// Vertices with a penalty above this value are invisible to
/// [`PenaltyState::select_min_penalty`]. Stored penalties may still
/// exceed it; the cap filters selection only.
pub const PENALTY_CAP: u32 = 10;

#[derive(Debug, Clone)]
pub struct PenaltyState {
    penalties: Vec<u32>,
    available: Vec<bool>,
    update_cycles: u64,
    pd: u32,
}

impl PenaltyState {
    /// Fresh state: all penalties zero, every vertex available.
    ///
    /// # Panics
    ///
    /// Panics if `pd == 0`.
    pub fn new(n: usize, pd: u32) -> PenaltyState {
        assert!(pd >= 1, "penalty delay must be at least 1");
        PenaltyState { penalties: vec![0; n], available: vec![true; n], update_cycles: 0, pd }
    }

    #[inline]
    pub fn penalty(&self, v: u32) -> u32 {
        self.penalties[v as usize]
    }

    #[inline]
    pub fn is_available(&self, v: u32) -> bool {
        self.available[v as usize]
    }

    #[inline]
    pub fn pd(&self) -> u32 {
        self.pd
    }

    /// Number of completed penalty-update rounds.
    #[inline]
    pub fn update_cycles(&self) -> u64 {
        self.update_cycles
    }

    /// Number of vertices with a positive penalty.
    pub fn penalized_count(&self) -> usize {
        self.penalties.iter().filter(|&&p| p > 0).count()
    }

    /// Selects a uniformly random vertex among the candidates of minimum
    /// penalty, skipping unavailable vertices and those over the cap.
    /// The selected vertex is marked unavailable. Returns `None` when
    /// every candidate is filtered out.
    ///
    /// The scan is a single pass with reservoir tie-breaking, so ties are
    /// uniform without a second pass.
    pub fn select_min_penalty<R: Rng + ?Sized>(
        &mut self,
        candidates: &IndexedVertexSet,
        rng: &mut R,
    ) -> Option<u32> {
        let mut best: Option<u32> = None;
        let mut best_penalty = 0u32;
        let mut ties = 0u64;
        for &v in candidates.as_slice() {
            if !self.available[v as usize] {
                continue;
            }
            let p = self.penalties[v as usize];
            if p > PENALTY_CAP {
                continue;
            }
            if best.is_none() || p < best_penalty {
                best = Some(v);
                best_penalty = p;
                ties = 1;
            } else if p == best_penalty {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best = Some(v);
                }
            }
        }
        if let Some(v) = best {
            self.available[v as usize] = false;
        }
        best
    }

    /// One penalty-update round: increment every clique member, then, on
    /// every `pd`-th round, decrement all positive penalties. The
    /// increment lands before the conditional decrement, so with
    /// `pd = 1` a zero penalty goes 0 -> 1 -> 0 and stays zero.
    pub fn update_penalties(&mut self, clique_members: &[u32]) {
        self.update_cycles += 1;
        for &v in clique_members {
            self.penalties[v as usize] += 1;
        }
        if self.update_cycles.is_multiple_of(self.pd as u64) {
            for p in &mut self.penalties {
                *p = p.saturating_sub(1);
            }
        }
    }

    /// Makes every vertex available again (called after each
    /// perturbation).
    pub fn clear_availability(&mut self) {
        self.available.fill(true);
    }
}
