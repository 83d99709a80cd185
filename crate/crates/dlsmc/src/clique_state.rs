//! Incremental search state: the current clique `C`, per-vertex counts
//! `|N(v) ∩ C|`, and the two derived neighbourhood sets that drive the
//! search:
//!
//! * the improving set `N_I = {v ∉ C : |N(v) ∩ C| = |C|}` — vertices
//!   adjacent to every member, each a legal expansion;
//! * the level set `N_L = {v ∉ C : |N(v) ∩ C| = |C| - 1}` — vertices
//!   adjacent to all but one member, each a legal one-for-one swap.
//!
//! `add_vertex` and `swap_in` maintain the counts in O(deg) and refresh
//! set membership over the only vertices whose status can change: the
//! old members of `N_I` and `N_L`, the neighbours of the touched
//! vertices, and the swapped-out vertex. A vertex outside that union
//! cannot gain membership, because a non-member's count only rises when
//! it is adjacent to a vertex that entered `C`.

use thiserror::Error;

use crate::graph::Graph;
use crate::vertex_set::IndexedVertexSet;

#[derive(Debug, Error)]
pub enum CliqueStateError {
    #[error("vertex {v} out of range")]
    OutOfRange { v: u32 },
    #[error("vertex {v} repeated")]
    Duplicate { v: u32 },
    #[error("vertices {u} and {v} are not adjacent")]
    NotAClique { u: u32, v: u32 },
}

#[derive(Debug, Clone)]
pub struct CliqueState<'g> {
    graph: &'g Graph,
    clique: IndexedVertexSet,
    adj_count: Vec<u32>,
    improving: IndexedVertexSet,
    level: IndexedVertexSet,
}

impl<'g> CliqueState<'g> {
    /// State with an empty clique: every count is zero, so `N_I` is all
    /// of `V` and `N_L` is empty.
    pub fn new(graph: &'g Graph) -> CliqueState<'g> {
        let n = graph.n();
        let mut improving = IndexedVertexSet::new(n);
        for v in 0..n as u32 {
            improving.add(v);
        }
        CliqueState {
            graph,
            clique: IndexedVertexSet::new(n),
            adj_count: vec![0; n],
            improving,
            level: IndexedVertexSet::new(n),
        }
    }

    #[inline]
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.clique.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.clique.is_empty()
    }

    #[inline]
    pub fn members(&self) -> &[u32] {
        self.clique.as_slice()
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.clique.contains(v)
    }

    #[inline]
    pub fn adj_count(&self, v: u32) -> u32 {
        self.adj_count[v as usize]
    }

    #[inline]
    pub fn improving(&self) -> &IndexedVertexSet {
        &self.improving
    }

    #[inline]
    pub fn level(&self) -> &IndexedVertexSet {
        &self.level
    }

    /// Restarts from the singleton clique `{v}`.
    ///
    /// # Panics
    ///
    /// Panics if `v` is out of range.
    pub fn reset_to(&mut self, v: u32) {
        assert!((v as usize) < self.graph.n(), "vertex out of range");
        self.clique.clear();
        self.clique.add(v);
        self.recompute();
    }

    /// Replaces the clique wholesale, verifying the input first. The
    /// state is untouched on error.
    pub fn restore_to(&mut self, members: &[u32]) -> Result<(), CliqueStateError> {
        let n = self.graph.n();
        for (i, &v) in members.iter().enumerate() {
            if v as usize >= n {
                return Err(CliqueStateError::OutOfRange { v });
            }
            for &u in &members[..i] {
                if u == v {
                    return Err(CliqueStateError::Duplicate { v });
                }
                if !self.graph.is_edge(u, v) {
                    return Err(CliqueStateError::NotAClique { u, v });
                }
            }
        }
        self.clique.clear();
        for &v in members {
            self.clique.add(v);
        }
        self.recompute();
        Ok(())
    }

    /// Adds a vertex of the improving set to the clique in
    /// O(deg(v) + |N_I| + |N_L|).
    ///
    /// # Panics
    ///
    /// Panics if `v` is not in the improving set.
    pub fn add_vertex(&mut self, v: u32) {
        assert!(self.improving.contains(v), "vertex {v} not in the improving set");
        debug_assert!(self.clique.iter().all(|u| self.graph.is_edge(u, v)));
        self.improving.remove(v);
        self.clique.add(v);
        for &w in self.graph.neighbors(v) {
            self.adj_count[w as usize] += 1;
        }
        // Former improving members now sit at count k or k-1; former
        // level members at k-1 or k-2. No vertex outside the two sets
        // can reach k-1, since only neighbours of v gained a count and
        // they started at most k-2 (else they would have been in a set).
        let k = self.clique.len() as u32;
        self.sweep_improving(k);
        self.sweep_level(k);
    }

    /// Swaps `v` (from the level set) into the clique and returns the
    /// unique member it is not adjacent to, which leaves the clique.
    /// O(deg(v) + deg(u) + |N_I| + |N_L|).
    ///
    /// # Panics
    ///
    /// Panics if `v` is not in the level set.
    pub fn swap_in(&mut self, v: u32) -> u32 {
        assert!(self.level.contains(v), "vertex {v} not in the level set");
        let u = self
            .clique
            .iter()
            .find(|&u| !self.graph.is_edge(u, v))
            .expect("a level-set member has exactly one non-neighbour in C");
        debug_assert!(self.clique.iter().all(|w| w == u || self.graph.is_edge(w, v)));

        self.level.remove(v);
        self.clique.remove(u);
        self.clique.add(v);
        for &w in self.graph.neighbors(v) {
            self.adj_count[w as usize] += 1;
        }
        for &w in self.graph.neighbors(u) {
            self.adj_count[w as usize] -= 1;
        }

        let k = self.clique.len() as u32;
        // The displaced vertex is adjacent to every member except v.
        debug_assert_eq!(self.adj_count[u as usize], k - 1);
        self.level.add(u);
        self.sweep_improving(k);
        self.sweep_level(k);
        // Non-members adjacent to v may have climbed from k-2 to k-1.
        for &w in self.graph.neighbors(v) {
            if self.adj_count[w as usize] + 1 == k
                && !self.clique.contains(w)
                && !self.level.contains(w)
            {
                debug_assert!(!self.improving.contains(w));
                self.level.add(w);
            }
        }
        u
    }

    /// Keep improving members at count k; demote those at k-1.
    fn sweep_improving(&mut self, k: u32) {
        let mut i = 0;
        while i < self.improving.len() {
            let w = self.improving.as_slice()[i];
            let c = self.adj_count[w as usize];
            if c == k {
                i += 1;
            } else {
                debug_assert_eq!(c + 1, k);
                self.improving.remove(w);
                self.level.add(w);
            }
        }
    }

    /// Keep level members at count k-1; promote those at k; drop the
    /// rest.
    fn sweep_level(&mut self, k: u32) {
        let mut i = 0;
        while i < self.level.len() {
            let w = self.level.as_slice()[i];
            let c = self.adj_count[w as usize];
            if c + 1 == k {
                i += 1;
            } else if c == k {
                self.level.remove(w);
                self.improving.add(w);
            } else {
                self.level.remove(w);
            }
        }
    }

    /// Full O(n + sum of member degrees) recomputation of counts and
    /// sets from the clique alone.
    fn recompute(&mut self) {
        self.adj_count.fill(0);
        for u in self.clique.iter() {
            for &w in self.graph.neighbors(u) {
                self.adj_count[w as usize] += 1;
            }
        }
        self.improving.clear();
        self.level.clear();
        let k = self.clique.len() as u32;
        for w in 0..self.graph.n() as u32 {
            if self.clique.contains(w) {
                continue;
            }
            let c = self.adj_count[w as usize];
            if c == k {
                self.improving.add(w);
            } else if k >= 1 && c + 1 == k {
                self.level.add(w);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn sorted(s: &IndexedVertexSet) -> Vec<u32> {
        let mut v: Vec<u32> = s.iter().collect();
        v.sort_unstable();
        v
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn fresh_state_has_everything_improving() {
        let g = path3();
        let cs = CliqueState::new(&g);
        assert!(cs.is_empty());
        assert_eq!(sorted(cs.improving()), vec![0, 1, 2]);
        assert!(cs.level().is_empty());
    }

    #[test]
    fn reset_on_path_center_and_end() {
        let g = path3();
        let mut cs = CliqueState::new(&g);
        cs.reset_to(1);
        assert_eq!(cs.members(), &[1]);
        assert_eq!(sorted(cs.improving()), vec![0, 2]);
        assert!(cs.level().is_empty());

        cs.reset_to(0);
        assert_eq!(sorted(cs.improving()), vec![1]);
        assert_eq!(sorted(cs.level()), vec![2]);
    }

    #[test]
    fn add_chain_on_complete_graph() {
        let g = complete(5);
        let mut cs = CliqueState::new(&g);
        cs.reset_to(0);
        for v in [1u32, 2, 3, 4] {
            assert!(cs.improving().contains(v));
            cs.add_vertex(v);
            assert!(cs.level().is_empty());
        }
        assert_eq!(cs.len(), 5);
        assert!(cs.improving().is_empty());
    }

    #[test]
    fn star_stalls_after_one_addition() {
        // Star: center 0, leaves 1..=4. After one leaf joins, the other
        // leaves are one short of full adjacency.
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let mut cs = CliqueState::new(&g);
        cs.reset_to(0);
        assert_eq!(sorted(cs.improving()), vec![1, 2, 3, 4]);
        cs.add_vertex(1);
        assert!(cs.improving().is_empty());
        assert_eq!(sorted(cs.level()), vec![2, 3, 4]);
    }

    #[test]
    fn swap_on_k4_minus_edge() {
        // K4 without {0,3}: from C = {0,1,2}, vertex 3 is a legal swap
        // that must displace 0.
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut cs = CliqueState::new(&g);
        cs.restore_to(&[0, 1, 2]).unwrap();
        assert_eq!(sorted(cs.level()), vec![3]);
        let out = cs.swap_in(3);
        assert_eq!(out, 0);
        let mut members = cs.members().to_vec();
        members.sort_unstable();
        assert_eq!(members, vec![1, 2, 3]);
        assert_eq!(sorted(cs.level()), vec![0]);
        assert!(cs.improving().is_empty());
    }

    #[test]
    fn swap_walks_along_path() {
        let g = path3();
        let mut cs = CliqueState::new(&g);
        cs.restore_to(&[0, 1]).unwrap();
        assert_eq!(sorted(cs.level()), vec![2]);
        assert_eq!(cs.swap_in(2), 0);
        let mut members = cs.members().to_vec();
        members.sort_unstable();
        assert_eq!(members, vec![1, 2]);
        assert_eq!(sorted(cs.level()), vec![0]);
    }

    #[test]
    fn restore_rejects_bad_input() {
        let g = path3();
        let mut cs = CliqueState::new(&g);
        cs.reset_to(1);
        assert!(matches!(cs.restore_to(&[0, 2]), Err(CliqueStateError::NotAClique { u: 0, v: 2 })));
        assert!(matches!(cs.restore_to(&[0, 0]), Err(CliqueStateError::Duplicate { v: 0 })));
        assert!(matches!(cs.restore_to(&[9]), Err(CliqueStateError::OutOfRange { v: 9 })));
        // Untouched on error.
        assert_eq!(cs.members(), &[1]);
        assert_eq!(sorted(cs.improving()), vec![0, 2]);
    }

    #[test]
    fn restore_accepts_empty_and_valid_cliques() {
        let g = complete(4);
        let mut cs = CliqueState::new(&g);
        cs.restore_to(&[1, 3]).unwrap();
        assert_eq!(sorted(cs.improving()), vec![0, 2]);
        cs.restore_to(&[]).unwrap();
        assert!(cs.is_empty());
        assert_eq!(sorted(cs.improving()), vec![0, 1, 2, 3]);
    }

    // Brute-force reference: recompute counts and sets from the graph
    // and the member list alone.
    fn reference(g: &Graph, members: &[u32]) -> (Vec<u32>, BTreeSet<u32>, BTreeSet<u32>) {
        let k = members.len() as u32;
        let counts: Vec<u32> = (0..g.n() as u32)
            .map(|w| members.iter().filter(|&&u| g.is_edge(u, w)).count() as u32)
            .collect();
        let mut ni = BTreeSet::new();
        let mut nl = BTreeSet::new();
        for w in 0..g.n() as u32 {
            if members.contains(&w) {
                continue;
            }
            if counts[w as usize] == k {
                ni.insert(w);
            } else if k >= 1 && counts[w as usize] + 1 == k {
                nl.insert(w);
            }
        }
        (counts, ni, nl)
    }

    fn assert_matches_reference(cs: &CliqueState) {
        let (counts, ni, nl) = reference(cs.graph(), cs.members());
        for w in 0..cs.graph().n() as u32 {
            assert_eq!(cs.adj_count(w), counts[w as usize], "count of {w}");
        }
        let got_ni: BTreeSet<u32> = cs.improving().iter().collect();
        let got_nl: BTreeSet<u32> = cs.level().iter().collect();
        assert_eq!(got_ni, ni, "improving set");
        assert_eq!(got_nl, nl, "level set");
    }

    #[test]
    fn randomized_ops_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (n, p) in [(10usize, 0.5), (25, 0.2), (25, 0.9), (40, 0.5), (60, 0.3)] {
            let g = Graph::random_gnp(n, p, &mut rng);
            let mut cs = CliqueState::new(&g);
            cs.reset_to(rng.random_range(0..n as u32));
            assert_matches_reference(&cs);
            for _ in 0..2_000 {
                let can_add = !cs.improving().is_empty();
                let can_swap = !cs.level().is_empty();
                match rng.random_range(0..10u32) {
                    0 => cs.reset_to(rng.random_range(0..n as u32)),
                    1 => {
                        // Restore to a random subset of the current clique.
                        let keep: Vec<u32> =
                            cs.members().iter().copied().filter(|_| rng.random_bool(0.6)).collect();
                        cs.restore_to(&keep).unwrap();
                    }
                    2..=5 if can_add => {
                        let v = cs.improving().random_member(&mut rng);
                        cs.add_vertex(v);
                    }
                    _ if can_swap => {
                        let v = cs.level().random_member(&mut rng);
                        cs.swap_in(v);
                    }
                    _ if can_add => {
                        let v = cs.improving().random_member(&mut rng);
                        cs.add_vertex(v);
                    }
                    _ => cs.reset_to(rng.random_range(0..n as u32)),
                }
                assert_matches_reference(&cs);
            }
        }
    }
}
