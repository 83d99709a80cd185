//! A constant-time indexed set of vertex ids from a fixed universe
//! `0..n`, the workhorse container for the current clique and its
//! neighbourhood sets.

use rand::Rng;

const ABSENT: u32 = u32::MAX;

/// A set over `0..n` with O(1) `add`, `remove`, and `contains`, O(size)
/// `clear`, and uniform random member selection.
///
/// Representation: a dense `members` array plus a `position` index
/// mapping each id to its slot in `members` (or an absent sentinel).
/// Removal swaps the last member into the vacated slot, so iteration
/// order is unspecified but deterministic for a given op sequence.
#[derive(Debug, Clone)]
pub struct IndexedVertexSet {
    members: Vec<u32>,
    position: Vec<u32>,
}

impl IndexedVertexSet {
    /// An empty set over the universe `0..n`.
    pub fn new(n: usize) -> IndexedVertexSet {
        assert!(n < ABSENT as usize, "universe too large");
        IndexedVertexSet { members: Vec::with_capacity(n), position: vec![ABSENT; n] }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// # Panics
    ///
    /// Panics if `v` is outside the universe.
    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.position[v as usize] != ABSENT
    }

    /// Inserts `v`.
    ///
    /// # Panics
    ///
    /// Panics on double-insert or an id outside the universe.
    #[inline]
    pub fn add(&mut self, v: u32) {
        assert!(self.position[v as usize] == ABSENT, "vertex {v} already in set");
        self.position[v as usize] = self.members.len() as u32;
        self.members.push(v);
    }

    /// Removes `v`, swapping the last member into its slot.
    ///
    /// # Panics
    ///
    /// Panics if `v` is not a member or is outside the universe.
    #[inline]
    pub fn remove(&mut self, v: u32) {
        let slot = self.position[v as usize];
        assert!(slot != ABSENT, "vertex {v} not in set");
        let last = self.members.pop().expect("nonempty by the membership check");
        if last != v {
            self.members[slot as usize] = last;
            self.position[last as usize] = slot;
        }
        self.position[v as usize] = ABSENT;
    }

    /// Empties the set in O(size).
    pub fn clear(&mut self) {
        for &v in &self.members {
            self.position[v as usize] = ABSENT;
        }
        self.members.clear();
    }

    /// A uniformly random member.
    ///
    /// # Panics
    ///
    /// Panics if the set is empty.
    #[inline]
    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        assert!(!self.members.is_empty(), "random_member on empty set");
        self.members[rng.random_range(0..self.members.len())]
    }

    /// The members in internal order.
    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }
}
