//! Exact maximum clique computation for small graphs, used to validate
//! the stochastic solver and to pin target clique sizes in tests.
//!
//! `max_clique_exact` is a branch-and-bound search with a greedy-colouring
//! bound: a proper colouring of the candidate set with `c` colours proves
//! no clique inside it exceeds `c`, so whole branches fall away without
//! giving up completeness. `enumerate_maximum_cliques` runs pivoted
//! Bron-Kerbosch over maximal cliques, keeping the maximum-size ones.
//! Both are exponential in the worst case and meant for graphs up to a
//! few dozen vertices, not the DIMACS benchmarks.

use crate::graph::Graph;

/// True iff `s` is a clique: members pairwise adjacent and distinct.
/// Empty and singleton sets are cliques.
///
/// # Panics
///
/// Panics if a member is out of range.
pub fn verify_clique(g: &Graph, s: &[u32]) -> bool {
    for (i, &v) in s.iter().enumerate() {
        assert!((v as usize) < g.n(), "vertex {v} out of range");
        for &u in &s[..i] {
            if u == v || !g.is_edge(u, v) {
                return false;
            }
        }
    }
    true
}

/// The clique number and one witness clique (sorted ascending).
pub fn max_clique_exact(g: &Graph) -> (usize, Vec<u32>) {
    let words = g.n().div_ceil(64);
    let mut all = vec![!0u64; words];
    trim_tail(&mut all, g.n());
    let candidates = collect_bits(&all);

    let mut best: Vec<u32> = Vec::new();
    let mut current = Vec::new();
    expand(g, &mut current, &candidates, &all, &mut best);
    best.sort_unstable();
    (best.len(), best)
}

/// Every maximum clique, each sorted ascending, the list itself sorted.
/// Distinct by construction: Bron-Kerbosch visits each maximal clique
/// exactly once.
pub fn enumerate_maximum_cliques(g: &Graph) -> Vec<Vec<u32>> {
    let (omega, _) = max_clique_exact(g);
    let words = g.n().div_ceil(64);
    let mut p = vec![!0u64; words];
    trim_tail(&mut p, g.n());
    let x = vec![0u64; words];

    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(g, &mut r, p, x, omega, &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

fn trim_tail(words: &mut [u64], n: usize) {
    if !n.is_multiple_of(64) {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << (n % 64)) - 1;
        }
    }
}

fn collect_bits(words: &[u64]) -> Vec<u32> {
    let mut out = Vec::new();
    for (w, &word) in words.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            out.push((w * 64 + bits.trailing_zeros() as usize) as u32);
            bits &= bits - 1;
        }
    }
    out
}

fn intersect(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn popcount(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// Greedy colouring of `candidates`: returns (vertex, colour) pairs in
/// ascending colour order. No clique in the set is larger than the
/// number of colours used, which is the pruning bound.
fn color_sort(g: &Graph, candidates: &[u32]) -> Vec<(u32, usize)> {
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for &v in candidates {
        let slot = classes.iter().position(|class| class.iter().all(|&u| !g.is_edge(u, v)));
        match slot {
            Some(i) => classes[i].push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut out = Vec::with_capacity(candidates.len());
    for (i, class) in classes.iter().enumerate() {
        for &v in class {
            out.push((v, i + 1));
        }
    }
    out
}

fn expand(
    g: &Graph,
    current: &mut Vec<u32>,
    candidates: &[u32],
    cand_mask: &[u64],
    best: &mut Vec<u32>,
) {
    let mut ordered = color_sort(g, candidates);
    let mut mask = cand_mask.to_vec();
    // Highest colour first: once current.len() + colour can no longer
    // beat the incumbent, neither can any earlier vertex.
    while let Some((v, color)) = ordered.pop() {
        if current.len() + color <= best.len() {
            return;
        }
        current.push(v);
        let next_mask = intersect(&mask, g.row(v));
        let next = collect_bits(&next_mask);
        if next.is_empty() {
            if current.len() > best.len() {
                *best = current.clone();
            }
        } else {
            expand(g, current, &next, &next_mask, best);
        }
        current.pop();
        mask[v as usize / 64] &= !(1u64 << (v % 64));
    }
}

fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<u32>,
    p: Vec<u64>,
    x: Vec<u64>,
    omega: usize,
    out: &mut Vec<Vec<u32>>,
) {
    if popcount(&p) == 0 {
        if popcount(&x) == 0 && r.len() == omega {
            out.push(r.clone());
        }
        return;
    }
    // Even taking all of P cannot reach a maximum clique: skip.
    if r.len() + popcount(&p) < omega {
        return;
    }
    // Pivot on the vertex of P ∪ X covering most of P.
    let pivot = collect_bits(&p)
        .into_iter()
        .chain(collect_bits(&x))
        .max_by_key(|&u| popcount(&intersect(&p, g.row(u))))
        .expect("P is nonempty");
    let mut p = p;
    let mut x = x;
    let mut outside = p.clone();
    for (w, word) in outside.iter_mut().enumerate() {
        *word &= !g.row(pivot)[w];
    }
    for v in collect_bits(&outside) {
        r.push(v);
        bron_kerbosch(g, r, intersect(&p, g.row(v)), intersect(&x, g.row(v)), omega, out);
        r.pop();
        p[v as usize / 64] &= !(1u64 << (v % 64));
        x[v as usize / 64] |= 1u64 << (v % 64);
    }
}
