//! The DLS-MC search loop.
//!
//! Each round expands the current clique greedily (minimum-penalty
//! choices from the improving set), then wanders the plateau by swapping
//! level-set vertices in one-for-one, returning to expansion whenever a
//! swap opens the improving set again. When the round stalls, clique
//! members are penalised and the search is perturbed: with `pd > 1` the
//! clique collapses to its most recently added vertex; with `pd = 1`
//! (penalties identically zero) a random vertex is spliced in and the
//! members not adjacent to it are dropped.
//!
//! Step accounting is exact: a step is one vertex addition in expansion
//! or plateau search — the initial vertex and perturbation edits are
//! free — and the budget is checked before every addition, so a run's
//! step count never exceeds `max_steps`.
//!
//! A plateau is abandoned once it has drifted away from the clique it
//! started from. Tracking the intersection with a snapshot `C'` is
//! approximated the way the original algorithm does: record `|C|` when
//! the round's first plateau phase begins and decrement once per swap;
//! at zero the intersection may be empty and the plateau ends. Repeated
//! plateau phases within one round share the same counter.

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clique_state::CliqueState;
use crate::graph::Graph;
use crate::penalties::PenaltyState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    /// Target clique size; the run stops as soon as `|C|` reaches it.
    pub tcs: u32,
    /// Penalty delay: positive penalties decay every `pd`-th round.
    pub pd: u32,
    /// Step budget for the run.
    pub max_steps: u64,
    /// Seed for the run's private generator.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig { tcs: 1, pd: 1, max_steps: 100_000_000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverResult {
    /// Whether a clique of size `tcs` was found within the budget.
    pub success: bool,
    /// The found clique, or the largest clique seen if the run failed.
    /// Sorted ascending, 0-based.
    pub clique: Vec<u32>,
    /// Vertex additions performed (expansion and plateau combined).
    pub steps: u64,
    pub elapsed: Duration,
}

/// One snapshot per perturbation, for search-behaviour studies.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationEvent {
    /// Expansion additions since the previous perturbation.
    pub improving_steps: u64,
    /// Plateau swaps since the previous perturbation.
    pub plateau_swaps: u64,
    /// The clique immediately before the perturbation edit, sorted.
    pub clique: Vec<u32>,
    /// Vertices with positive penalty, after this round's update.
    pub penalized_vertices: usize,
    /// Normalised Hamming distance to the clique at the previous
    /// perturbation; `None` for the first event of a run.
    pub relative_mobility: Option<f64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("target clique size {tcs} outside [1, {n}]")]
    InvalidTarget { tcs: u32, n: usize },
    #[error("penalty delay must be at least 1")]
    InvalidPd,
}

/// `|A Δ B| / (2 tcs)`: 0 for identical cliques, 1 for disjoint cliques
/// of size `tcs`.
pub fn relative_mobility(prev: &[u32], curr: &[u32], tcs: u32) -> f64 {
    let sym = prev.iter().filter(|v| !curr.contains(v)).count()
        + curr.iter().filter(|v| !prev.contains(v)).count();
    sym as f64 / (2.0 * tcs as f64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandOutcome {
    /// The vertex added last, if any.
    pub last_added: Option<u32>,
    pub additions: u64,
}

/// Expansion phase: repeatedly add a minimum-penalty improving vertex,
/// one step each, until the improving set is exhausted (or entirely
/// filtered by availability and the penalty cap), the clique reaches
/// `tcs`, or the step budget runs out.
pub fn expand<R: Rng + ?Sized>(
    cs: &mut CliqueState,
    ps: &mut PenaltyState,
    rng: &mut R,
    tcs: u32,
    max_steps: u64,
    steps: &mut u64,
) -> ExpandOutcome {
    let mut out = ExpandOutcome { last_added: None, additions: 0 };
    loop {
        if cs.len() as u32 >= tcs || *steps >= max_steps {
            return out;
        }
        let Some(v) = ps.select_min_penalty(cs.improving(), rng) else {
            return out;
        };
        cs.add_vertex(v);
        *steps += 1;
        out.additions += 1;
        out.last_added = Some(v);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlateauOutcome {
    /// The vertex swapped in last, if any.
    pub last_swapped: Option<u32>,
    /// Every vertex swapped in, in order.
    pub swapped: Vec<u32>,
}

/// Plateau phase: while the improving set stays empty, swap a
/// minimum-penalty level-set vertex for its sole non-neighbour in `C`,
/// one step and one budget unit each. Ends when the improving set opens
/// up, the level set is exhausted (or filtered), `swap_budget` reaches
/// zero, or the step budget runs out.
pub fn plateau_search<R: Rng + ?Sized>(
    cs: &mut CliqueState,
    ps: &mut PenaltyState,
    rng: &mut R,
    swap_budget: &mut u64,
    max_steps: u64,
    steps: &mut u64,
) -> PlateauOutcome {
    let mut out = PlateauOutcome { last_swapped: None, swapped: Vec::new() };
    loop {
        if !cs.improving().is_empty() || *swap_budget == 0 || *steps >= max_steps {
            return out;
        }
        let Some(v) = ps.select_min_penalty(cs.level(), rng) else {
            return out;
        };
        cs.swap_in(v);
        *steps += 1;
        *swap_budget -= 1;
        out.last_swapped = Some(v);
        out.swapped.push(v);
    }
}

/// Perturbation. With `pd > 1`, restart from the most recently added
/// vertex (falling back to the clique's first member when the round
/// added nothing, which only happens with `|C| = 1`). With `pd = 1`,
/// draw a uniform vertex `v`: if `v` is already a member nothing
/// changes, otherwise `v` is spliced in and members not adjacent to it
/// are dropped. Availability is cleared in both modes.
pub fn perturb<R: Rng + ?Sized>(
    cs: &mut CliqueState,
    ps: &mut PenaltyState,
    rng: &mut R,
    last_added: Option<u32>,
) {
    if ps.pd() > 1 {
        let anchor = last_added.unwrap_or_else(|| cs.members()[0]);
        cs.reset_to(anchor);
    } else {
        let v = rng.random_range(0..cs.graph().n() as u32);
        if !cs.contains(v) {
            let mut keep: Vec<u32> =
                cs.members().iter().copied().filter(|&u| cs.graph().is_edge(u, v)).collect();
            keep.push(v);
            cs.restore_to(&keep)
                .expect("a clique spliced with a common neighbour set stays a clique");
        }
    }
    ps.clear_availability();
}

/// Runs DLS-MC on `g`. Deterministic for a given graph, configuration,
/// and seed.
pub fn solve(g: &Graph, cfg: &SolverConfig) -> Result<SolverResult, SolverError> {
    run(g, cfg, false).map(|(result, _)| result)
}

/// Like [`solve`], also returning one [`PerturbationEvent`] per
/// perturbation performed.
pub fn solve_instrumented(
    g: &Graph,
    cfg: &SolverConfig,
) -> Result<(SolverResult, Vec<PerturbationEvent>), SolverError> {
    run(g, cfg, true)
}

fn run(
    g: &Graph,
    cfg: &SolverConfig,
    instrument: bool,
) -> Result<(SolverResult, Vec<PerturbationEvent>), SolverError> {
    if cfg.tcs < 1 || cfg.tcs as usize > g.n() {
        return Err(SolverError::InvalidTarget { tcs: cfg.tcs, n: g.n() });
    }
    if cfg.pd < 1 {
        return Err(SolverError::InvalidPd);
    }

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cs = CliqueState::new(g);
    let mut ps = PenaltyState::new(g.n(), cfg.pd);

    cs.reset_to(rng.random_range(0..g.n() as u32));
    let mut steps = 0u64;
    let mut best: Vec<u32> = cs.members().to_vec();

    let mut trace: Vec<PerturbationEvent> = Vec::new();
    let mut improving_since = 0u64;
    let mut swaps_since = 0u64;
    let mut prev_clique: Option<Vec<u32>> = None;

    // Debug builds double-check that availability really prevents a
    // vertex from being swapped in twice within one round.
    let mut round_swapped: Vec<u32> = Vec::new();
    fn note_swaps(out: &PlateauOutcome, swaps_since: &mut u64, round_swapped: &mut Vec<u32>) {
        *swaps_since += out.swapped.len() as u64;
        if cfg!(debug_assertions) {
            for &v in &out.swapped {
                assert!(!round_swapped.contains(&v), "vertex {v} swapped in twice in one round");
                round_swapped.push(v);
            }
        }
    }

    let found = 'search: loop {
        round_swapped.clear();

        let first = expand(&mut cs, &mut ps, &mut rng, cfg.tcs, cfg.max_steps, &mut steps);
        improving_since += first.additions;
        let mut last_added = first.last_added;
        if cs.len() > best.len() {
            best = cs.members().to_vec();
        }
        if cs.len() as u32 >= cfg.tcs {
            break true;
        }

        // The plateau reference clique C' is fixed here, once per round;
        // its surrogate is a swap counter started at |C|.
        let mut swap_budget = cs.len() as u64;

        let p =
            plateau_search(&mut cs, &mut ps, &mut rng, &mut swap_budget, cfg.max_steps, &mut steps);
        note_swaps(&p, &mut swaps_since, &mut round_swapped);
        if p.last_swapped.is_some() {
            last_added = p.last_swapped;
        }

        loop {
            if cs.improving().is_empty() {
                break;
            }
            let before = steps;
            let e = expand(&mut cs, &mut ps, &mut rng, cfg.tcs, cfg.max_steps, &mut steps);
            improving_since += e.additions;
            if e.last_added.is_some() {
                last_added = e.last_added;
            }
            if cs.len() > best.len() {
                best = cs.members().to_vec();
            }
            if cs.len() as u32 >= cfg.tcs {
                break 'search true;
            }
            let p = plateau_search(
                &mut cs,
                &mut ps,
                &mut rng,
                &mut swap_budget,
                cfg.max_steps,
                &mut steps,
            );
            note_swaps(&p, &mut swaps_since, &mut round_swapped);
            if p.last_swapped.is_some() {
                last_added = p.last_swapped;
            }
            // The improving set can be nonempty yet entirely filtered by
            // availability or the penalty cap; a pass that performs no
            // step would loop forever, so treat it as exhausted.
            if steps == before {
                break;
            }
        }

        if steps >= cfg.max_steps {
            break false;
        }

        ps.update_penalties(cs.members());
        if instrument {
            let mut clique_now = cs.members().to_vec();
            clique_now.sort_unstable();
            let mobility =
                prev_clique.as_ref().map(|prev| relative_mobility(prev, &clique_now, cfg.tcs));
            trace.push(PerturbationEvent {
                improving_steps: improving_since,
                plateau_swaps: swaps_since,
                penalized_vertices: ps.penalized_count(),
                clique: clique_now.clone(),
                relative_mobility: mobility,
            });
            prev_clique = Some(clique_now);
            improving_since = 0;
            swaps_since = 0;
        }
        perturb(&mut cs, &mut ps, &mut rng, last_added);
    };

    let mut clique = if found { cs.members().to_vec() } else { best };
    clique.sort_unstable();
    debug_assert!(crate::oracle::verify_clique(g, &clique));
    let result = SolverResult { success: found, clique, steps, elapsed: start.elapsed() };
    Ok((result, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::verify_clique;
    use crate::vertex_set::IndexedVertexSet;

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
    fn finds_k5_in_exactly_four_steps() {
        let g = complete(5);
        for pd in [1u32, 2, 5] {
            for seed in 0..5 {
                let cfg = SolverConfig { tcs: 5, pd, seed, max_steps: 1_000 };
                let r = solve(&g, &cfg).unwrap();
                assert!(r.success);
                assert_eq!(r.clique, vec![0, 1, 2, 3, 4]);
                // The initial vertex is free; the four expansions count.
                assert_eq!(r.steps, 4, "pd={pd} seed={seed}");
            }
        }
    }

    /// K5 plus an isolated vertex: the target of 6 is in range but
    /// unsatisfiable, so the run must burn the budget to the exact step.
    fn k5_plus_isolated() -> Graph {
        let mut edges = Vec::new();
        for u in 0..5u32 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(6, edges).unwrap()
    }

    #[test]
    fn unsatisfiable_target_exhausts_budget_exactly() {
        let g = k5_plus_isolated();
        let cfg = SolverConfig { tcs: 6, pd: 2, seed: 3, max_steps: 1_000 };
        let r = solve(&g, &cfg).unwrap();
        assert!(!r.success);
        // The budget is checked before every addition, so the counter
        // lands exactly on it, never beyond.
        assert_eq!(r.steps, 1_000);
        assert_eq!(r.clique, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn tcs_one_needs_no_steps() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let r = solve(&g, &SolverConfig { tcs: 1, pd: 1, seed: 9, max_steps: 10 }).unwrap();
        assert!(r.success);
        assert_eq!(r.steps, 0);
        assert_eq!(r.clique.len(), 1);
    }

    #[test]
    fn config_validation() {
        let g = complete(5);
        assert_eq!(
            solve(&g, &SolverConfig { tcs: 0, ..Default::default() }),
            Err(SolverError::InvalidTarget { tcs: 0, n: 5 })
        );
        assert_eq!(
            solve(&g, &SolverConfig { tcs: 6, ..Default::default() }),
            Err(SolverError::InvalidTarget { tcs: 6, n: 5 })
        );
        assert_eq!(
            solve(&g, &SolverConfig { tcs: 3, pd: 0, ..Default::default() }),
            Err(SolverError::InvalidPd)
        );
    }

    #[test]
    fn failed_runs_report_best_clique_seen() {
        // K4 with two pendants; tcs 5 is unsatisfiable but the K4 shows
        // up quickly.
        let g =
            Graph::from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)])
                .unwrap();
        let r = solve(&g, &SolverConfig { tcs: 5, pd: 2, seed: 1, max_steps: 2_000 }).unwrap();
        assert!(!r.success);
        assert_eq!(r.clique, vec![0, 1, 2, 3]);
        assert!(verify_clique(&g, &r.clique));
        assert_eq!(r.steps, 2_000);
    }

    #[test]
    fn deterministic_for_a_fixed_seed() {
        let g = Graph::random_gnp(40, 0.5, &mut ChaCha8Rng::seed_from_u64(8));
        let cfg = SolverConfig { tcs: 7, pd: 2, seed: 1234, max_steps: 50_000 };
        let (r1, t1) = solve_instrumented(&g, &cfg).unwrap();
        let (r2, t2) = solve_instrumented(&g, &cfg).unwrap();
        assert_eq!(r1.success, r2.success);
        assert_eq!(r1.clique, r2.clique);
        assert_eq!(r1.steps, r2.steps);
        assert_eq!(t1, t2);
    }

    #[test]
    fn steps_never_exceed_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..10 {
            let g = Graph::random_gnp(20, 0.3, &mut rng);
            for pd in [1, 2] {
                let cfg = SolverConfig { tcs: 15, pd, seed, max_steps: 5_000 };
                let r = solve(&g, &cfg).unwrap();
                assert!(!r.success);
                assert!(r.steps <= 5_000);
                assert!(verify_clique(&g, &r.clique));
            }
        }
    }

    #[test]
    fn relative_mobility_endpoints() {
        assert_eq!(relative_mobility(&[0, 1], &[0, 1], 2), 0.0);
        assert_eq!(relative_mobility(&[0, 1], &[2, 3], 2), 1.0);
        assert_eq!(relative_mobility(&[0, 1], &[1, 2], 2), 0.5);
    }

    #[test]
    fn successful_run_without_perturbation_has_empty_trace() {
        let g = complete(5);
        let cfg = SolverConfig { tcs: 5, pd: 2, seed: 0, max_steps: 100 };
        let (r, trace) = solve_instrumented(&g, &cfg).unwrap();
        assert!(r.success);
        assert!(trace.is_empty());
    }

    #[test]
    fn instrumented_trace_on_a_stuck_run() {
        let g = k5_plus_isolated();
        let cfg = SolverConfig { tcs: 6, pd: 2, seed: 5, max_steps: 100 };
        let (r, trace) = solve_instrumented(&g, &cfg).unwrap();
        assert!(!r.success);
        assert_eq!(r.steps, 100);
        assert!(!trace.is_empty());

        let mut logged_steps = 0u64;
        for (i, ev) in trace.iter().enumerate() {
            logged_steps += ev.improving_steps + ev.plateau_swaps;
            assert!(verify_clique(&g, &ev.clique));
            assert!(ev.penalized_vertices <= 6);
            match ev.relative_mobility {
                None => assert_eq!(i, 0, "mobility is undefined only on the first event"),
                Some(m) => assert!((0.0..=1.0).contains(&m), "mobility {m}"),
            }
        }
        // The round that hits the budget breaks off before logging its
        // event, so the trace accounts for strictly fewer steps than ran.
        assert!(logged_steps < r.steps, "logged {logged_steps} of {}", r.steps);
    }

    #[test]
    fn expand_on_star_stops_after_one_addition() {
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let mut cs = CliqueState::new(&g);
        let mut ps = PenaltyState::new(5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        cs.reset_to(0);
        let mut steps = 0;
        let out = expand(&mut cs, &mut ps, &mut rng, 5, 100, &mut steps);
        assert_eq!(out.additions, 1);
        assert_eq!(steps, 1);
        assert!(cs.improving().is_empty());
    }

    #[test]
    fn expand_returns_none_when_all_filtered() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut cs = CliqueState::new(&g);
        let mut ps = PenaltyState::new(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        cs.reset_to(1);
        // Exhaust availability of both improving vertices.
        let mut probe = IndexedVertexSet::new(3);
        probe.add(0);
        probe.add(2);
        ps.select_min_penalty(&probe, &mut rng);
        ps.select_min_penalty(&probe, &mut rng);
        let mut steps = 0;
        let out = expand(&mut cs, &mut ps, &mut rng, 3, 100, &mut steps);
        assert_eq!(out, ExpandOutcome { last_added: None, additions: 0 });
        assert_eq!(steps, 0);
    }

    #[test]
    fn plateau_walks_and_respects_budget() {
        // Path 0-1-2 with C = {0,1}: swapping 2 removes 0, then 0 is a
        // level vertex again and swaps back, consuming the budget of 2.
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut cs = CliqueState::new(&g);
        let mut ps = PenaltyState::new(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        cs.restore_to(&[0, 1]).unwrap();
        let mut steps = 0;
        let mut budget = cs.len() as u64;
        let out = plateau_search(&mut cs, &mut ps, &mut rng, &mut budget, 100, &mut steps);
        assert_eq!(out.swapped, vec![2, 0]);
        assert_eq!(budget, 0);
        assert_eq!(steps, 2);
        let mut members = cs.members().to_vec();
        members.sort_unstable();
        assert_eq!(members, vec![0, 1]);
    }

    #[test]
    fn perturb_with_large_pd_restarts_from_last_added() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut cs = CliqueState::new(&g);
        let mut ps = PenaltyState::new(3, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        cs.restore_to(&[0, 1]).unwrap();
        perturb(&mut cs, &mut ps, &mut rng, Some(1));
        assert_eq!(cs.members(), &[1]);
    }

    #[test]
    fn perturb_with_pd_one_splices_a_random_vertex() {
        // Path 0-1-2, C = {0,1}. Drawing 0 or 1 leaves C unchanged;
        // drawing 2 splices it and drops 0. Both outcomes must occur.
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut seen_unchanged = false;
        let mut seen_spliced = false;
        for seed in 0..50 {
            let mut cs = CliqueState::new(&g);
            let mut ps = PenaltyState::new(3, 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            cs.restore_to(&[0, 1]).unwrap();
            perturb(&mut cs, &mut ps, &mut rng, Some(1));
            let mut members = cs.members().to_vec();
            members.sort_unstable();
            match members.as_slice() {
                [0, 1] => seen_unchanged = true,
                [1, 2] => seen_spliced = true,
                other => panic!("unexpected clique {other:?}"),
            }
            assert!(ps.is_available(0) && ps.is_available(1) && ps.is_available(2));
        }
        assert!(seen_unchanged && seen_spliced);
    }

    #[test]
    fn perturb_clears_availability() {
        let g = complete(4);
        let mut cs = CliqueState::new(&g);
        let mut ps = PenaltyState::new(4, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        cs.reset_to(0);
        let mut steps = 0;
        expand(&mut cs, &mut ps, &mut rng, 4, 100, &mut steps);
        assert!((0..4u32).filter(|&v| !ps.is_available(v)).count() >= 3);
        perturb(&mut cs, &mut ps, &mut rng, Some(3));
        assert!((0..4u32).all(|v| ps.is_available(v)));
    }
}
