//! Exact coverability and k-pebble reachability.
//!
//! Depth-first search over reachable configurations. Refuted configurations
//! go into a negative cache keyed by the full count vector. Before a node is
//! expanded it is tested against two admissible bounds:
//!
//! * size: a cover needs one pebble per vertex and steps only lose pebbles;
//! * potential: a pebble at distance `k` is worth at most `2^-k` pebbles at
//!   the target, and for every root `r` the weight `sum C(x) 2^dist(r,x)`
//!   never increases under a step while every cover has weight at least
//!   `sum_x 2^dist(r,x)`.
//!
//! A greedy router runs at every node; when it reaches the goal its moves are
//! appended to the search path and returned as the witness.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graphs::Graph;
use crate::pebbling::{simple_cost, BranchTag, Configuration, MoveSequence, PebbleMove};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_memo_entries: usize,
}

impl SearchBudget {
    pub fn new(max_nodes: u64, max_memo_entries: usize) -> SearchBudget {
        SearchBudget { max_nodes: max_nodes.max(1), max_memo_entries: max_memo_entries.max(1) }
    }

    pub fn with_nodes(max_nodes: u64) -> SearchBudget {
        SearchBudget::new(max_nodes, SearchBudget::default().max_memo_entries)
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 20_000_000, max_memo_entries: 4_000_000 }
    }
}

/// Switches for the search accelerators. Turning them off never changes a
/// verdict, only the work done.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub size_prune: bool,
    pub potential_prune: bool,
    pub greedy: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { size_prune: true, potential_prune: true, greedy: true }
    }
}

impl SearchOptions {
    pub fn plain() -> SearchOptions {
        SearchOptions { size_prune: false, potential_prune: false, greedy: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Coverable,
    NotCoverable,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub memo_hits: u64,
    pub size_prunes: u64,
    pub potential_prunes: u64,
    pub greedy_hits: u64,
}

impl std::ops::AddAssign for SearchStats {
    fn add_assign(&mut self, o: SearchStats) {
        self.nodes_expanded += o.nodes_expanded;
        self.memo_hits += o.memo_hits;
        self.size_prunes += o.size_prunes;
        self.potential_prunes += o.potential_prunes;
        self.greedy_hits += o.greedy_hits;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeciderResult {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<MoveSequence>,
    pub stats: SearchStats,
}

impl DeciderResult {
    pub fn is_positive(&self) -> bool {
        self.verdict == Verdict::Coverable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Goal {
    Cover,
    Reach { target: usize, k: u32 },
}

pub fn is_coverable(g: &Graph, c: &Configuration, budget: SearchBudget) -> Result<DeciderResult> {
    is_coverable_with(g, c, budget, SearchOptions::default())
}

pub fn is_coverable_with(
    g: &Graph,
    c: &Configuration,
    budget: SearchBudget,
    options: SearchOptions,
) -> Result<DeciderResult> {
    c.check_host(g)?;
    Ok(Search::new(g, Goal::Cover, budget, options).run(c))
}

/// Can some sequence of steps put at least `k` pebbles on `target`?
/// The verdict reuses [`Verdict::Coverable`] for "reachable".
pub fn can_reach(
    g: &Graph,
    c: &Configuration,
    target: usize,
    k: u32,
    budget: SearchBudget,
) -> Result<DeciderResult> {
    can_reach_with(g, c, target, k, budget, SearchOptions::default())
}

pub fn can_reach_with(
    g: &Graph,
    c: &Configuration,
    target: usize,
    k: u32,
    budget: SearchBudget,
    options: SearchOptions,
) -> Result<DeciderResult> {
    c.check_host(g)?;
    if target >= g.vertex_count() {
        return Err(crate::Error::InvalidParameter(format!("target {target} out of range")));
    }
    Ok(Search::new(g, Goal::Reach { target, k }, budget, options).run(c))
}

/// Greedy router alone: for the cheapest (empty vertex, source) pair, send
/// exactly one pebble down a shortest path, keeping one pebble on the
/// source. Returns the moves when it reaches a cover.
pub fn greedy_cover(g: &Graph, c: &Configuration) -> Option<MoveSequence> {
    let mut counts = c.counts().to_vec();
    let mut moves = Vec::new();
    greedy_cover_moves(g, &mut counts, &mut moves).then(|| {
        moves.iter_mut().for_each(|m| m.tag = Some(BranchTag::SearchWitness));
        MoveSequence::new(moves)
    })
}

/// Moves `2^(k-1-i)` pebbles along hop `i` of a shortest path, so exactly one
/// pebble arrives at `to` and intermediate counts end unchanged.
pub(crate) fn route_one(g: &Graph, counts: &mut [u32], from: usize, to: usize, moves: &mut Vec<PebbleMove>) {
    let path = g.shortest_path(from, to);
    let hops = path.len() - 1;
    for (i, w) in path.windows(2).enumerate() {
        let times = 1u32 << (hops - 1 - i);
        counts[w[0]] -= 2 * times;
        counts[w[1]] += times;
        moves.extend((0..times).map(|_| PebbleMove::new(w[0], w[1])));
    }
}

fn pow2(d: u32) -> Option<u64> {
    1u64.checked_shl(d).filter(|_| d < 63)
}

fn greedy_cover_moves(g: &Graph, counts: &mut [u32], moves: &mut Vec<PebbleMove>) -> bool {
    let n = counts.len();
    loop {
        // (distance, -source count, empty, source)
        let mut best: Option<(u32, i64, usize, usize)> = None;
        let mut any_empty = false;
        for v in 0..n {
            if counts[v] != 0 {
                continue;
            }
            any_empty = true;
            let row = g.distances_from(v);
            for u in 0..n {
                let Some(cost) = pow2(row[u]) else { continue };
                if counts[u] as u64 > cost {
                    let key = (row[u], -(counts[u] as i64), v, u);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
        }
        if !any_empty {
            return true;
        }
        let Some((_, _, v, u)) = best else { return false };
        route_one(g, counts, u, v, moves);
    }
}

fn greedy_reach_moves(g: &Graph, counts: &mut [u32], target: usize, k: u32, moves: &mut Vec<PebbleMove>) -> bool {
    let row = g.distances_from(target);
    while counts[target] < k {
        let mut best: Option<(u32, i64, usize)> = None;
        for u in 0..counts.len() {
            if u == target {
                continue;
            }
            let Some(cost) = pow2(row[u]) else { continue };
            if counts[u] as u64 >= cost {
                let key = (row[u], -(counts[u] as i64), u);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((_, _, u)) = best else { return false };
        route_one(g, counts, u, target, moves);
    }
    true
}

enum Outcome {
    Found,
    Refuted,
    Exhausted,
}

struct Search<'g> {
    g: &'g Graph,
    goal: Goal,
    budget: SearchBudget,
    options: SearchOptions,
    refuted: HashSet<Box<[u32]>>,
    stats: SearchStats,
    path: Vec<PebbleMove>,
    /// `sum_x 2^dist(r, x)` per root, `None` where it would overflow.
    cover_costs: Vec<Option<u128>>,
    buckets: Vec<u64>,
    scratch: Vec<u32>,
    greedy_moves: Vec<PebbleMove>,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, goal: Goal, budget: SearchBudget, options: SearchOptions) -> Search<'g> {
        let cover_costs = match goal {
            Goal::Cover => (0..g.vertex_count())
                .map(|r| simple_cost(g, r).map(u128::from).filter(|_| g.diameter() < 64))
                .collect(),
            Goal::Reach { .. } => Vec::new(),
        };
        Search {
            g,
            goal,
            budget,
            options,
            refuted: HashSet::new(),
            stats: SearchStats::default(),
            path: Vec::new(),
            cover_costs,
            buckets: vec![0; g.diameter() as usize + 1],
            scratch: Vec::new(),
            greedy_moves: Vec::new(),
        }
    }

    fn run(mut self, c: &Configuration) -> DeciderResult {
        let mut counts = c.counts().to_vec();
        let total = c.size();
        let verdict = match self.dfs(&mut counts, total) {
            Outcome::Found => Verdict::Coverable,
            Outcome::Refuted => Verdict::NotCoverable,
            Outcome::Exhausted => Verdict::BudgetExceeded,
        };
        let witness = (verdict == Verdict::Coverable).then(|| {
            let mut moves = std::mem::take(&mut self.path);
            moves.iter_mut().for_each(|m| m.tag = Some(BranchTag::SearchWitness));
            MoveSequence::new(moves)
        });
        DeciderResult { verdict, witness, stats: self.stats }
    }

    fn reached(&self, counts: &[u32]) -> bool {
        match self.goal {
            Goal::Cover => counts.iter().all(|&k| k > 0),
            Goal::Reach { target, k } => counts[target] >= k,
        }
    }

    /// `floor(sum_x C(x) 2^-dist(x, t))`, computed exactly by carrying
    /// halves inward from the farthest ring.
    fn reach_weight(&mut self, counts: &[u32], t: usize) -> u64 {
        let row = self.g.distances_from(t);
        self.buckets.iter_mut().for_each(|b| *b = 0);
        for (x, &k) in counts.iter().enumerate() {
            self.buckets[row[x] as usize] += u64::from(k);
        }
        self.buckets.iter().rev().fold(0u64, |acc, &b| b + acc / 2)
    }

    fn size_refutes(&self, counts: &[u32], total: u64) -> bool {
        match self.goal {
            Goal::Cover => total < counts.len() as u64,
            Goal::Reach { k, .. } => total < u64::from(k),
        }
    }

    fn potential_refutes(&mut self, counts: &[u32]) -> bool {
        match self.goal {
            Goal::Reach { target, k } => self.reach_weight(counts, target) < u64::from(k),
            Goal::Cover => {
                for v in 0..counts.len() {
                    if counts[v] == 0 && self.reach_weight(counts, v) == 0 {
                        return true;
                    }
                }
                for r in 0..counts.len() {
                    let Some(need) = self.cover_costs[r] else { continue };
                    let row = self.g.distances_from(r);
                    let have: u128 = counts
                        .iter()
                        .zip(row)
                        .map(|(&k, &d)| u128::from(k) << d)
                        .sum();
                    if have < need {
                        return true;
                    }
                }
                false
            }
        }
    }

    fn try_greedy(&mut self, counts: &[u32]) -> bool {
        self.scratch.clear();
        self.scratch.extend_from_slice(counts);
        self.greedy_moves.clear();
        let ok = match self.goal {
            Goal::Cover => greedy_cover_moves(self.g, &mut self.scratch, &mut self.greedy_moves),
            Goal::Reach { target, k } => {
                greedy_reach_moves(self.g, &mut self.scratch, target, k, &mut self.greedy_moves)
            }
        };
        if ok {
            self.path.extend_from_slice(&self.greedy_moves);
        }
        ok
    }

    fn candidate_moves(&self, counts: &[u32]) -> Vec<PebbleMove> {
        let mut first = Vec::new();
        let mut rest = Vec::new();
        for u in 0..counts.len() {
            if counts[u] < 2 {
                continue;
            }
            for &w in self.g.neighbors(u) {
                let promising = match self.goal {
                    Goal::Cover => counts[w] == 0,
                    Goal::Reach { target, .. } => self.g.distance(w, target) < self.g.distance(u, target),
                };
                if promising {
                    first.push(PebbleMove::new(u, w));
                } else {
                    rest.push(PebbleMove::new(u, w));
                }
            }
        }
        first.sort_by_key(|m| std::cmp::Reverse(counts[m.from]));
        first.extend(rest);
        first
    }

    fn dfs(&mut self, counts: &mut Vec<u32>, total: u64) -> Outcome {
        if self.stats.nodes_expanded >= self.budget.max_nodes {
            return Outcome::Exhausted;
        }
        self.stats.nodes_expanded += 1;

        if self.reached(counts) {
            return Outcome::Found;
        }
        if self.options.size_prune && self.size_refutes(counts, total) {
            self.stats.size_prunes += 1;
            return Outcome::Refuted;
        }
        if self.options.potential_prune && self.potential_refutes(counts) {
            self.stats.potential_prunes += 1;
            return Outcome::Refuted;
        }
        if self.refuted.contains(counts.as_slice()) {
            self.stats.memo_hits += 1;
            return Outcome::Refuted;
        }
        if self.options.greedy && self.try_greedy(counts) {
            self.stats.greedy_hits += 1;
            return Outcome::Found;
        }

        for m in self.candidate_moves(counts) {
            counts[m.from] -= 2;
            counts[m.to] += 1;
            self.path.push(m);
            let outcome = self.dfs(counts, total - 1);
            match outcome {
                Outcome::Found => return Outcome::Found,
                Outcome::Exhausted => {
                    self.path.pop();
                    counts[m.to] -= 1;
                    counts[m.from] += 2;
                    return Outcome::Exhausted;
                }
                Outcome::Refuted => {
                    self.path.pop();
                    counts[m.to] -= 1;
                    counts[m.from] += 2;
                }
            }
        }
        if self.refuted.len() < self.budget.max_memo_entries {
            self.refuted.insert(counts.clone().into_boxed_slice());
        }
        Outcome::Refuted
    }
}
