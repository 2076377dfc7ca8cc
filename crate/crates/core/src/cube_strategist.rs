//! Explicit cover sequences for good configurations on `Q^d`.
//!
//! A configuration `C` on `Q^d` is good when `|C| >= 3^d - |support| + 1`.
//! Every good configuration is coverable, and the argument is inductive
//! enough to run: trim to sharp, take open steps from vertices holding at
//! least three pebbles, reduce the single-large-vertex case to routing from
//! that vertex, solve `d <= 3` by exhaustive search, and for `d >= 4` cut the
//! cube into two halves, move the bottom half's deficiency across from the
//! top half's even surplus, and recurse on both halves.
//!
//! Every emitted sequence is replayed against the initial configuration
//! before it is returned.

use std::sync::OnceLock;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decider::{self, route_one, SearchBudget, Verdict};
use crate::error::{Error, Result};
use crate::graphs::{build_hypercube, CubeCut, Graph};
use crate::pebbling::{
    good_threshold, is_good, pow3, verify_cover_sequence, BranchTag, Configuration, MoveSequence, PebbleMove,
};

/// Largest dimension the strategist accepts (`2^12` vertices).
pub const MAX_STRATEGY_DIM: u32 = 12;

fn cube(d: u32) -> Result<&'static Graph> {
    static CUBES: [OnceLock<Graph>; MAX_STRATEGY_DIM as usize + 1] =
        [const { OnceLock::new() }; MAX_STRATEGY_DIM as usize + 1];
    if d > MAX_STRATEGY_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    Ok(CUBES[d as usize].get_or_init(|| build_hypercube(d).expect("within vertex budget")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BranchKind {
    AlreadyCover,
    TrimToSharp,
    OpenStep,
    SingleLarge,
    BaseSearch,
    CutTransfer,
    RecurseT,
    RecurseB,
    SearchWitness,
    Fallback,
}

impl BranchKind {
    /// Tag carried by the moves this branch emits, if it emits any.
    pub fn move_tag(self) -> Option<BranchTag> {
        match self {
            BranchKind::AlreadyCover | BranchKind::TrimToSharp => None,
            BranchKind::OpenStep => Some(BranchTag::OpenStep),
            BranchKind::SingleLarge => Some(BranchTag::SingleLarge),
            BranchKind::BaseSearch => Some(BranchTag::BaseSearch),
            BranchKind::CutTransfer => Some(BranchTag::CutTransfer),
            BranchKind::RecurseT => Some(BranchTag::RecurseT),
            BranchKind::RecurseB => Some(BranchTag::RecurseB),
            BranchKind::SearchWitness => Some(BranchTag::SearchWitness),
            BranchKind::Fallback => Some(BranchTag::Fallback),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub kind: BranchKind,
    pub dimension: u32,
    /// Nesting level of subcube recursion.
    pub depth: u32,
    pub size: u64,
    pub support: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oriented: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_top: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_bottom: Option<usize>,
    pub moves: usize,
}

impl BranchRecord {
    fn new(kind: BranchKind, d: u32, depth: u32, c: &Configuration) -> BranchRecord {
        BranchRecord {
            kind,
            dimension: d,
            depth,
            size: c.size(),
            support: c.support_size(),
            coordinate: None,
            delta: None,
            oriented: None,
            support_top: None,
            support_bottom: None,
            moves: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyTrace {
    pub dimension: u32,
    pub initial: Configuration,
    pub moves: MoveSequence,
    pub branches: Vec<BranchRecord>,
    pub fallback_count: usize,
    pub verified: bool,
}

impl StrategyTrace {
    /// Whether `kind` occurs anywhere in the branch log.
    pub fn took(&self, kind: BranchKind) -> bool {
        self.branches.iter().any(|b| b.kind == kind)
    }

    /// Every move tag belongs to some logged branch.
    pub fn tags_consistent(&self) -> bool {
        self.moves.iter().all(|m| {
            m.tag.is_some_and(|t| self.branches.iter().any(|b| b.kind.move_tag() == Some(t)))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategyOptions {
    /// Budget for the exhaustive base cases `d <= 3`.
    pub base_budget: SearchBudget,
    /// Budget for inputs no branch applies to (and non-good inputs).
    pub fallback_budget: SearchBudget,
    /// Solve the two halves of a cut on separate threads.
    pub parallel_halves: bool,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions {
            base_budget: SearchBudget::default(),
            fallback_budget: SearchBudget::new(200_000_000, 20_000_000),
            parallel_halves: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trimmed {
    pub sharp: Configuration,
    pub set_aside: Configuration,
}

/// Removes pebbles, one at a time from the lowest-index vertex holding at
/// least two, until the configuration is sharp. Support is unchanged.
pub fn trim_to_sharp(d: u32, c: &Configuration) -> Result<Trimmed> {
    let goodness = is_good(d, c)?;
    if !goodness.good {
        return Err(Error::InvalidConfiguration(format!("not good (slack {})", goodness.slack)));
    }
    let mut counts = c.counts().to_vec();
    let mut aside = vec![0u32; counts.len()];
    let mut slack = goodness.slack as u64;
    let mut v = 0;
    while slack > 0 {
        while v < counts.len() && counts[v] < 2 {
            v += 1;
        }
        if v == counts.len() {
            return Err(Error::Internal("positive slack but no vertex holds two pebbles".into()));
        }
        let take = u64::from(counts[v] - 1).min(slack) as u32;
        counts[v] -= take;
        aside[v] += take;
        slack -= u64::from(take);
    }
    Ok(Trimmed { sharp: Configuration::new(counts), set_aside: Configuration::new(aside) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenStep {
    pub step: PebbleMove,
    pub next: Configuration,
}

fn require_sharp(d: u32, c: &Configuration) -> Result<()> {
    let g = is_good(d, c)?;
    if !g.sharp {
        return Err(Error::InvalidConfiguration(format!(
            "configuration is not sharp on Q^{d} (slack {})",
            g.slack
        )));
    }
    Ok(())
}

/// A step from the lowest-index vertex with at least three pebbles onto its
/// lowest-index empty neighbor. Size drops by one and support grows by one,
/// so sharpness is preserved.
pub fn open_step(d: u32, c: &Configuration) -> Result<Option<OpenStep>> {
    require_sharp(d, c)?;
    let g = cube(d)?;
    Ok(find_open_step(g, c))
}

fn find_open_step(g: &Graph, c: &Configuration) -> Option<OpenStep> {
    let counts = c.counts();
    for v in 0..counts.len() {
        if counts[v] < 3 {
            continue;
        }
        if let Some(&w) = g.neighbors(v).iter().find(|&&w| counts[w] == 0) {
            let mut next = counts.to_vec();
            next[v] -= 2;
            next[w] += 1;
            return Some(OpenStep {
                step: PebbleMove::tagged(v, w, BranchTag::OpenStep),
                next: Configuration::new(next),
            });
        }
    }
    None
}

fn large_vertices(c: &Configuration) -> Vec<usize> {
    (0..c.len()).filter(|&v| c.get(v) >= 2).collect()
}

fn is_closed(g: &Graph, c: &Configuration) -> bool {
    let counts = c.counts();
    !(0..counts.len()).any(|v| counts[v] >= 2 && g.neighbors(v).iter().any(|&w| counts[w] == 0))
}

/// Cover sequence for a sharp closed configuration with exactly one large
/// vertex `L`.
///
/// While some one sits outside the closed neighborhood of `L`, it is traded
/// for two extra pebbles on `L`. The fully traded configuration has support
/// `N[L]` and exactly `3^d - 2d` pebbles on `L`, enough to route one pebble
/// to every other vertex. Each trade is then undone on the sequence: the
/// moves that produced the pebble finally sitting on the traded vertex are
/// removed, which frees at least the two pebbles `L` no longer has.
pub fn single_large_reduction(d: u32, c: &Configuration) -> Result<MoveSequence> {
    require_sharp(d, c)?;
    let g = cube(d)?;
    let large = large_vertices(c);
    if large.len() != 1 || !is_closed(g, c) {
        return Err(Error::InvalidConfiguration(
            "expected a closed configuration with exactly one large vertex".into(),
        ));
    }
    let l = large[0];

    let mut chain = vec![c.clone()];
    let mut traded = Vec::new();
    loop {
        let cur = chain.last().expect("nonempty");
        let Some(w) = (0..cur.len()).find(|&w| cur.get(w) == 1 && g.distance(l, w) >= 2) else {
            break;
        };
        let mut next = cur.counts().to_vec();
        next[w] = 0;
        next[l] += 2;
        traded.push(w);
        chain.push(Configuration::new(next));
    }

    let base = chain.last().expect("nonempty");
    let mut counts = base.counts().to_vec();
    let mut moves = Vec::new();
    for v in 0..counts.len() {
        if g.distance(l, v) >= 2 {
            let cost = 1u64 << g.distance(l, v);
            if u64::from(counts[l]) < cost + 1 {
                return Err(Error::Internal(format!("large vertex {l} cannot reach {v}")));
            }
            route_one(g, &mut counts, l, v, &mut moves);
        }
    }
    moves.iter_mut().for_each(|m| m.tag = Some(BranchTag::SingleLarge));

    for (i, &w) in traded.iter().enumerate().rev() {
        moves = excise_delivery(g, &chain[i + 1], &moves, w)?;
        let check = verify_cover_sequence(g, &chain[i], &MoveSequence::new(moves.clone()))
            .map_err(|e| Error::Internal(format!("excision produced an illegal sequence: {e}")))?;
        if !check.is_cover {
            return Err(Error::Internal("excision lost coverage".into()));
        }
    }
    Ok(MoveSequence::new(moves))
}

/// Replays `moves` from `start` with individual pebble identities (a move
/// consumes the two most recently arrived pebbles at its source) and
/// deletes every move in the production history of the pebble left on `w`.
fn excise_delivery(g: &Graph, start: &Configuration, moves: &[PebbleMove], w: usize) -> Result<Vec<PebbleMove>> {
    // producer[t] = index of the move that created pebble t
    let mut producer: Vec<Option<usize>> = Vec::new();
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); start.len()];
    for (v, stack) in stacks.iter_mut().enumerate() {
        for _ in 0..start.get(v) {
            stack.push(producer.len());
            producer.push(None);
        }
    }
    let mut consumed = Vec::with_capacity(moves.len());
    for (i, m) in moves.iter().enumerate() {
        if !g.is_adjacent(m.from, m.to) || stacks[m.from].len() < 2 {
            return Err(Error::Internal(format!("sequence breaks at step {i}")));
        }
        let a = stacks[m.from].pop().expect("checked");
        let b = stacks[m.from].pop().expect("checked");
        consumed.push([a, b]);
        stacks[m.to].push(producer.len());
        producer.push(Some(i));
    }
    let root = *stacks[w]
        .last()
        .ok_or_else(|| Error::Internal(format!("vertex {w} ends uncovered")))?;

    let mut removed = vec![false; moves.len()];
    let mut pending = vec![root];
    while let Some(t) = pending.pop() {
        if let Some(i) = producer[t] {
            if !removed[i] {
                removed[i] = true;
                pending.extend(consumed[i]);
            }
        }
    }
    Ok(moves.iter().zip(removed).filter(|(_, r)| !r).map(|(m, _)| *m).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutAnalysis {
    pub coordinate: u32,
    /// How far the bottom half falls short of good (0 when both halves are good).
    pub delta: u64,
    /// True when the bit-1 half was deficient and therefore plays the bottom.
    pub oriented: bool,
    /// Half configurations on `Q^(d-1)`, in local indices.
    pub top_config: Configuration,
    pub bottom_config: Configuration,
}

impl CutAnalysis {
    /// Bit value of the half that plays the top.
    fn top_bit(&self) -> bool {
        !self.oriented
    }
}

/// Both halves of the cut along `j`, oriented so the deficient half (if any)
/// is the bottom.
pub fn analyze_cut(d: u32, c: &Configuration, j: u32) -> Result<CutAnalysis> {
    if c.len() != 1usize << d {
        return Err(Error::InvalidConfiguration("configuration does not match the cube".into()));
    }
    let cut = CubeCut::new(d, j)?;
    let half = |bit: bool| {
        let verts = if bit { &cut.top } else { &cut.bottom };
        Configuration::new(verts.iter().map(|&v| c.get(v)).collect())
    };
    let (ones, zeros) = (half(true), half(false));
    let deficit = |h: &Configuration| -> Result<i64> {
        Ok(good_threshold(d - 1, h.support_size())? - h.size() as i64)
    };
    let (def1, def0) = (deficit(&ones)?, deficit(&zeros)?);
    let (oriented, delta) = if def1 > 0 {
        (true, def1)
    } else {
        (false, def0.max(0))
    };
    let (top_config, bottom_config) = if oriented { (zeros, ones) } else { (ones, zeros) };
    Ok(CutAnalysis { coordinate: j, delta: delta as u64, oriented, top_config, bottom_config })
}

/// Parity residual: 0 on empties, 1 on odd counts, 2 on positive even counts.
pub fn parity_residual(c: &Configuration) -> Configuration {
    Configuration::new(
        c.counts()
            .iter()
            .map(|&k| match k {
                0 => 0,
                k if k % 2 == 1 => 1,
                _ => 2,
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutTransfer {
    pub cut: CutAnalysis,
    pub residual: Configuration,
    pub surplus: Configuration,
    /// Cross-cut steps in the indices of the full cube.
    pub transfers: MoveSequence,
    pub top_next: Configuration,
    pub bottom_next: Configuration,
}

/// Picks a cut with both halves good if one exists, else the cut with the
/// smallest deficiency (lowest coordinate on ties), and moves that many
/// pebbles across from the top half's even surplus, largest surplus first.
/// Both resulting halves are good on `Q^(d-1)`.
pub fn cut_and_transfer(d: u32, c: &Configuration) -> Result<CutTransfer> {
    if d < 4 {
        return Err(Error::InvalidParameter(format!("cut transfer needs d >= 4, got {d}")));
    }
    require_sharp(d, c)?;
    if c.support_size() < 2 {
        return Err(Error::InvalidConfiguration("cut transfer needs at least two occupied vertices".into()));
    }
    let mut best: Option<CutAnalysis> = None;
    for j in 0..d {
        let a = analyze_cut(d, c, j)?;
        if best.as_ref().is_none_or(|b| a.delta < b.delta) {
            best = Some(a);
        }
    }
    let cut = best.expect("d >= 4");
    let limit = pow3(d - 1)? - 1;
    if cut.delta > limit {
        return Err(Error::Internal(format!("deficiency {} exceeds {limit}", cut.delta)));
    }

    let geometry = CubeCut::new(d, cut.coordinate)?;
    let residual = parity_residual(&cut.top_config);
    let surplus_counts: Vec<u32> = cut
        .top_config
        .counts()
        .iter()
        .zip(residual.counts())
        .map(|(&c, &r)| c - r)
        .collect();
    let surplus = Configuration::new(surplus_counts.clone());

    let mut remaining = surplus_counts;
    let mut top_next = cut.top_config.counts().to_vec();
    let mut bottom_next = cut.bottom_config.counts().to_vec();
    let mut transfers = Vec::with_capacity(cut.delta as usize);
    for _ in 0..cut.delta {
        let x = (0..remaining.len())
            .filter(|&x| remaining[x] >= 2)
            .max_by_key(|&x| (remaining[x], std::cmp::Reverse(x)))
            .ok_or_else(|| Error::Internal("top surplus exhausted before the deficiency was met".into()))?;
        remaining[x] -= 2;
        top_next[x] -= 2;
        bottom_next[x] += 1;
        let from = geometry.from_local(x, cut.top_bit());
        transfers.push(PebbleMove::tagged(from, geometry.mirror(from), BranchTag::CutTransfer));
    }
    let top_next = Configuration::new(top_next);
    let bottom_next = Configuration::new(bottom_next);
    if !is_good(d - 1, &top_next)?.good || !is_good(d - 1, &bottom_next)?.good {
        return Err(Error::Internal("a half is not good after the transfer".into()));
    }
    Ok(CutTransfer { cut, residual, surplus, transfers: MoveSequence::new(transfers), top_next, bottom_next })
}

/// Exhaustive search on `Q^d`, `d <= 3`.
pub fn base_case_solver(d: u32, c: &Configuration) -> Result<MoveSequence> {
    base_case_with(d, c, SearchBudget::default())
}

fn base_case_with(d: u32, c: &Configuration, budget: SearchBudget) -> Result<MoveSequence> {
    if d > 3 {
        return Err(Error::InvalidParameter(format!("base case covers d <= 3, got {d}")));
    }
    if !is_good(d, c)?.good {
        return Err(Error::InvalidConfiguration("base case needs a good configuration".into()));
    }
    let r = decider::is_coverable(cube(d)?, c, budget)?;
    match r.verdict {
        Verdict::Coverable => Ok(r
            .witness
            .unwrap_or_default()
            .into_iter()
            .map(|m| PebbleMove::tagged(m.from, m.to, BranchTag::BaseSearch))
            .collect()),
        Verdict::NotCoverable => Err(Error::Internal(format!("search refuted a good configuration on Q^{d}: {c}"))),
        Verdict::BudgetExceeded => Err(Error::BudgetExceeded),
    }
}

/// Builds and verifies a cover sequence for `c` on `Q^d`. Inputs that are
/// not good are handed straight to the decider.
pub fn cover_strategy(d: u32, c: &Configuration) -> Result<StrategyTrace> {
    cover_strategy_with(d, c, StrategyOptions::default())
}

pub fn cover_strategy_with(d: u32, c: &Configuration, options: StrategyOptions) -> Result<StrategyTrace> {
    let g = cube(d)?;
    let goodness = is_good(d, c)?;
    let mut log = Log::default();
    let moves = if goodness.good {
        solve(d, c.clone(), 0, &options, &mut log)?
    } else {
        let r = decider::is_coverable(g, c, options.fallback_budget)?;
        match r.verdict {
            Verdict::NotCoverable => return Err(Error::NotCoverable),
            Verdict::BudgetExceeded => return Err(Error::BudgetExceeded),
            Verdict::Coverable => {}
        }
        let moves = r.witness.unwrap_or_default().moves;
        let mut rec = BranchRecord::new(BranchKind::SearchWitness, d, 0, c);
        rec.moves = moves.len();
        log.branches.push(rec);
        log.fallback_count += 1;
        moves
    };
    let moves = MoveSequence::new(moves);
    let check = verify_cover_sequence(g, c, &moves)
        .map_err(|e| Error::Internal(format!("strategy emitted an illegal sequence: {e}")))?;
    if !check.is_cover {
        return Err(Error::Internal("strategy sequence does not reach a cover".into()));
    }
    Ok(StrategyTrace {
        dimension: d,
        initial: c.clone(),
        moves,
        branches: log.branches,
        fallback_count: log.fallback_count,
        verified: true,
    })
}

#[derive(Default)]
struct Log {
    branches: Vec<BranchRecord>,
    fallback_count: usize,
}

fn solve(d: u32, mut c: Configuration, depth: u32, options: &StrategyOptions, log: &mut Log) -> Result<Vec<PebbleMove>> {
    let g = cube(d)?;
    let mut moves = Vec::new();
    loop {
        if c.is_cover() {
            log.branches.push(BranchRecord::new(BranchKind::AlreadyCover, d, depth, &c));
            return Ok(moves);
        }
        if !is_good(d, &c)?.sharp {
            let trimmed = trim_to_sharp(d, &c)?;
            let mut rec = BranchRecord::new(BranchKind::TrimToSharp, d, depth, &c);
            rec.size = trimmed.set_aside.size();
            log.branches.push(rec);
            c = trimmed.sharp;
        }
        if let Some(step) = find_open_step(g, &c) {
            let mut rec = BranchRecord::new(BranchKind::OpenStep, d, depth, &c);
            rec.moves = 1;
            log.branches.push(rec);
            moves.push(step.step);
            c = step.next;
            continue;
        }

        let large = large_vertices(&c);
        if large.len() == 1 && is_closed(g, &c) {
            let seq = single_large_reduction(d, &c)?;
            let mut rec = BranchRecord::new(BranchKind::SingleLarge, d, depth, &c);
            rec.moves = seq.len();
            log.branches.push(rec);
            moves.extend(seq);
            return Ok(moves);
        }

        if d <= 3 {
            let seq = base_case_with(d, &c, options.base_budget)?;
            let mut rec = BranchRecord::new(BranchKind::BaseSearch, d, depth, &c);
            rec.moves = seq.len();
            log.branches.push(rec);
            moves.extend(seq);
            return Ok(moves);
        }

        if c.support_size() >= 2 {
            let ct = cut_and_transfer(d, &c)?;
            let geometry = CubeCut::new(d, ct.cut.coordinate)?;
            let mut rec = BranchRecord::new(BranchKind::CutTransfer, d, depth, &c);
            rec.coordinate = Some(ct.cut.coordinate);
            rec.delta = Some(ct.cut.delta);
            rec.oriented = Some(ct.cut.oriented);
            rec.support_top = Some(ct.cut.top_config.support_size());
            rec.support_bottom = Some(ct.cut.bottom_config.support_size());
            rec.moves = ct.transfers.len();
            log.branches.push(rec);
            moves.extend(ct.transfers.iter().copied());

            let top_bit = ct.cut.top_bit();
            let (bottom_cfg, top_cfg) = (ct.bottom_next, ct.top_next);
            let run = |cfg: Configuration| -> Result<(Vec<PebbleMove>, Log)> {
                let mut sub = Log::default();
                let m = solve(d - 1, cfg, depth + 1, options, &mut sub)?;
                Ok((m, sub))
            };
            let (bottom, top) = if options.parallel_halves && d >= 6 {
                rayon::join(|| run(bottom_cfg), || run(top_cfg))
            } else {
                (run(bottom_cfg), run(top_cfg))
            };
            for (kind, bit, result) in [(BranchKind::RecurseB, !top_bit, bottom), (BranchKind::RecurseT, top_bit, top)] {
                let (sub_moves, sub_log) = result?;
                let mut rec = BranchRecord::new(kind, d - 1, depth + 1, &c);
                rec.coordinate = Some(ct.cut.coordinate);
                rec.moves = sub_moves.len();
                log.branches.push(rec);
                log.branches.extend(sub_log.branches);
                log.fallback_count += sub_log.fallback_count;
                moves.extend(sub_moves.into_iter().map(|m| PebbleMove {
                    from: geometry.from_local(m.from, bit),
                    to: geometry.from_local(m.to, bit),
                    tag: m.tag,
                }));
            }
            return Ok(moves);
        }

        let r = decider::is_coverable(g, &c, options.fallback_budget)?;
        if r.verdict != Verdict::Coverable {
            return Err(Error::Internal(format!("fallback search failed on a good configuration: {c}")));
        }
        let seq: Vec<_> = r
            .witness
            .unwrap_or_default()
            .into_iter()
            .map(|m| PebbleMove::tagged(m.from, m.to, BranchTag::Fallback))
            .collect();
        let mut rec = BranchRecord::new(BranchKind::Fallback, d, depth, &c);
        rec.moves = seq.len();
        log.branches.push(rec);
        log.fallback_count += 1;
        moves.extend(seq);
        return Ok(moves);
    }
}

/// A random good configuration: uniform support size, random support,
/// sharp half of the time and otherwise up to `2^d` pebbles over sharp,
/// with pebbles spread by random weights so some vertices run heavy.
pub fn random_good_configuration<R: Rng + ?Sized>(d: u32, rng: &mut R) -> Result<Configuration> {
    if d > MAX_STRATEGY_DIM {
        return Err(Error::UnsupportedDimension(d));
    }
    let n = 1usize << d;
    let s = rng.gen_range(1..=n);
    let support = rand::seq::index::sample(rng, n, s).into_vec();
    let extra = if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=n as u64) };
    let size = good_threshold(d, s)? as u64 + extra;
    let mut counts = vec![0u32; n];
    for &v in &support {
        counts[v] = 1;
    }
    let skew: f64 = rng.gen_range(1.0..6.0);
    let weights: Vec<f64> = support.iter().map(|_| rng.gen::<f64>().powf(skew) + 1e-9).collect();
    let pick = WeightedIndex::new(&weights).map_err(|e| Error::Internal(e.to_string()))?;
    for _ in s as u64..size {
        counts[support[pick.sample(rng)]] += 1;
    }
    Ok(Configuration::new(counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn cfg(v: &[u32]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    #[test]
    fn trivial_cover() {
        let t = cover_strategy(1, &cfg(&[1, 1])).unwrap();
        assert!(t.verified && t.moves.is_empty() && t.fallback_count == 0);
        let t = cover_strategy(0, &cfg(&[1])).unwrap();
        assert!(t.moves.is_empty());
    }

    #[test]
    fn simple_nine_on_square() {
        let t = cover_strategy(2, &Configuration::simple(4, 0, 9)).unwrap();
        assert!(t.verified);
        assert_eq!(t.fallback_count, 0);
        assert!(t.tags_consistent());
        // exactly 9 - 1 pebbles are spent: the final configuration is all ones
        assert_eq!(t.moves.len(), 5);
    }

    #[test]
    fn two_large_vertices_on_q4_uses_a_cut() {
        let mut c = vec![0u32; 16];
        c[0b0000] = 34;
        c[0b1111] = 30;
        for j in 0..4 {
            c[1 << j] = 1;
            c[0b1111 ^ (1 << j)] = 1;
        }
        let c = cfg(&c);
        assert_eq!(c.size(), 72);
        assert!(is_good(4, &c).unwrap().sharp);
        let t = cover_strategy(4, &c).unwrap();
        assert!(t.verified);
        assert_eq!(t.fallback_count, 0);
        assert!(t.took(BranchKind::CutTransfer));
        assert!(t.tags_consistent());
    }

    #[test]
    fn trim_examples() {
        let t = trim_to_sharp(2, &Configuration::simple(4, 0, 10)).unwrap();
        assert_eq!(t.sharp, Configuration::simple(4, 0, 9));
        assert_eq!(t.set_aside, Configuration::simple(4, 0, 1));

        let t = trim_to_sharp(2, &Configuration::simple(4, 0, 9)).unwrap();
        assert_eq!(t.sharp, Configuration::simple(4, 0, 9));
        assert_eq!(t.set_aside.size(), 0);

        let mut c = vec![1u32; 8];
        c[0] = 21;
        let t = trim_to_sharp(3, &cfg(&c)).unwrap();
        assert_eq!(t.sharp.get(0), 13);
        assert_eq!(t.set_aside, Configuration::simple(8, 0, 8));

        assert!(trim_to_sharp(2, &Configuration::ones(4)).is_err());
    }

    #[test]
    fn open_step_examples() {
        let s = open_step(2, &Configuration::simple(4, 0, 9)).unwrap().unwrap();
        assert_eq!((s.step.from, s.step.to), (0, 1));
        assert_eq!(s.next.size(), 8);
        assert_eq!(s.next.support_size(), 2);
        assert!(is_good(2, &s.next).unwrap().sharp);

        // (2,1,1,1) is not sharp on Q^2 (5 != 6), and a cover has no empty neighbor
        assert!(open_step(2, &cfg(&[2, 1, 1, 1])).is_err());
        assert!(find_open_step(cube(2).unwrap(), &cfg(&[2, 1, 1, 1])).is_none());
        assert!(open_step(2, &cfg(&[2, 0, 1, 1])).is_err());
    }

    #[test]
    fn single_large_examples() {
        let c = cfg(&[5, 1, 1, 0]);
        let seq = single_large_reduction(2, &c).unwrap();
        let out = verify_cover_sequence(cube(2).unwrap(), &c, &seq).unwrap();
        assert!(out.is_cover);
        assert_eq!(out.final_config, Configuration::ones(4));
        assert!(seq.iter().all(|m| m.tag == Some(BranchTag::SingleLarge)));

        assert!(single_large_reduction(2, &cfg(&[6, 1, 1, 1])).is_err());

        let c = cfg(&[21, 1, 1, 0, 1, 0, 0, 0]);
        let seq = single_large_reduction(3, &c).unwrap();
        let out = verify_cover_sequence(cube(3).unwrap(), &c, &seq).unwrap();
        assert_eq!(out.final_config, Configuration::ones(8));
    }

    #[test]
    fn single_large_with_trades() {
        // Q^4, L = 0 with all four neighbors and two far ones
        let mut c = vec![0u32; 16];
        for j in 0..4 {
            c[1 << j] = 1;
        }
        c[0b0111] = 1;
        c[0b1111] = 1;
        let support = 7u32;
        c[0] = (81 - support + 1) - (support - 1);
        let c = cfg(&c);
        assert!(is_good(4, &c).unwrap().sharp);
        let seq = single_large_reduction(4, &c).unwrap();
        let out = verify_cover_sequence(cube(4).unwrap(), &c, &seq).unwrap();
        assert!(out.is_cover);
    }

    #[test]
    fn residual_arithmetic() {
        let c = cfg(&[5, 4, 1, 0]);
        assert_eq!(parity_residual(&c), cfg(&[1, 2, 1, 0]));
    }

    #[test]
    fn cut_transfer_postconditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = 0;
        while seen < 200 {
            let c = random_good_configuration(5, &mut rng).unwrap();
            let sharp = trim_to_sharp(5, &c).unwrap().sharp;
            if sharp.support_size() < 2 {
                continue;
            }
            seen += 1;
            let ct = cut_and_transfer(5, &sharp).unwrap();
            let top = &ct.cut.top_config;
            assert!(top.dominates(&ct.residual));
            assert_eq!(top.support(), ct.residual.support());
            assert!(ct.surplus.counts().iter().all(|k| k % 2 == 0));
            assert_eq!(ct.transfers.len() as u64, ct.cut.delta);
            assert_eq!(ct.top_next.support(), top.support());
            assert!(ct.top_next.dominates(&ct.residual));
            // size identity on the oriented cut
            let thr = |h: &Configuration| 81 - h.support_size() as i64 + 1;
            if ct.cut.delta > 0 {
                let bottom = &ct.cut.bottom_config;
                assert_eq!(bottom.size() as i64, thr(bottom) - ct.cut.delta as i64);
                assert_eq!(top.size() as i64, thr(top) + 81 + ct.cut.delta as i64 - 1);
            }
        }
    }

    #[test]
    fn non_good_inputs_use_search() {
        let q2 = cube(2).unwrap();
        let c = cfg(&[3, 3, 0, 0]);
        assert!(!is_good(2, &c).unwrap().good);
        let t = cover_strategy(2, &c).unwrap();
        assert!(t.verified);
        assert_eq!(t.fallback_count, 1);
        assert!(verify_cover_sequence(q2, &c, &t.moves).unwrap().is_cover);
        assert_eq!(cover_strategy(2, &Configuration::simple(4, 0, 8)).unwrap_err(), Error::NotCoverable);
    }

    #[test]
    fn base_case_examples() {
        assert!(base_case_solver(0, &cfg(&[1])).unwrap().is_empty());
        let c = Configuration::simple(8, 0, 27);
        let seq = base_case_solver(3, &c).unwrap();
        assert!(seq.len() <= 26);
        assert!(verify_cover_sequence(cube(3).unwrap(), &c, &seq).unwrap().is_cover);
        assert!(base_case_solver(4, &Configuration::simple(16, 0, 81)).is_err());
    }

    #[test]
    fn random_configurations_are_good() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 0..=6 {
            for _ in 0..50 {
                let c = random_good_configuration(d, &mut rng).unwrap();
                assert!(is_good(d, &c).unwrap().good);
            }
        }
    }
}
