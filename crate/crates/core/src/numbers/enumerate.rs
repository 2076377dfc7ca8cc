//! Weak compositions and the chunked parallel sweep used by the brute-force
//! invariants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decider::SearchStats;
use crate::error::{Error, Result};

/// Number of weak compositions of `total` into `parts` parts,
/// `C(total + parts - 1, parts - 1)`, saturating at `u128::MAX`.
pub fn composition_count(total: u64, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let k = (parts - 1) as u128;
    let top = u128::from(total) + k;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (top - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul(top - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Advances `parts` to the next weak composition with the same sum in
/// colexicographic order. Returns `false` after the last one.
pub fn next_composition(parts: &mut [u32]) -> bool {
    let Some(i) = parts.iter().position(|&p| p > 0) else {
        return false;
    };
    if i + 1 == parts.len() {
        return false;
    }
    let t = parts[i];
    parts[i] = 0;
    parts[0] = t - 1;
    parts[i + 1] += 1;
    true
}

/// All weak compositions of `total` into `parts` parts, colex order,
/// starting from `(total, 0, ..., 0)`.
#[derive(Debug, Clone)]
pub struct WeakCompositions {
    current: Vec<u32>,
    done: bool,
}

impl WeakCompositions {
    pub fn new(total: u32, parts: usize) -> WeakCompositions {
        let mut current = vec![0; parts];
        if let Some(first) = current.first_mut() {
            *first = total;
        }
        WeakCompositions { current, done: parts == 0 && total > 0 }
    }
}

impl Iterator for WeakCompositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !next_composition(&mut self.current);
        Some(out)
    }
}

/// Work counters reported by every sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    /// Configurations generated.
    pub enumerated: u64,
    /// Configurations actually decided (after symmetry reduction).
    pub decided: u64,
    pub skipped_noncanonical: u64,
    pub decider: SearchStats,
}

impl std::ops::AddAssign for SweepStats {
    fn add_assign(&mut self, o: SweepStats) {
        self.enumerated += o.enumerated;
        self.decided += o.decided;
        self.skipped_noncanonical += o.skipped_noncanonical;
        self.decider += o.decider;
    }
}

/// Result of checking one configuration.
pub(crate) enum Check<T> {
    Holds,
    Skipped,
    Fails(T),
    Budget,
}

pub(crate) struct SweepOutcome<T> {
    /// First failing item in enumeration order.
    pub counterexample: Option<T>,
    pub budget_hit: bool,
    pub stats: SweepStats,
}

/// Runs `check` over `items` in fixed-size chunks. Each chunk is evaluated
/// completely in parallel and scanned in order, so the reported
/// counterexample and the counters do not depend on the thread count.
pub(crate) fn sweep<I, T, F>(items: I, chunk_size: usize, check: F) -> Result<SweepOutcome<T>>
where
    I: Iterator<Item = Vec<u32>>,
    T: Send,
    F: Fn(&[u32]) -> Result<(Check<T>, SearchStats)> + Sync,
{
    let mut items = items.peekable();
    let mut stats = SweepStats::default();
    let mut budget_hit = false;
    while items.peek().is_some() {
        let chunk: Vec<Vec<u32>> = items.by_ref().take(chunk_size.max(1)).collect();
        let results: Vec<Result<(Check<T>, SearchStats)>> = chunk.par_iter().map(|c| check(c)).collect();
        let mut found = None;
        for r in results {
            let (outcome, s) = r?;
            stats.enumerated += 1;
            stats.decider += s;
            match outcome {
                Check::Skipped => stats.skipped_noncanonical += 1,
                Check::Holds => stats.decided += 1,
                Check::Budget => {
                    stats.decided += 1;
                    budget_hit = true;
                }
                Check::Fails(t) => {
                    stats.decided += 1;
                    if found.is_none() {
                        found = Some(t);
                    }
                }
            }
        }
        if found.is_some() {
            return Ok(SweepOutcome { counterexample: found, budget_hit, stats });
        }
    }
    Ok(SweepOutcome { counterexample: None, budget_hit, stats })
}

/// Runs `f` on a dedicated pool when a thread count is given.
pub(crate) fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_by_pascal(n: usize, k: usize) -> u128 {
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k]
    }

    #[test]
    fn counts_match_closed_form() {
        for parts in 1..=6usize {
            for total in 0..=10u32 {
                let listed = WeakCompositions::new(total, parts).count() as u128;
                assert_eq!(listed, composition_count(u64::from(total), parts));
                assert_eq!(listed, binomial_by_pascal(total as usize + parts - 1, parts - 1));
            }
        }
        assert_eq!(composition_count(27, 8), 5_379_616);
        assert_eq!(composition_count(7, 3), 36);
    }

    #[test]
    fn colex_order_and_distinctness() {
        let all: Vec<_> = WeakCompositions::new(3, 3).collect();
        assert_eq!(all[0], vec![3, 0, 0]);
        assert_eq!(all[1], vec![2, 1, 0]);
        assert_eq!(all.last().unwrap(), &vec![0, 0, 3]);
        let key = |v: &Vec<u32>| v.iter().rev().copied().collect::<Vec<_>>();
        assert!(all.windows(2).all(|w| key(&w[0]) < key(&w[1])));
        assert!(all.iter().all(|v| v.iter().sum::<u32>() == 3));
    }

    #[test]
    fn degenerate_shapes() {
        assert_eq!(WeakCompositions::new(0, 3).collect::<Vec<_>>(), vec![vec![0, 0, 0]]);
        assert_eq!(WeakCompositions::new(4, 1).collect::<Vec<_>>(), vec![vec![4]]);
        assert_eq!(WeakCompositions::new(2, 0).count(), 0);
    }

    #[test]
    fn sweep_reports_first_failure_in_order() {
        for chunk in [1, 3, 100] {
            let out = sweep(WeakCompositions::new(4, 3), chunk, |c| {
                let check = if c[2] >= 2 { Check::Fails(c.to_vec()) } else { Check::Holds };
                Ok((check, SearchStats::default()))
            })
            .unwrap();
            assert_eq!(out.counterexample, Some(vec![2, 0, 2]));
        }
    }
}
