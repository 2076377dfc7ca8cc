//! Checkers for the simple-configuration question, the product question and
//! the 2-pebbling property, plus the general sanity chain on invariants.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::enumerate::{sweep, with_threads, Check};
use super::{
    composition_count, elapsed_ms, gamma_bruteforce, gamma_value, pi_value, InvariantReport, Method,
    SweepOptions, SweepStats, WeakCompositions, Witness,
};
use crate::decider::{self, SearchStats, Verdict};
use crate::error::{Error, Result};
use crate::graphs::{cartesian_product, is_cube_canonical, Graph};
use crate::pebbling::{simple_bound, Configuration};

/// Largest enumeration spent looking for non-simple extremal configurations.
pub const INFORMATIONAL_SCAN_LIMIT: u128 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Question {
    Q1,
    Q4,
    #[serde(rename = "two-pebbling")]
    TwoPebbling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Counterexample,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    pub method: Method,
}

impl NamedValue {
    fn from_report(name: impl Into<String>, r: &InvariantReport) -> NamedValue {
        let value = if r.method == Method::BoundOnly { None } else { r.integer() };
        NamedValue { name: name.into(), value, method: r.method }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub values: Vec<NamedValue>,
    /// Re-verifiable refutation: a configuration that cannot be covered, or
    /// that cannot put the required pebbles on `target`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Witness>,
    /// Non-simple non-coverable configuration of size `gamma - 1`, if one
    /// was found. Informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub non_simple_extremal: Option<Configuration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub question: Question,
    pub graphs: Vec<String>,
    pub outcome: Outcome,
    pub certificate: Certificate,
    pub stats: SweepStats,
    pub elapsed_ms: u64,
}

impl ConjectureReport {
    fn new(question: Question, graphs: Vec<String>) -> ConjectureReport {
        ConjectureReport {
            question,
            graphs,
            outcome: Outcome::Holds,
            certificate: Certificate { values: Vec::new(), counterexample: None, non_simple_extremal: None },
            stats: SweepStats::default(),
            elapsed_ms: 0,
        }
    }

    fn finish(mut self, start: Instant) -> ConjectureReport {
        self.elapsed_ms = elapsed_ms(start);
        self
    }
}

/// Tests whether `gamma(g)` equals the simple bound and whether the simple
/// configuration one short of it at the argmax vertex is non-coverable.
pub fn check_simple_conjecture(g: &Graph, opts: &SweepOptions) -> Result<ConjectureReport> {
    let start = Instant::now();
    let mut report = ConjectureReport::new(Question::Q1, vec![g.label()]);
    let sb = simple_bound(g)?;
    let gamma = gamma_bruteforce(g, opts)?;
    report.stats += gamma.stats;
    report.certificate.values.push(NamedValue::from_report("gamma", &gamma));
    report.certificate.values.push(NamedValue { name: "simple_bound".into(), value: Some(sb.value), method: Method::Formula });
    let Some(value) = gamma.integer().filter(|_| gamma.method == Method::Bruteforce) else {
        report.outcome = Outcome::BudgetExceeded;
        return Ok(report.finish(start));
    };

    let simple = Configuration::simple(g.vertex_count(), sb.argmax, (sb.value - 1) as u32);
    let r = decider::is_coverable(g, &simple, opts.budget)?;
    report.stats.decider += r.stats;
    match r.verdict {
        Verdict::BudgetExceeded => {
            report.outcome = Outcome::BudgetExceeded;
            return Ok(report.finish(start));
        }
        Verdict::Coverable => {
            report.outcome = Outcome::Counterexample;
            return Ok(report.finish(start));
        }
        Verdict::NotCoverable => {}
    }
    if value != sb.value {
        report.outcome = Outcome::Counterexample;
        report.certificate.counterexample = gamma.witness;
        return Ok(report.finish(start));
    }

    let (found, stats) = non_simple_extremal(g, value - 1, opts)?;
    report.stats += stats;
    report.certificate.non_simple_extremal = found;
    Ok(report.finish(start))
}

/// First non-simple non-coverable configuration of the given size, skipped
/// when the level is too large to scan.
fn non_simple_extremal(g: &Graph, size: u64, opts: &SweepOptions) -> Result<(Option<Configuration>, SweepStats)> {
    let n = g.vertex_count();
    if composition_count(size, n) > INFORMATIONAL_SCAN_LIMIT.min(opts.max_configurations) {
        return Ok((None, SweepStats::default()));
    }
    let symmetric = super::canonical_dimension(g, opts);
    let budget = opts.budget;
    let out = with_threads(opts.threads, || {
        sweep(WeakCompositions::new(size as u32, n), opts.chunk_size, |counts| {
            if counts.iter().filter(|&&x| x > 0).count() < 2 {
                return Ok((Check::Holds, SearchStats::default()));
            }
            if let Some(d) = symmetric {
                if !is_cube_canonical(d, counts)? {
                    return Ok((Check::Skipped, SearchStats::default()));
                }
            }
            let c = Configuration::new(counts.to_vec());
            let r = decider::is_coverable(g, &c, budget)?;
            let check = match r.verdict {
                Verdict::NotCoverable => Check::Fails(c),
                Verdict::Coverable => Check::Holds,
                Verdict::BudgetExceeded => Check::Budget,
            };
            Ok((check, r.stats))
        })
    })??;
    Ok((out.counterexample, out.stats))
}

/// Compares `gamma(g □ h)` with `gamma(g) * gamma(h)`.
pub fn check_product_conjecture(g: &Graph, h: &Graph, opts: &SweepOptions) -> Result<ConjectureReport> {
    let start = Instant::now();
    let gh = cartesian_product(g, h)?;
    let mut report = ConjectureReport::new(Question::Q4, vec![g.label(), h.label(), gh.label()]);
    let mut values = Vec::with_capacity(3);
    for (name, graph) in [("gamma_g", g), ("gamma_h", h), ("gamma_product", &gh)] {
        let r = gamma_value(graph, opts)?;
        report.stats += r.stats;
        report.certificate.values.push(NamedValue::from_report(name, &r));
        values.push(r);
    }
    let ints: Vec<Option<u64>> = report.certificate.values.iter().map(|v| v.value).collect();
    let (Some(a), Some(b), Some(p)) = (ints[0], ints[1], ints[2]) else {
        report.outcome = Outcome::BudgetExceeded;
        return Ok(report.finish(start));
    };
    if p > a.saturating_mul(b) {
        report.outcome = Outcome::Counterexample;
        report.certificate.counterexample = values.pop().and_then(|r| r.witness);
    }
    Ok(report.finish(start))
}

/// Configurations with support exactly `support` and the given size.
fn with_support(n: usize, support: Vec<usize>, size: u32) -> impl Iterator<Item = Vec<u32>> {
    let extra = size - support.len() as u32;
    WeakCompositions::new(extra, support.len()).map(move |parts| {
        let mut counts = vec![0; n];
        for (&v, p) in support.iter().zip(parts) {
            counts[v] = p + 1;
        }
        counts
    })
}

/// Checks that every configuration with `|C| >= 2 pi - |support| + 1` can
/// put two pebbles on any target. By monotonicity only the smallest such
/// configurations on each exact support need to be tried.
pub fn check_two_pebbling(g: &Graph, opts: &SweepOptions) -> Result<ConjectureReport> {
    let start = Instant::now();
    let n = g.vertex_count();
    let mut report = ConjectureReport::new(Question::TwoPebbling, vec![g.label()]);
    let pi = pi_value(g, opts)?;
    report.stats += pi.stats;
    report.certificate.values.push(NamedValue::from_report("pi", &pi));
    let Some(pi) = pi.integer().filter(|_| pi.method != Method::BoundOnly) else {
        report.outcome = Outcome::BudgetExceeded;
        return Ok(report.finish(start));
    };
    if n >= 32 {
        return Err(Error::ResourceLimit(format!("{n} vertices: too many supports to enumerate")));
    }

    let minimal = |s: usize| (2 * pi + 1).saturating_sub(s as u64).max(s as u64);
    let mut total: u128 = 0;
    for mask in 1u32..(1 << n) {
        let s = mask.count_ones() as usize;
        total = total.saturating_add(composition_count(minimal(s) - s as u64, s));
    }
    if total > opts.max_configurations {
        report.outcome = Outcome::BudgetExceeded;
        return Ok(report.finish(start));
    }

    let items = (1u32..(1 << n)).flat_map(move |mask| {
        let support: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let size = minimal(support.len()) as u32;
        with_support(n, support, size)
    });
    let budget = opts.budget;
    let out = with_threads(opts.threads, || {
        sweep(items, opts.chunk_size, |counts| {
            let c = Configuration::new(counts.to_vec());
            let mut stats = SearchStats::default();
            for t in 0..n {
                let r = decider::can_reach(g, &c, t, 2, budget)?;
                stats += r.stats;
                match r.verdict {
                    Verdict::Coverable => {}
                    Verdict::NotCoverable => {
                        return Ok((Check::Fails(Witness { configuration: c, target: Some(t) }), stats))
                    }
                    Verdict::BudgetExceeded => return Ok((Check::Budget, stats)),
                }
            }
            Ok((Check::Holds, stats))
        })
    })??;
    report.stats += out.stats;
    if let Some(w) = out.counterexample {
        report.outcome = Outcome::Counterexample;
        report.certificate.counterexample = Some(w);
    } else if out.budget_hit {
        report.outcome = Outcome::BudgetExceeded;
    }
    Ok(report.finish(start))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SanityReport {
    pub graph: String,
    pub vertices: u64,
    pub diameter: u32,
    pub simple_bound: u64,
    pub gamma: u64,
    pub pi: u64,
    /// `n * pi`, the general upper bound on `gamma`.
    pub n_pi: u64,
}

/// Checks `simple_bound <= gamma <= n pi`, `n <= pi` and `2^diam <= pi`, and
/// `gamma <= 4^d` on cubes.
pub fn sanity_bounds(g: &Graph, opts: &SweepOptions) -> Result<SanityReport> {
    let n = g.vertex_count() as u64;
    let sb = simple_bound(g)?.value;
    let exact = |r: InvariantReport| match (r.method, r.integer()) {
        (Method::BoundOnly, _) | (_, None) => Err(Error::BudgetExceeded),
        (_, Some(v)) => Ok(v),
    };
    let gamma = exact(gamma_value(g, opts)?)?;
    let pi = exact(pi_value(g, opts)?)?;
    let n_pi = n.saturating_mul(pi);
    let far = 1u64.checked_shl(g.diameter()).unwrap_or(u64::MAX);
    let violation = |what: String| Err(Error::InvariantViolation(format!("{}: {what}", g.label())));
    if sb > gamma {
        return violation(format!("simple bound {sb} exceeds gamma {gamma}"));
    }
    if gamma > n_pi {
        return violation(format!("gamma {gamma} exceeds n*pi {n_pi}"));
    }
    if n > pi || far > pi {
        return violation(format!("pi {pi} below max(n, 2^diam) = {}", n.max(far)));
    }
    if let Some(d) = g.cube_dimension() {
        if gamma > 4u64.saturating_pow(d) {
            return violation(format!("gamma {gamma} exceeds 4^{d}"));
        }
    }
    Ok(SanityReport { graph: g.label(), vertices: n, diameter: g.diameter(), simple_bound: sb, gamma, pi, n_pi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_complete, build_hypercube, build_path};

    fn opts() -> SweepOptions {
        SweepOptions::default()
    }

    #[test]
    fn simple_question_small_graphs() {
        for g in [build_hypercube(2).unwrap(), build_path(3).unwrap(), build_complete(3).unwrap()] {
            let r = check_simple_conjecture(&g, &opts()).unwrap();
            assert_eq!(r.outcome, Outcome::Holds, "{}", g.label());
            assert_eq!(r.certificate.values[0].value, r.certificate.values[1].value);
        }
    }

    #[test]
    fn product_question_examples() {
        let q1 = build_hypercube(1).unwrap();
        let r = check_product_conjecture(&q1, &q1, &opts()).unwrap();
        assert_eq!(r.outcome, Outcome::Holds);
        let vals: Vec<_> = r.certificate.values.iter().map(|v| v.value.unwrap()).collect();
        assert_eq!(vals, vec![3, 3, 9]);
        assert!(r.certificate.values.iter().all(|v| v.method == Method::Formula));

        let p2 = build_path(2).unwrap();
        let r = check_product_conjecture(&p2, &build_path(3).unwrap(), &opts()).unwrap();
        assert_eq!(r.outcome, Outcome::Holds);
        let vals: Vec<_> = r.certificate.values.iter().map(|v| v.value.unwrap()).collect();
        assert_eq!(vals, vec![3, 7, 21]);
        assert_eq!(r.certificate.values[2].method, Method::Bruteforce);
    }

    #[test]
    fn two_pebbling_small() {
        for g in [build_hypercube(1).unwrap(), build_hypercube(2).unwrap(), build_complete(3).unwrap()] {
            let r = check_two_pebbling(&g, &opts()).unwrap();
            assert_eq!(r.outcome, Outcome::Holds, "{}", g.label());
            assert!(r.stats.decided > 0);
        }
    }

    #[test]
    fn two_pebbling_enumerates_every_support() {
        // Q^1, pi = 2: supports {0},{1} need 4 pebbles, {0,1} needs 3
        let got: Vec<_> = (1u32..4)
            .flat_map(|mask| {
                let support: Vec<usize> = (0..2).filter(|&v| mask >> v & 1 == 1).collect();
                let size = (5 - support.len() as u32).max(support.len() as u32);
                with_support(2, support, size)
            })
            .collect();
        assert_eq!(got, vec![vec![4, 0], vec![0, 4], vec![2, 1], vec![1, 2]]);
    }

    #[test]
    fn sanity_examples() {
        let r = sanity_bounds(&build_hypercube(2).unwrap(), &opts()).unwrap();
        assert_eq!((r.gamma, r.n_pi), (9, 16));
        let r = sanity_bounds(&build_hypercube(3).unwrap(), &opts()).unwrap();
        assert_eq!((r.gamma, r.n_pi), (27, 64));
        let r = sanity_bounds(&build_path(3).unwrap(), &opts()).unwrap();
        assert_eq!((r.gamma, r.n_pi), (7, 12));
    }
}
