//! Pebbling invariants: the cover pebbling number `gamma`, the pebbling
//! number `pi`, the cover ratio `rho = gamma / pi`, and checkers for the
//! simple-configuration question, the product question and the 2-pebbling
//! property.
//!
//! Brute force decides a single level `N`: every configuration of size `N`
//! is tried. Coverability is monotone under adding pebbles, so if every
//! size-`N` configuration passes and some size-`(N-1)` one fails, the
//! invariant is `N`.

mod conjectures;
mod enumerate;

use std::time::Instant;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::decider::{self, SearchBudget, SearchStats, Verdict};
use crate::error::{Error, Result};
use crate::graphs::{cube_canonical, is_cube_canonical, Family, Graph};
use crate::pebbling::{pow3, simple_bound, Configuration};

pub use conjectures::{
    check_product_conjecture, check_simple_conjecture, check_two_pebbling, sanity_bounds, Certificate,
    ConjectureReport, NamedValue, Outcome, Question, SanityReport,
};
pub use enumerate::{composition_count, next_composition, SweepStats, WeakCompositions};

use enumerate::{sweep, with_threads, Check};

/// Largest cube dimension enumerated through orbit representatives.
pub const SYMMETRY_MAX_DIM: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Budget for each individual decider call.
    pub budget: SearchBudget,
    /// Refuse levels with more configurations than this.
    pub max_configurations: u128,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub chunk_size: usize,
    /// Enumerate orbit representatives on cubes of dimension <= 3.
    pub use_symmetry: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            budget: SearchBudget::new(2_000_000, 1_000_000),
            max_configurations: 50_000_000,
            threads: None,
            chunk_size: 8192,
            use_symmetry: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Invariant {
    Gamma,
    Pi,
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Formula,
    Bruteforce,
    BoundOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InvariantValue {
    Integer(u64),
    Rational { numerator: u64, denominator: u64 },
}

impl InvariantValue {
    pub fn as_integer(&self) -> Option<u64> {
        match self {
            InvariantValue::Integer(v) => Some(*v),
            InvariantValue::Rational { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<u64>,
}

/// An extremal configuration: non-coverable (for `gamma`) or unable to
/// reach `target` (for `pi`), of size one less than the reported value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub configuration: Configuration,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub graph: String,
    pub invariant: Invariant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<InvariantValue>,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    /// Set when the value rests on the simple-configuration formula rather
    /// than a proof or a computation.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub conjectured: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub stats: SweepStats,
    pub elapsed_ms: u64,
}

impl InvariantReport {
    fn new(g_label: String, invariant: Invariant, method: Method) -> InvariantReport {
        InvariantReport {
            graph: g_label,
            invariant,
            value: None,
            method,
            bounds: None,
            conjectured: false,
            witness: None,
            stats: SweepStats::default(),
            elapsed_ms: 0,
        }
    }

    pub fn integer(&self) -> Option<u64> {
        self.value.and_then(|v| v.as_integer())
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn pow2(e: u64) -> Result<u64> {
    u32::try_from(e)
        .ok()
        .and_then(|e| 1u64.checked_shl(e).filter(|_| e < 64))
        .ok_or_else(|| Error::ResourceLimit(format!("2^{e} overflows")))
}

/// Closed forms by family: `gamma(Q^d) = 3^d`, `pi(Q^d) = 2^d`,
/// `pi(P_n) = 2^(n-1)`, `pi(K_n) = n`. For paths and complete graphs `gamma`
/// comes back bound-only, set to the simple-configuration bound and flagged
/// as conjectured.
pub fn closed_form(family: &Family, invariant: Invariant) -> Result<InvariantReport> {
    let label = family.to_string();
    let mut r = InvariantReport::new(label.clone(), invariant, Method::Formula);
    let cube = family.cube_dimension();
    let value = match (invariant, family, cube) {
        (Invariant::Gamma, _, Some(d)) => pow3(d)?,
        (Invariant::Pi, _, Some(d)) => pow2(u64::from(d))?,
        (Invariant::Pi, Family::Path(n), None) => pow2(*n as u64 - 1)?,
        (Invariant::Pi, Family::Complete(n), None) => *n as u64,
        (Invariant::Gamma, Family::Path(n), None) => conjectured_gamma(&mut r, pow2(*n as u64)? - 1),
        (Invariant::Gamma, Family::Complete(n), None) => conjectured_gamma(&mut r, 2 * *n as u64 - 1),
        (Invariant::Rho, _, Some(d)) => {
            let rho = cube_ratio(d)?;
            r.value = Some(InvariantValue::Rational { numerator: *rho.numer(), denominator: *rho.denom() });
            return Ok(r);
        }
        _ => return Err(Error::Unsupported(format!("no closed form for {invariant:?} on {label}"))),
    };
    r.value = Some(InvariantValue::Integer(value));
    Ok(r)
}

fn conjectured_gamma(r: &mut InvariantReport, bound: u64) -> u64 {
    r.method = Method::BoundOnly;
    r.conjectured = true;
    r.bounds = Some(Bounds { lower: bound, upper: None });
    bound
}

/// Closed form for a built graph; non-cube `gamma` requests fall back to the
/// graph's simple-configuration bound, flagged as conjectured.
pub fn closed_form_for(g: &Graph, invariant: Invariant) -> Result<InvariantReport> {
    match closed_form(g.family(), invariant) {
        Err(Error::Unsupported(_)) if invariant == Invariant::Gamma => {
            let mut r = InvariantReport::new(g.label(), invariant, Method::BoundOnly);
            let v = conjectured_gamma(&mut r, simple_bound(g)?.value);
            r.value = Some(InvariantValue::Integer(v));
            Ok(r)
        }
        other => other,
    }
}

/// `(3/2)^d` as an exact ratio.
pub fn cube_ratio(d: u32) -> Result<Ratio<u64>> {
    Ok(Ratio::new(pow3(d)?, pow2(u64::from(d))?))
}

/// `n^(lg 3 - 1)` with `n = 2^d`.
pub fn cube_ratio_formula(d: u32) -> f64 {
    let n = 2f64.powi(d as i32);
    n.powf(3f64.log2() - 1.0)
}

fn canonical_dimension(g: &Graph, opts: &SweepOptions) -> Option<u32> {
    g.cube_dimension().filter(|&d| opts.use_symmetry && d <= SYMMETRY_MAX_DIM)
}

fn decide(g: &Graph, c: &Configuration, budget: SearchBudget) -> Result<(Verdict, SearchStats)> {
    let r = decider::is_coverable(g, c, budget)?;
    Ok((r.verdict, r.stats))
}

/// `gamma` by exhaustive enumeration, starting from the simple bound.
pub fn gamma_bruteforce(g: &Graph, opts: &SweepOptions) -> Result<InvariantReport> {
    let start = Instant::now();
    let n = g.vertex_count();
    let sb = simple_bound(g)?;
    let mut report = InvariantReport::new(g.label(), Invariant::Gamma, Method::Bruteforce);

    // the simple configuration one short of the bound is never coverable
    let below = Configuration::simple(n, sb.argmax, (sb.value - 1) as u32);
    let (verdict, s) = decide(g, &below, opts.budget)?;
    report.stats.decider += s;
    match verdict {
        Verdict::NotCoverable => {}
        Verdict::Coverable => {
            return Err(Error::Internal(format!("simple configuration {below} below the bound was covered")))
        }
        Verdict::BudgetExceeded => return Ok(bound_only_gamma(g, report, sb.value, start)),
    }
    let mut witness = below;
    let symmetric = canonical_dimension(g, opts);

    let mut level = sb.value;
    loop {
        if composition_count(level, n) > opts.max_configurations {
            return Ok(bound_only_gamma(g, report, level, start));
        }
        let total = u32::try_from(level).map_err(|_| Error::ResourceLimit("level too large".into()))?;
        let budget = opts.budget;
        let outcome = with_threads(opts.threads, || {
            sweep(WeakCompositions::new(total, n), opts.chunk_size, |counts| {
                if let Some(d) = symmetric {
                    if !is_cube_canonical(d, counts)? {
                        return Ok((Check::Skipped, SearchStats::default()));
                    }
                }
                let c = Configuration::new(counts.to_vec());
                let (verdict, s) = decide(g, &c, budget)?;
                let check = match verdict {
                    Verdict::Coverable => Check::Holds,
                    Verdict::NotCoverable => Check::Fails(c),
                    Verdict::BudgetExceeded => Check::Budget,
                };
                Ok((check, s))
            })
        })??;
        report.stats += outcome.stats;
        match outcome.counterexample {
            Some(c) => {
                witness = c;
                level += 1;
            }
            None if outcome.budget_hit => return Ok(bound_only_gamma(g, report, level, start)),
            None => break,
        }
    }
    report.value = Some(InvariantValue::Integer(level));
    report.witness = Some(Witness { configuration: witness, target: None });
    report.elapsed_ms = elapsed_ms(start);
    Ok(report)
}

fn bound_only_gamma(g: &Graph, mut report: InvariantReport, lower: u64, start: Instant) -> InvariantReport {
    let upper = closed_form(g.family(), Invariant::Pi)
        .ok()
        .and_then(|r| r.integer())
        .and_then(|pi| pi.checked_mul(g.vertex_count() as u64));
    report.method = Method::BoundOnly;
    report.bounds = Some(Bounds { lower, upper });
    report.elapsed_ms = elapsed_ms(start);
    report
}

/// Lower bound `max(n, 2^diam)` together with a configuration one pebble
/// short of it that cannot reach its target.
fn pi_seed(g: &Graph) -> Result<(u64, Witness)> {
    let n = g.vertex_count();
    let diam = g.diameter();
    let far = pow2(u64::from(diam))?;
    if far >= n as u64 {
        let (u, v) = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .find(|&(u, v)| g.distance(u, v) == diam)
            .expect("diameter is attained");
        let configuration = Configuration::simple(n, u, (far - 1) as u32);
        Ok((far, Witness { configuration, target: Some(v) }))
    } else {
        let mut configuration = Configuration::ones(n);
        configuration.counts_mut()[0] = 0;
        Ok((n as u64, Witness { configuration, target: Some(0) }))
    }
}

/// `pi` by exhaustive enumeration, starting from `max(n, 2^diam)`.
pub fn pi_bruteforce(g: &Graph, opts: &SweepOptions) -> Result<InvariantReport> {
    let start = Instant::now();
    let n = g.vertex_count();
    let mut report = InvariantReport::new(g.label(), Invariant::Pi, Method::Bruteforce);
    let (mut level, mut witness) = pi_seed(g)?;

    let target = witness.target.expect("seed has a target");
    let r = decider::can_reach(g, &witness.configuration, target, 1, opts.budget)?;
    report.stats.decider += r.stats;
    match r.verdict {
        Verdict::NotCoverable => {}
        Verdict::Coverable => return Err(Error::Internal("pi seed witness reaches its target".into())),
        Verdict::BudgetExceeded => return Ok(bound_only(report, level, start)),
    }

    loop {
        if composition_count(level, n) > opts.max_configurations {
            return Ok(bound_only(report, level, start));
        }
        let total = u32::try_from(level).map_err(|_| Error::ResourceLimit("level too large".into()))?;
        let budget = opts.budget;
        let outcome = with_threads(opts.threads, || {
            sweep(WeakCompositions::new(total, n), opts.chunk_size, |counts| {
                let c = Configuration::new(counts.to_vec());
                let mut stats = SearchStats::default();
                for t in 0..n {
                    let r = decider::can_reach(g, &c, t, 1, budget)?;
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
        report.stats += outcome.stats;
        match outcome.counterexample {
            Some(w) => {
                witness = w;
                level += 1;
            }
            None if outcome.budget_hit => return Ok(bound_only(report, level, start)),
            None => break,
        }
    }
    report.value = Some(InvariantValue::Integer(level));
    report.witness = Some(witness);
    report.elapsed_ms = elapsed_ms(start);
    Ok(report)
}

fn bound_only(mut report: InvariantReport, lower: u64, start: Instant) -> InvariantReport {
    report.method = Method::BoundOnly;
    report.bounds = Some(Bounds { lower, upper: None });
    report.elapsed_ms = elapsed_ms(start);
    report
}

/// `gamma` from the cube formula when the graph is a hypercube, otherwise
/// by brute force.
pub fn gamma_value(g: &Graph, opts: &SweepOptions) -> Result<InvariantReport> {
    if g.cube_dimension().is_some() {
        closed_form(g.family(), Invariant::Gamma)
    } else {
        gamma_bruteforce(g, opts)
    }
}

/// `pi` from a closed form when one exists, otherwise by brute force.
pub fn pi_value(g: &Graph, opts: &SweepOptions) -> Result<InvariantReport> {
    match closed_form(g.family(), Invariant::Pi) {
        Ok(r) => Ok(r),
        Err(Error::Unsupported(_)) => pi_bruteforce(g, opts),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub graph: String,
    pub invariant: Invariant,
    pub value: InvariantValue,
    pub approx: f64,
    /// `n^(lg 3 - 1)` for hypercubes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cube_formula: Option<f64>,
    pub gamma: InvariantReport,
    pub pi: InvariantReport,
    pub elapsed_ms: u64,
}

/// `rho = gamma / pi` as a reduced fraction.
pub fn cover_ratio(g: &Graph, opts: &SweepOptions) -> Result<RatioReport> {
    let start = Instant::now();
    let gamma = gamma_value(g, opts)?;
    let pi = pi_value(g, opts)?;
    let (Some(gv), Some(pv)) = (gamma.integer(), pi.integer()) else {
        return Err(Error::BudgetExceeded);
    };
    if gamma.method == Method::BoundOnly || pi.method == Method::BoundOnly {
        return Err(Error::BudgetExceeded);
    }
    let rho = Ratio::new(gv, pv);
    Ok(RatioReport {
        graph: g.label(),
        invariant: Invariant::Rho,
        value: InvariantValue::Rational { numerator: *rho.numer(), denominator: *rho.denom() },
        approx: gv as f64 / pv as f64,
        cube_formula: g.cube_dimension().map(cube_ratio_formula),
        gamma,
        pi,
        elapsed_ms: elapsed_ms(start),
    })
}

/// Orbit representative used for symmetry-reduced enumeration, exposed for
/// tests and the CLI.
pub fn canonical_if_cube(g: &Graph, c: &Configuration) -> Result<Configuration> {
    match g.cube_dimension() {
        Some(d) if d <= SYMMETRY_MAX_DIM => cube_canonical(d, c),
        _ => Ok(c.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_complete, build_hypercube, build_path, cartesian_product};

    fn opts() -> SweepOptions {
        SweepOptions::default()
    }

    #[test]
    fn gamma_small() {
        assert_eq!(gamma_bruteforce(&build_hypercube(1).unwrap(), &opts()).unwrap().integer(), Some(3));
        let r = gamma_bruteforce(&build_hypercube(2).unwrap(), &opts()).unwrap();
        assert_eq!(r.integer(), Some(9));
        assert_eq!(r.method, Method::Bruteforce);
        assert_eq!(r.witness.unwrap().configuration, Configuration::simple(4, 0, 8));
        assert_eq!(gamma_bruteforce(&build_path(3).unwrap(), &opts()).unwrap().integer(), Some(7));
        assert_eq!(gamma_bruteforce(&build_complete(3).unwrap(), &opts()).unwrap().integer(), Some(5));
    }

    #[test]
    fn symmetry_reduction_agrees_with_full_enumeration() {
        for d in 0..=2 {
            let q = build_hypercube(d).unwrap();
            let full = gamma_bruteforce(&q, &SweepOptions { use_symmetry: false, ..opts() }).unwrap();
            let reduced = gamma_bruteforce(&q, &opts()).unwrap();
            assert_eq!(full.integer(), reduced.integer());
            assert_eq!(full.stats.skipped_noncanonical, 0);
            if d == 2 {
                assert!(reduced.stats.skipped_noncanonical > 0);
                assert!(reduced.stats.decided < full.stats.decided);
            }
        }
    }

    #[test]
    fn pi_small() {
        for (g, v) in [
            (build_complete(3).unwrap(), 3),
            (build_complete(4).unwrap(), 4),
            (build_path(3).unwrap(), 4),
            (build_path(4).unwrap(), 8),
            (build_hypercube(2).unwrap(), 4),
        ] {
            let r = pi_bruteforce(&g, &opts()).unwrap();
            assert_eq!(r.integer(), Some(v), "{}", g.label());
            let w = r.witness.unwrap();
            assert_eq!(w.configuration.size(), v - 1);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form(&Family::Cube(6), Invariant::Gamma).unwrap().integer(), Some(729));
        assert_eq!(closed_form(&Family::Cube(5), Invariant::Pi).unwrap().integer(), Some(32));
        let r = closed_form(&Family::Path(4), Invariant::Gamma).unwrap();
        assert_eq!(r.method, Method::BoundOnly);
        assert!(r.conjectured);
        assert_eq!(r.integer(), Some(15));
        assert_eq!(closed_form(&Family::Path(4), Invariant::Pi).unwrap().integer(), Some(8));
        assert_eq!(closed_form(&Family::Complete(5), Invariant::Pi).unwrap().integer(), Some(5));
        assert!(matches!(
            closed_form(&Family::File("g".into()), Invariant::Pi),
            Err(Error::Unsupported(_))
        ));
        let grid = cartesian_product(&build_path(2).unwrap(), &build_path(3).unwrap()).unwrap();
        let r = closed_form_for(&grid, Invariant::Gamma).unwrap();
        assert_eq!(r.integer(), Some(21));
        assert!(r.conjectured);
    }

    #[test]
    fn ratio_examples() {
        let q3 = build_hypercube(3).unwrap();
        let r = cover_ratio(&q3, &opts()).unwrap();
        assert_eq!(r.value, InvariantValue::Rational { numerator: 27, denominator: 8 });
        assert!((r.approx - 3.375).abs() < 1e-12);
        assert!((r.cube_formula.unwrap() - 3.375).abs() < 1e-9);

        let r = cover_ratio(&build_complete(4).unwrap(), &opts()).unwrap();
        assert_eq!(r.value, InvariantValue::Rational { numerator: 7, denominator: 4 });
        let r = cover_ratio(&build_path(3).unwrap(), &opts()).unwrap();
        assert_eq!(r.value, InvariantValue::Rational { numerator: 7, denominator: 4 });
    }

    #[test]
    fn bound_only_when_too_large() {
        let q = build_hypercube(4).unwrap();
        let r = gamma_bruteforce(&q, &SweepOptions { max_configurations: 1000, ..opts() }).unwrap();
        assert_eq!(r.method, Method::BoundOnly);
        assert_eq!(r.bounds, Some(Bounds { lower: 81, upper: Some(256) }));
        assert!(r.value.is_none());
    }

    #[test]
    fn thread_count_does_not_change_reports() {
        let g = build_path(3).unwrap();
        let one = gamma_bruteforce(&g, &SweepOptions { threads: Some(1), ..opts() }).unwrap();
        let four = gamma_bruteforce(&g, &SweepOptions { threads: Some(4), ..opts() }).unwrap();
        assert_eq!(
            InvariantReport { elapsed_ms: 0, ..one },
            InvariantReport { elapsed_ms: 0, ..four }
        );
    }
}
