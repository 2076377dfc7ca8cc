//! Pebble configurations, pebbling steps and the vocabulary built on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::Graph;

/// Pebble counts indexed by vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    counts: Vec<u32>,
}

impl Configuration {
    pub fn new(counts: Vec<u32>) -> Configuration {
        Configuration { counts }
    }

    pub fn zeros(n: usize) -> Configuration {
        Configuration { counts: vec![0; n] }
    }

    pub fn ones(n: usize) -> Configuration {
        Configuration { counts: vec![1; n] }
    }

    /// `k` pebbles on `v`, none elsewhere.
    pub fn simple(n: usize, v: usize, k: u32) -> Configuration {
        let mut counts = vec![0; n];
        counts[v] = k;
        Configuration { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.counts
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, v: usize) -> u32 {
        self.counts[v]
    }

    pub fn size(&self) -> u64 {
        self.counts.iter().map(|&k| u64::from(k)).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.counts.len()).filter(|&v| self.counts[v] > 0).collect()
    }

    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&k| k > 0).count()
    }

    pub fn is_cover(&self) -> bool {
        self.counts.iter().all(|&k| k > 0)
    }

    /// Pointwise `self >= other`.
    pub fn dominates(&self, other: &Configuration) -> bool {
        self.len() == other.len() && self.counts.iter().zip(&other.counts).all(|(a, b)| a >= b)
    }

    /// Checks that the configuration lives on `g`.
    pub fn check_host(&self, g: &Graph) -> Result<()> {
        if self.len() != g.vertex_count() {
            return Err(Error::InvalidConfiguration(format!(
                "configuration has {} entries but the graph has {} vertices",
                self.len(),
                g.vertex_count()
            )));
        }
        Ok(())
    }

    /// Parses `ones`, `simple:V:K`, or `n` whitespace-separated counts.
    pub fn parse(text: &str, n: usize) -> Result<Configuration> {
        let text = text.trim();
        if text == "ones" {
            return Ok(Configuration::ones(n));
        }
        if let Some(rest) = text.strip_prefix("simple:") {
            let (v, k) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected simple:V:K, got `{text}`")))?;
            let v: usize = v.trim().parse().map_err(|_| Error::Parse(format!("bad vertex `{v}`")))?;
            let k: u32 = k.trim().parse().map_err(|_| Error::Parse(format!("bad count `{k}`")))?;
            if v >= n {
                return Err(Error::InvalidConfiguration(format!("vertex {v} out of range for {n} vertices")));
            }
            return Ok(Configuration::simple(n, v, k));
        }
        let counts = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u32>().map_err(|_| Error::Parse(format!("`{s}` is not a pebble count"))))
            .collect::<Result<Vec<_>>>()?;
        if counts.len() != n {
            return Err(Error::InvalidConfiguration(format!(
                "expected {n} counts, got {}",
                counts.len()
            )));
        }
        Ok(Configuration { counts })
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in &self.counts {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{k}")?;
            first = false;
        }
        Ok(())
    }
}

/// Which part of a construction emitted a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BranchTag {
    OpenStep,
    SingleLarge,
    BaseSearch,
    CutTransfer,
    RecurseT,
    RecurseB,
    SearchWitness,
    Fallback,
}

impl BranchTag {
    pub const ALL: [BranchTag; 8] = [
        BranchTag::OpenStep,
        BranchTag::SingleLarge,
        BranchTag::BaseSearch,
        BranchTag::CutTransfer,
        BranchTag::RecurseT,
        BranchTag::RecurseB,
        BranchTag::SearchWitness,
        BranchTag::Fallback,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BranchTag::OpenStep => "OPEN_STEP",
            BranchTag::SingleLarge => "SINGLE_LARGE",
            BranchTag::BaseSearch => "BASE_SEARCH",
            BranchTag::CutTransfer => "CUT_TRANSFER",
            BranchTag::RecurseT => "RECURSE_T",
            BranchTag::RecurseB => "RECURSE_B",
            BranchTag::SearchWitness => "SEARCH_WITNESS",
            BranchTag::Fallback => "FALLBACK",
        }
    }
}

impl FromStr for BranchTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<BranchTag> {
        BranchTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown branch tag `{s}`")))
    }
}

/// One pebbling step: two pebbles leave `from`, one arrives at `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PebbleMove {
    pub from: usize,
    pub to: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<BranchTag>,
}

impl PebbleMove {
    pub fn new(from: usize, to: usize) -> PebbleMove {
        PebbleMove { from, to, tag: None }
    }

    pub fn tagged(from: usize, to: usize, tag: BranchTag) -> PebbleMove {
        PebbleMove { from, to, tag: Some(tag) }
    }
}

impl fmt::Display for PebbleMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)?;
        if let Some(tag) = self.tag {
            write!(f, " [{}]", tag.as_str())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoveSequence {
    pub moves: Vec<PebbleMove>,
}

impl MoveSequence {
    pub fn new(moves: Vec<PebbleMove>) -> MoveSequence {
        MoveSequence { moves }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PebbleMove> {
        self.moves.iter()
    }

    /// Parses one `FROM -> TO [TAG]` line per step; blank lines and `#`
    /// comments are skipped.
    pub fn parse(text: &str) -> Result<MoveSequence> {
        let mut moves = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected `FROM -> TO [TAG]`, got `{raw}`", i + 1));
            let (from, rest) = line.split_once("->").ok_or_else(bad)?;
            let rest = rest.trim();
            let (to, tag) = match rest.split_once('[') {
                Some((to, tag)) => {
                    let tag = tag.trim().strip_suffix(']').ok_or_else(bad)?;
                    (to.trim(), Some(tag.trim().parse::<BranchTag>()?))
                }
                None => (rest, None),
            };
            let from = from.trim().parse().map_err(|_| bad())?;
            let to = to.parse().map_err(|_| bad())?;
            moves.push(PebbleMove { from, to, tag });
        }
        Ok(MoveSequence { moves })
    }
}

impl fmt::Display for MoveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromIterator<PebbleMove> for MoveSequence {
    fn from_iter<I: IntoIterator<Item = PebbleMove>>(iter: I) -> Self {
        MoveSequence { moves: iter.into_iter().collect() }
    }
}

impl IntoIterator for MoveSequence {
    type Item = PebbleMove;
    type IntoIter = std::vec::IntoIter<PebbleMove>;

    fn into_iter(self) -> Self::IntoIter {
        self.moves.into_iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub simple: bool,
    pub cover: bool,
    pub even: bool,
    pub open: bool,
    pub closed: bool,
}

pub fn classify(c: &Configuration, g: &Graph) -> Result<Classification> {
    c.check_host(g)?;
    let counts = c.counts();
    let open = (0..counts.len())
        .any(|v| counts[v] >= 2 && g.neighbors(v).iter().any(|&w| counts[w] == 0));
    Ok(Classification {
        simple: c.support_size() == 1,
        cover: c.is_cover(),
        even: counts.iter().all(|k| k % 2 == 0),
        open,
        closed: !open,
    })
}

/// `3^d`, or an error when it does not fit in 64 bits.
pub fn pow3(d: u32) -> Result<u64> {
    3u64.checked_pow(d)
        .ok_or_else(|| Error::ResourceLimit(format!("3^{d} overflows")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goodness {
    pub good: bool,
    pub sharp: bool,
    /// `|C| - (3^d - |support| + 1)`.
    pub slack: i64,
}

/// Size threshold `3^d - s + 1` for a configuration with `s` occupied vertices.
pub fn good_threshold(d: u32, support: usize) -> Result<i64> {
    Ok(pow3(d)? as i64 - support as i64 + 1)
}

pub fn is_good(d: u32, c: &Configuration) -> Result<Goodness> {
    if d >= 32 || c.len() != 1usize << d {
        return Err(Error::InvalidConfiguration(format!(
            "configuration of length {} is not indexed by a {d}-cube",
            c.len()
        )));
    }
    let slack = c.size() as i64 - good_threshold(d, c.support_size())?;
    Ok(Goodness { good: slack >= 0, sharp: slack == 0, slack })
}

/// Applies one step in place.
pub fn apply_move_in_place(counts: &mut [u32], m: &PebbleMove, g: &Graph) -> Result<()> {
    if m.from >= counts.len() || m.to >= counts.len() || !g.is_adjacent(m.from, m.to) {
        return Err(Error::IllegalMove {
            from: m.from,
            to: m.to,
            reason: "endpoints are not adjacent".into(),
        });
    }
    if counts[m.from] < 2 {
        return Err(Error::IllegalMove {
            from: m.from,
            to: m.to,
            reason: format!("source holds {} pebble(s)", counts[m.from]),
        });
    }
    counts[m.from] -= 2;
    counts[m.to] += 1;
    Ok(())
}

pub fn apply_move(c: &Configuration, m: &PebbleMove, g: &Graph) -> Result<Configuration> {
    c.check_host(g)?;
    let mut next = c.clone();
    apply_move_in_place(&mut next.counts, m, g)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedSequence {
    #[serde(rename = "final")]
    pub final_config: Configuration,
    pub is_cover: bool,
}

/// Replays `seq` from `c`; the first illegal step aborts with its index.
pub fn verify_cover_sequence(g: &Graph, c: &Configuration, seq: &MoveSequence) -> Result<VerifiedSequence> {
    c.check_host(g)?;
    let mut counts = c.counts().to_vec();
    for (index, m) in seq.iter().enumerate() {
        apply_move_in_place(&mut counts, m, g)
            .map_err(|e| Error::VerificationFailure { index, reason: e.to_string() })?;
    }
    let final_config = Configuration::new(counts);
    let is_cover = final_config.is_cover();
    Ok(VerifiedSequence { final_config, is_cover })
}

/// `sum_x 2^dist(v, x)`: the pebbles a simple configuration on `v` needs
/// to reach every vertex. `None` on overflow.
pub fn simple_cost(g: &Graph, v: usize) -> Option<u64> {
    g.distances_from(v)
        .iter()
        .try_fold(0u64, |acc, &d| acc.checked_add(1u64.checked_shl(d).filter(|_| d < 64)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleBound {
    pub value: u64,
    pub argmax: usize,
}

/// Maximum of [`simple_cost`] over vertices, lowest index on ties.
pub fn simple_bound(g: &Graph) -> Result<SimpleBound> {
    let mut best = SimpleBound { value: 0, argmax: 0 };
    for v in 0..g.vertex_count() {
        let cost = simple_cost(g, v)
            .ok_or_else(|| Error::ResourceLimit("simple cost overflows 64 bits".into()))?;
        if cost > best.value {
            best = SimpleBound { value: cost, argmax: v };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_complete, build_hypercube, build_path};

    fn cfg(v: &[u32]) -> Configuration {
        Configuration::new(v.to_vec())
    }

    #[test]
    fn size_examples() {
        assert_eq!(Configuration::zeros(4).size(), 0);
        assert_eq!(Configuration::simple(8, 0, 27).size(), 27);
        assert_eq!(cfg(&[1, 2, 3]).size(), 6);
    }

    #[test]
    fn support_examples() {
        assert_eq!(cfg(&[0, 3, 0, 1]).support(), vec![1, 3]);
        assert_eq!(Configuration::ones(4).support(), vec![0, 1, 2, 3]);
        assert!(Configuration::zeros(4).support().is_empty());
    }

    #[test]
    fn classify_examples() {
        let q2 = build_hypercube(2).unwrap();
        let c = classify(&Configuration::simple(4, 0, 8), &q2).unwrap();
        assert!(c.simple && c.even && c.open && !c.cover && !c.closed);

        let q3 = build_hypercube(3).unwrap();
        let c = classify(&Configuration::ones(8), &q3).unwrap();
        assert!(c.cover && c.closed && !c.simple && !c.even);

        // vertex 3 is the empty one; its neighbors 1 and 2 hold one pebble each
        let c = classify(&cfg(&[2, 1, 1, 0]), &q2).unwrap();
        assert!(c.closed && !c.open);
        let c = classify(&cfg(&[1, 2, 1, 0]), &q2).unwrap();
        assert!(c.open);

        assert!(matches!(classify(&cfg(&[1, 1]), &q2), Err(Error::InvalidConfiguration(_))));
    }

    #[test]
    fn goodness_examples() {
        for v in 0..4 {
            let g = is_good(2, &Configuration::simple(4, v, 9)).unwrap();
            assert!(g.sharp && g.good);
        }
        assert!(is_good(1, &cfg(&[1, 1])).unwrap().sharp);
        let g = is_good(2, &Configuration::ones(4)).unwrap();
        assert_eq!(g, Goodness { good: false, sharp: false, slack: -2 });
        assert!(is_good(2, &cfg(&[1, 1, 1])).is_err());
    }

    #[test]
    fn slack_increments() {
        for base in [vec![0u32, 0, 0, 0], vec![3, 0, 1, 0], vec![1, 1, 1, 0]] {
            let before = is_good(2, &cfg(&base)).unwrap().slack;
            for v in 0..4 {
                let mut next = base.clone();
                next[v] += 1;
                let after = is_good(2, &cfg(&next)).unwrap().slack;
                let expected = if base[v] > 0 { 1 } else { 2 };
                assert_eq!(after - before, expected);
            }
        }
    }

    #[test]
    fn apply_move_examples() {
        let p2 = build_path(2).unwrap();
        assert_eq!(apply_move(&cfg(&[2, 0]), &PebbleMove::new(0, 1), &p2).unwrap(), cfg(&[0, 1]));
        assert_eq!(apply_move(&cfg(&[3, 1]), &PebbleMove::new(0, 1), &p2).unwrap(), cfg(&[1, 2]));
        assert!(matches!(
            apply_move(&cfg(&[1, 0]), &PebbleMove::new(0, 1), &p2),
            Err(Error::IllegalMove { .. })
        ));
        let p3 = build_path(3).unwrap();
        assert!(matches!(
            apply_move(&cfg(&[4, 0, 0]), &PebbleMove::new(0, 2), &p3),
            Err(Error::IllegalMove { .. })
        ));
        assert!(matches!(
            apply_move(&cfg(&[4, 0, 0]), &PebbleMove::new(0, 0), &p3),
            Err(Error::IllegalMove { .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let q2 = build_hypercube(2).unwrap();
        let out = verify_cover_sequence(&q2, &Configuration::ones(4), &MoveSequence::default()).unwrap();
        assert!(out.is_cover);

        // (5,1,1,0): 0->1 gives (3,2,1,0), then 1->3 gives (3,0,1,1)
        let seq = MoveSequence::new(vec![PebbleMove::new(0, 1), PebbleMove::new(1, 3)]);
        let out = verify_cover_sequence(&q2, &cfg(&[5, 1, 1, 0]), &seq).unwrap();
        assert_eq!(out.final_config, cfg(&[3, 0, 1, 1]));
        assert!(!out.is_cover);

        let p2 = build_path(2).unwrap();
        let err = verify_cover_sequence(&p2, &cfg(&[1, 0]), &MoveSequence::new(vec![PebbleMove::new(0, 1)]))
            .unwrap_err();
        assert!(matches!(err, Error::VerificationFailure { index: 0, .. }));
    }

    #[test]
    fn simple_cost_examples() {
        let q3 = build_hypercube(3).unwrap();
        assert_eq!(simple_cost(&q3, 5), Some(27));
        let p3 = build_path(3).unwrap();
        assert_eq!(simple_cost(&p3, 0), Some(7));
        assert_eq!(simple_cost(&p3, 1), Some(5));
        assert_eq!(simple_bound(&p3).unwrap(), SimpleBound { value: 7, argmax: 0 });
        let k4 = build_complete(4).unwrap();
        assert_eq!(simple_cost(&k4, 2), Some(7));
    }

    #[test]
    fn simple_cost_on_cubes() {
        for d in 0..=6 {
            let q = build_hypercube(d).unwrap();
            for v in 0..q.vertex_count() {
                assert_eq!(simple_cost(&q, v), Some(3u64.pow(d)));
            }
        }
    }

    #[test]
    fn config_text_format() {
        assert_eq!(Configuration::parse("ones", 3).unwrap(), cfg(&[1, 1, 1]));
        assert_eq!(Configuration::parse("simple:2:9", 4).unwrap(), cfg(&[0, 0, 9, 0]));
        assert_eq!(Configuration::parse(" 1 2\t3 ", 3).unwrap(), cfg(&[1, 2, 3]));
        assert!(Configuration::parse("1 2", 3).is_err());
        assert!(Configuration::parse("simple:4:1", 4).is_err());
        assert!(Configuration::parse("1 -2 3", 3).is_err());
        assert_eq!(cfg(&[1, 2, 3]).to_string(), "1 2 3");
    }

    #[test]
    fn move_text_format() {
        let seq = MoveSequence::new(vec![
            PebbleMove::tagged(0, 1, BranchTag::OpenStep),
            PebbleMove::new(1, 3),
        ]);
        let text = seq.to_string();
        assert_eq!(text, "0 -> 1 [OPEN_STEP]\n1 -> 3\n");
        assert_eq!(MoveSequence::parse(&text).unwrap(), seq);
        assert!(MoveSequence::parse("0 1").is_err());
        assert!(MoveSequence::parse("0 -> 1 [NOPE]").is_err());
    }
}
