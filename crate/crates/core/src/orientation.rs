//! Orientations (digraphs without 2-cycles), their statistics, and the
//! pattern generators used throughout the experiments.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrientationError {
    #[error("edge ({0},{1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0},{1}) references a vertex outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("edge ({0},{1}) appears twice")]
    Duplicate(usize, usize),
    #[error("edges ({0},{1}) and ({1},{0}) form a 2-cycle")]
    TwoCycle(usize, usize),
    #[error("invalid pattern parameters: {0}")]
    InvalidParameters(String),
    #[error("no valid {k}-regular orientation on {n} vertices after {attempts} attempts")]
    RejectionBudget { n: usize, k: usize, attempts: usize },
    #[error("malformed orientation file: {0}")]
    Parse(String),
}

/// A simple digraph on `0..n` with no loops, duplicate edges, or 2-cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    n: usize,
    edges: Vec<(usize, usize)>,
    out_deg: Vec<usize>,
    in_deg: Vec<usize>,
    words: usize,
    // underlying undirected adjacency, one bit row per vertex
    adj: Vec<u64>,
    arcs: Vec<u64>,
}

impl Orientation {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, OrientationError> {
        let words = n.div_ceil(64).max(1);
        let mut adj = vec![0u64; n * words];
        let mut arcs = vec![0u64; n * words];
        let mut out_deg = vec![0; n];
        let mut in_deg = vec![0; n];
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u == v {
                return Err(OrientationError::SelfLoop(u, v));
            }
            if u >= n || v >= n {
                return Err(OrientationError::OutOfRange(u, v, n));
            }
            if seen.contains(&(v, u)) {
                return Err(OrientationError::TwoCycle(v, u));
            }
            if !seen.insert((u, v)) {
                return Err(OrientationError::Duplicate(u, v));
            }
            adj[u * words + v / 64] |= 1 << (v % 64);
            adj[v * words + u / 64] |= 1 << (u % 64);
            arcs[u * words + v / 64] |= 1 << (v % 64);
            out_deg[u] += 1;
            in_deg[v] += 1;
        }
        Ok(Orientation { n, edges, out_deg, in_deg, words, adj, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_deg[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_deg[v]
    }

    /// Adjacency in the underlying undirected graph.
    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arcs[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Maximum degree of the underlying graph.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.out_deg[v] + self.in_deg[v]).max().unwrap_or(0)
    }

    /// Neighbours in the underlying graph, ascending.
    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| self.adjacent(v, u)).collect()
    }

    /// Applies `relabel[v]` to every vertex.
    pub fn relabel(&self, relabel: &[usize]) -> Orientation {
        let edges = self.edges.iter().map(|&(u, v)| (relabel[u], relabel[v])).collect();
        Orientation::new(self.n, edges).expect("relabelling a valid orientation by a permutation")
    }

    pub fn to_json(&self) -> OrientationJson {
        OrientationJson { n: self.n, edges: self.edges.iter().map(|&(u, v)| [u, v]).collect() }
    }

    pub fn from_json(doc: &OrientationJson) -> Result<Self, OrientationError> {
        Orientation::new(doc.n, doc.edges.iter().map(|e| (e[0], e[1])).collect())
    }

    /// Plain text: first line `n`, then one `u v` pair per line. Blank lines
    /// and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self, OrientationError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let n = lines
            .next()
            .ok_or_else(|| OrientationError::Parse("missing vertex count".into()))?
            .parse::<usize>()
            .map_err(|e| OrientationError::Parse(format!("vertex count: {e}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut it = line.split_whitespace().map(usize::from_str);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
                _ => return Err(OrientationError::Parse(format!("bad edge line {line:?}"))),
            }
        }
        Orientation::new(n, edges)
    }

    /// Parses JSON if the text starts with `{`, the plain format otherwise.
    pub fn parse(text: &str) -> Result<Self, OrientationError> {
        if text.trim_start().starts_with('{') {
            let doc: OrientationJson =
                serde_json::from_str(text).map_err(|e| OrientationError::Parse(e.to_string()))?;
            Orientation::from_json(&doc)
        } else {
            Orientation::from_text(text)
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrientationJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

/// Per-orientation counts. `c` and `i` count induced pairs only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationStats {
    pub plus: u64,
    pub minus: u64,
    pub c: u64,
    pub i: u64,
    pub f: u64,
    pub g: u64,
    pub e: u64,
    pub maxdeg: u64,
}

impl OrientationStats {
    /// `plus - minus`, which also equals `c + 3f - i - g`.
    pub fn margin(&self) -> i64 {
        self.plus as i64 - self.minus as i64
    }
}

/// Shape of a pair of edges meeting at a common vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairShape {
    Consistent,
    Inconsistent,
}

pub(crate) fn pair_shape(e1: (usize, usize), e2: (usize, usize), common: usize) -> PairShape {
    let head1 = e1.1 == common;
    let head2 = e2.1 == common;
    if head1 != head2 {
        PairShape::Consistent
    } else {
        PairShape::Inconsistent
    }
}

/// Whether the three arcs on `{a, b, c}` form a directed triangle.
pub(crate) fn is_cyclic_triangle(h: &Orientation, a: usize, b: usize, c: usize) -> bool {
    let dir = |x: usize, y: usize| h.has_arc(x, y);
    (dir(a, b) && dir(b, c) && dir(c, a)) || (dir(b, a) && dir(c, b) && dir(a, c))
}

pub fn stats(h: &Orientation) -> OrientationStats {
    let n = h.n;
    let mut s = OrientationStats { e: h.edge_count() as u64, maxdeg: h.max_degree() as u64, ..Default::default() };
    for v in 0..n {
        let (dp, dm) = (h.out_deg[v] as u64, h.in_deg[v] as u64);
        s.plus += dp * dm;
        s.minus += dp * dp.saturating_sub(1) / 2 + dm * dm.saturating_sub(1) / 2;
    }

    // incident arcs per vertex, for the induced-pair scan
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(u, v) in &h.edges {
        incident[u].push((u, v));
        incident[v].push((u, v));
    }
    for (v, arcs) in incident.iter().enumerate() {
        for (x, &e1) in arcs.iter().enumerate() {
            for &e2 in &arcs[x + 1..] {
                let a = if e1.0 == v { e1.1 } else { e1.0 };
                let b = if e2.0 == v { e2.1 } else { e2.0 };
                if h.adjacent(a, b) {
                    continue;
                }
                match pair_shape(e1, e2, v) {
                    PairShape::Consistent => s.c += 1,
                    PairShape::Inconsistent => s.i += 1,
                }
            }
        }
    }

    // triangles a < b < c of the underlying graph: edge {a,b} plus a common neighbour above b
    for a in 0..n {
        for b in (a + 1)..n {
            if !h.adjacent(a, b) {
                continue;
            }
            for c in (b + 1)..n {
                if h.adjacent(a, c) && h.adjacent(b, c) {
                    if is_cyclic_triangle(h, a, b, c) {
                        s.f += 1;
                    } else {
                        s.g += 1;
                    }
                }
            }
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub even: bool,
    pub eulerian: bool,
    pub balanced: bool,
    /// `Some(k)` when every in- and out-degree equals `k` (including `k = 0`).
    pub k_regular: Option<usize>,
}

pub fn classify(h: &Orientation) -> Classification {
    let n = h.n;
    let even = (0..n).all(|v| h.out_deg[v] == h.in_deg[v]);
    let balanced = (0..n).all(|v| h.out_deg[v].abs_diff(h.in_deg[v]) <= 1);
    let k_regular = match n {
        0 => None,
        _ => {
            let k = h.out_deg[0];
            (0..n).all(|v| h.out_deg[v] == k && h.in_deg[v] == k).then_some(k)
        }
    };
    Classification { even, eulerian: even && underlying_connected(h), balanced, k_regular }
}

fn underlying_connected(h: &Orientation) -> bool {
    if h.n == 0 {
        return true;
    }
    let mut seen = vec![false; h.n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for u in 0..h.n {
            if !seen[u] && h.adjacent(v, u) {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// `(eps, k)`-consistency with the maximum degree of the underlying graph
/// bounded by `k` and `plus - minus >= eps * n`.
pub fn consistency_check(h: &Orientation, eps: &BigRational, k: usize) -> bool {
    let s = stats(h);
    if s.maxdeg as usize > k {
        return false;
    }
    let margin = BigRational::from_integer(BigInt::from(s.margin()));
    margin >= eps * BigRational::from_integer(BigInt::from(h.n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    Cycle,
    Path,
    Matching,
    KRegularRandom,
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternKind::Cycle => "cycle",
            PatternKind::Path => "path",
            PatternKind::Matching => "matching",
            PatternKind::KRegularRandom => "k_regular_random",
        })
    }
}

impl FromStr for PatternKind {
    type Err = OrientationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle" => Ok(PatternKind::Cycle),
            "path" => Ok(PatternKind::Path),
            "matching" => Ok(PatternKind::Matching),
            "k_regular_random" | "k-regular" | "kreg" => Ok(PatternKind::KRegularRandom),
            other => Err(OrientationError::InvalidParameters(format!("unknown pattern {other:?}"))),
        }
    }
}

pub const DEFAULT_REJECTION_ATTEMPTS: usize = 100_000;

/// Directed cycle, directed path, perfect matching, or a random `k`-regular
/// orientation (union of `k` random cyclic orders, rejected until no pair is
/// repeated in either direction).
pub fn make_pattern(
    kind: PatternKind,
    n: usize,
    k: Option<usize>,
    seed: Option<u64>,
) -> Result<Orientation, OrientationError> {
    let bad = |msg: String| Err(OrientationError::InvalidParameters(msg));
    match kind {
        PatternKind::Cycle => {
            if n < 3 {
                return bad(format!("cycle needs n >= 3, got {n}"));
            }
            Orientation::new(n, (0..n).map(|v| (v, (v + 1) % n)).collect())
        }
        PatternKind::Path => {
            if n < 1 {
                return bad("path needs n >= 1".into());
            }
            Orientation::new(n, (1..n).map(|v| (v - 1, v)).collect())
        }
        PatternKind::Matching => {
            if n == 0 || n % 2 == 1 {
                return bad(format!("perfect matching needs even n >= 2, got {n}"));
            }
            Orientation::new(n, (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect())
        }
        PatternKind::KRegularRandom => {
            let k = match k {
                Some(k) if k >= 1 && 2 * k < n => k,
                _ => return bad(format!("k-regular orientation needs 1 <= k and 2k < n (n={n}, k={k:?})")),
            };
            random_regular(n, k, seed.unwrap_or(0), DEFAULT_REJECTION_ATTEMPTS)
        }
    }
}

pub fn random_regular(n: usize, k: usize, seed: u64, attempts: usize) -> Result<Orientation, OrientationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut pairs = HashSet::with_capacity(n * k);
    let mut edges = Vec::with_capacity(n * k);
    let mut tries = 0;
    // each cyclic order is redrawn until it avoids every pair already used
    while edges.len() < n * k {
        if tries == attempts {
            return Err(OrientationError::RejectionBudget { n, k, attempts });
        }
        tries += 1;
        order.shuffle(&mut rng);
        let cycle: Vec<(usize, usize)> = (0..n).map(|i| (order[i], order[(i + 1) % n])).collect();
        if cycle.iter().any(|&(u, v)| pairs.contains(&(u.min(v), u.max(v)))) {
            continue;
        }
        pairs.extend(cycle.iter().map(|&(u, v)| (u.min(v), u.max(v))));
        edges.extend(cycle);
    }
    Orientation::new(n, edges)
}

/// Automorphism counts for the patterns where they are known in closed form.
pub fn known_automorphisms(kind: PatternKind, n: usize) -> Option<num_bigint::BigUint> {
    use num_bigint::BigUint;
    match kind {
        PatternKind::Cycle => Some(BigUint::from(n)),
        PatternKind::Path => Some(BigUint::from(1u32)),
        PatternKind::Matching => {
            let m = n / 2;
            let fact: BigUint = (1..=m).map(BigUint::from).product();
            Some((BigUint::from(1u32) << m) * fact)
        }
        PatternKind::KRegularRandom => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn orient(n: usize, edges: &[(usize, usize)]) -> Orientation {
        Orientation::new(n, edges.to_vec()).unwrap()
    }

    #[test]
    fn directed_triangle() {
        let s = stats(&orient(3, &[(0, 1), (1, 2), (2, 0)]));
        assert_eq!((s.plus, s.minus, s.c, s.i, s.f, s.g), (3, 0, 0, 0, 1, 0));
    }

    #[test]
    fn transitive_triangle() {
        let s = stats(&orient(3, &[(0, 1), (1, 2), (0, 2)]));
        assert_eq!((s.plus, s.minus, s.c, s.i, s.f, s.g), (1, 2, 0, 0, 0, 1));
    }

    #[test]
    fn long_cycles() {
        for n in 4..12 {
            let s = stats(&make_pattern(PatternKind::Cycle, n, None, None).unwrap());
            assert_eq!((s.plus, s.minus, s.c, s.i, s.f, s.g), (n as u64, 0, n as u64, 0, 0, 0));
        }
    }

    #[test]
    fn k_regular_plus_minus() {
        for (n, k, seed) in [(15, 2, 1), (21, 3, 2), (9, 1, 3), (30, 4, 4)] {
            let h = make_pattern(PatternKind::KRegularRandom, n, Some(k), Some(seed)).unwrap();
            assert_eq!(classify(&h).k_regular, Some(k));
            let s = stats(&h);
            let (n, k) = (n as u64, k as u64);
            assert_eq!(s.plus, k * k * n);
            assert_eq!(s.minus, k * (k - 1) * n);
        }
    }

    #[test]
    fn classification_examples() {
        let c = classify(&make_pattern(PatternKind::Cycle, 6, None, None).unwrap());
        assert!(c.eulerian && c.even && c.balanced);
        assert_eq!(c.k_regular, Some(1));
        let p = classify(&make_pattern(PatternKind::Path, 6, None, None).unwrap());
        assert!(p.balanced && !p.even && !p.eulerian);
        let m = classify(&make_pattern(PatternKind::Matching, 6, None, None).unwrap());
        assert!(m.balanced && !m.even);
        // two disjoint triangles: even, not eulerian
        let two = classify(&orient(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]));
        assert!(two.even && !two.eulerian);
    }

    #[test]
    fn consistency_examples() {
        let one = BigRational::from_integer(1.into());
        let c = make_pattern(PatternKind::Cycle, 9, None, None).unwrap();
        assert!(consistency_check(&c, &one, 2));
        assert!(!consistency_check(&c, &one, 1));
        let m = make_pattern(PatternKind::Matching, 8, None, None).unwrap();
        let tiny = BigRational::new(1.into(), 1000.into());
        assert!(!consistency_check(&m, &tiny, 3));
        // balanced, max degree 2, 0.75n edges: (2*0.25/2, 2) = (1/4, 2)-consistent
        let h = orient(8, &[(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (2, 6)]);
        let eps = BigRational::new(1.into(), 4.into());
        assert!(classify(&h).balanced);
        assert!(consistency_check(&h, &eps, 2));
    }

    #[test]
    fn pattern_examples() {
        let c = make_pattern(PatternKind::Cycle, 5, None, None).unwrap();
        assert_eq!(c.edges(), &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let m = make_pattern(PatternKind::Matching, 6, None, None).unwrap();
        assert_eq!(m.edge_count(), 3);
        assert_eq!(m.max_degree(), 1);
        assert!(make_pattern(PatternKind::Cycle, 2, None, None).is_err());
        assert!(make_pattern(PatternKind::Matching, 5, None, None).is_err());
        assert!(make_pattern(PatternKind::KRegularRandom, 4, Some(2), Some(0)).is_err());
    }

    #[test]
    fn rejection_budget_reported() {
        // n = 5, k = 2 with one attempt almost surely collides; 0 attempts always fails
        assert_eq!(random_regular(5, 2, 9, 0), Err(OrientationError::RejectionBudget { n: 5, k: 2, attempts: 0 }));
    }

    #[test]
    fn parsers_reject_bad_pairs() {
        assert_eq!(Orientation::parse("3\n0 1\n1 0\n"), Err(OrientationError::TwoCycle(0, 1)));
        assert_eq!(
            Orientation::parse(r#"{"n":3,"edges":[[0,1],[1,2],[0,1]]}"#),
            Err(OrientationError::Duplicate(0, 1))
        );
        assert!(matches!(Orientation::parse("3\n0 1 2\n"), Err(OrientationError::Parse(_))));
        let h = Orientation::parse(r#"{"n":3,"edges":[[0,1],[1,2],[2,0]]}"#).unwrap();
        assert_eq!(Orientation::parse(&h.to_text()).unwrap(), h);
    }

    fn arb_orientation() -> impl Strategy<Value = Orientation> {
        (2usize..20).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n, any::<bool>()), 0..(2 * n)).prop_map(move |raw| {
                let mut pairs = HashSet::new();
                let mut edges = Vec::new();
                for (a, b, flip) in raw {
                    if a != b && pairs.insert((a.min(b), a.max(b))) {
                        edges.push(if flip { (a, b) } else { (b, a) });
                    }
                }
                Orientation::new(n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn identities_hold(h in arb_orientation()) {
            let s = stats(&h);
            prop_assert_eq!(s.plus, 3 * s.f + s.c + s.g);
            prop_assert_eq!(s.minus, 2 * s.g + s.i);
        }

        #[test]
        fn stats_invariant_under_relabelling(h in arb_orientation(), seed in any::<u64>()) {
            let mut perm: Vec<usize> = (0..h.n()).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(stats(&h), stats(&h.relabel(&perm)));
        }
    }
}
