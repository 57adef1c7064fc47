//! Edge decompositions of complete graphs into typed blocks.
//!
//! A [`Decomposition`] partitions the pairs of `K_n` into blocks: copies of
//! `K_t` (the design proper), and a leftover made of triangles, 4-cycles and
//! copies of `K_{2t-1}`. Even vertex counts are handled by appending star
//! paths and one single edge at the last vertex.

mod adjusted;
mod projective;
mod search;
mod sts;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adjusted::{adjusted_decomposition, adjusted_decomposition_traced, clique_gcd, extend_to_even, AdjustedBuild};
pub use projective::projective_plane_decomposition;
pub use search::{backtracking_kt_decomposition, SimpleGraph, DEFAULT_NODE_BUDGET};
pub use sts::steiner_triple_system;
pub use validate::{validate, ValidationReport, Violation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesignError {
    #[error("Steiner triple systems exist only for n = 1 or 3 (mod 6) and n >= 3; got n = {0} (= {1} mod 6)")]
    UnsupportedResidue(usize, usize),
    #[error("projective plane of order {0} is not supported (need q in {{2, 4}}: odd block size q+1)")]
    UnsupportedOrder(usize),
    #[error("adjusted decompositions need odd n and odd t >= 3 with n >= t; got n = {n}, t = {t}")]
    BadParameters { n: usize, t: usize },
    #[error("divisibility violated: {0}")]
    Divisibility(String),
    #[error("search gave up after {0} nodes")]
    SearchBudget(u64),
    #[error("infeasible at desk scale: {0}")]
    InfeasibleAtDeskScale(String),
    #[error("graph has {0} vertices; searches support at most 128")]
    TooLarge(usize),
    #[error("input decomposition is invalid: {0}")]
    Invalid(Violation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockKind {
    #[serde(rename = "KT")]
    Kt,
    #[serde(rename = "K2T1")]
    K2t1,
    #[serde(rename = "C3")]
    C3,
    #[serde(rename = "C4")]
    C4,
    #[serde(rename = "STARPATH")]
    StarPath,
    #[serde(rename = "EDGE")]
    Edge,
}

impl BlockKind {
    pub fn arity(self, t: usize) -> usize {
        match self {
            BlockKind::Kt => t,
            BlockKind::K2t1 => 2 * t - 1,
            BlockKind::C3 | BlockKind::StarPath => 3,
            BlockKind::C4 => 4,
            BlockKind::Edge => 2,
        }
    }

    /// Blocks oriented by a random relabelling of a fixed regular tournament.
    pub fn is_clique(self) -> bool {
        matches!(self, BlockKind::Kt | BlockKind::K2t1)
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Kt => "KT",
            BlockKind::K2t1 => "K2T1",
            BlockKind::C3 => "C3",
            BlockKind::C4 => "C4",
            BlockKind::StarPath => "STARPATH",
            BlockKind::Edge => "EDGE",
        }
    }
}

/// One element of a decomposition. Cyclic order matters for `C3`/`C4`;
/// a star path lists `(leaf, centre, leaf)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub kind: BlockKind,
    pub vertices: Vec<usize>,
}

impl Block {
    pub fn new(kind: BlockKind, vertices: Vec<usize>) -> Self {
        Block { kind, vertices }
    }

    /// Unordered pairs covered by the block, as index pairs into `vertices`.
    pub fn position_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.vertices.len();
        match self.kind {
            BlockKind::Kt | BlockKind::K2t1 => {
                (0..m).flat_map(|i| ((i + 1)..m).map(move |j| (i, j))).collect()
            }
            BlockKind::C3 | BlockKind::C4 => (0..m).map(|i| (i, (i + 1) % m)).collect(),
            BlockKind::StarPath => vec![(0, 1), (1, 2)],
            BlockKind::Edge => vec![(0, 1)],
        }
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.position_pairs()
            .into_iter()
            .map(|(i, j)| (self.vertices[i], self.vertices[j]))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        let m = self.vertices.len();
        match self.kind {
            BlockKind::Kt | BlockKind::K2t1 => m * (m - 1) / 2,
            BlockKind::C3 | BlockKind::C4 => m,
            BlockKind::StarPath => 2,
            BlockKind::Edge => 1,
        }
    }

    /// Direction of the pair at positions `(i, j)` when a two-way block
    /// (cycle, star path, edge) is oriented forward: along the listed order.
    /// Reversal flips every arc. Returns true for `vertices[i] -> vertices[j]`.
    pub fn forward_beats(&self, i: usize, j: usize) -> bool {
        let m = self.vertices.len();
        match self.kind {
            BlockKind::C3 | BlockKind::C4 => (i + 1) % m == j,
            BlockKind::StarPath | BlockKind::Edge => j == i + 1,
            BlockKind::Kt | BlockKind::K2t1 => unreachable!("clique blocks are oriented by relabelling"),
        }
    }

    pub fn position_of(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub n: usize,
    pub t: usize,
    pub blocks: Vec<Block>,
}

impl Decomposition {
    pub fn count(&self, kind: BlockKind) -> usize {
        self.blocks.iter().filter(|b| b.kind == kind).count()
    }

    /// True when every block is a copy of `K_t`.
    pub fn is_pure(&self) -> bool {
        self.blocks.iter().all(|b| b.kind == BlockKind::Kt)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decomposition serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Short human-readable tag such as `STS(7)` used in reports.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for kind in [BlockKind::Kt, BlockKind::K2t1, BlockKind::C3, BlockKind::C4, BlockKind::StarPath, BlockKind::Edge] {
            let c = self.count(kind);
            if c > 0 {
                parts.push(format!("{}x{}", c, kind.name()));
            }
        }
        format!("n{}-t{}[{}]", self.n, self.t, parts.join("+"))
    }
}

/// Lookup from an unordered pair of `K_n` to the block covering it.
#[derive(Clone, Debug)]
pub struct PairIndex {
    n: usize,
    block_of: Vec<u32>,
}

impl PairIndex {
    /// Requires a decomposition that passed [`validate`] (every pair covered once).
    pub fn new(d: &Decomposition) -> Self {
        let mut block_of = vec![u32::MAX; d.n * d.n];
        for (b, block) in d.blocks.iter().enumerate() {
            for (u, v) in block.pairs() {
                block_of[u * d.n + v] = b as u32;
                block_of[v * d.n + u] = b as u32;
            }
        }
        PairIndex { n: d.n, block_of }
    }

    #[inline]
    pub fn block_of(&self, u: usize, v: usize) -> usize {
        self.block_of[u * self.n + v] as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_pairs_by_kind() {
        let c4 = Block::new(BlockKind::C4, vec![3, 1, 4, 0]);
        assert_eq!(c4.pairs(), vec![(3, 1), (1, 4), (4, 0), (0, 3)]);
        let sp = Block::new(BlockKind::StarPath, vec![0, 7, 1]);
        assert_eq!(sp.pairs(), vec![(0, 7), (7, 1)]);
        assert!(sp.forward_beats(0, 1) && sp.forward_beats(1, 2));
        let k = Block::new(BlockKind::Kt, vec![0, 1, 2, 3, 4]);
        assert_eq!(k.pairs().len(), 10);
        assert_eq!(k.edge_count(), 10);
        assert!(c4.forward_beats(3, 0) && !c4.forward_beats(0, 3));
    }

    #[test]
    fn json_schema() {
        let d = Decomposition { n: 3, t: 3, blocks: vec![Block::new(BlockKind::Kt, vec![0, 1, 2])] };
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"n":3,"t":3,"blocks":[{"kind":"KT","vertices":[0,1,2]}]}"#);
        assert_eq!(Decomposition::from_json(&text).unwrap(), d);
    }
}
