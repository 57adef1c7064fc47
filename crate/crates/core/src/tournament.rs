//! Tournaments stored as bit-packed dominance matrices.
//!
//! Row `u` holds one bit per vertex `v`, set when `u` beats `v`. Exactly one
//! of `(u, v)` and `(v, u)` is set for every unordered pair once a tournament
//! has been fully constructed; the helpers here keep that invariant.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TournamentError {
    #[error("circulant regular tournament needs odd m >= 3, got {0}")]
    EvenOrder(usize),
    #[error("quadratic residue tournament needs a prime p = 3 (mod 4), got {0}")]
    NotQrPrime(usize),
    #[error("pair ({0},{1}) is not oriented exactly once")]
    PairNotOriented(usize, usize),
    #[error("edge ({0},{1}) is out of range or a self-loop")]
    BadEdge(usize, usize),
    #[error("malformed tournament file: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Tournament {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Tournament {
    /// An unfilled dominance matrix; callers must orient every pair.
    pub(crate) fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Tournament { n, words, rows: vec![0; n * words] }
    }

    /// Builds a tournament from a predicate that decides `u` beats `v` for `u < v`.
    pub fn from_fn(n: usize, mut beats: impl FnMut(usize, usize) -> bool) -> Self {
        let mut t = Tournament::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                if beats(u, v) {
                    t.orient(u, v);
                } else {
                    t.orient(v, u);
                }
            }
        }
        t
    }

    /// The transitive tournament `T_n`: `u` beats `v` whenever `u < v`.
    pub fn transitive(n: usize) -> Self {
        Tournament::from_fn(n, |_, _| true)
    }

    /// Uniformly random tournament (each pair oriented by a fair coin).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Tournament::from_fn(n, |_, _| rng.random::<bool>())
    }

    /// Vertex `i` beats `i+1, ..., i+(m-1)/2 (mod m)`.
    pub fn circulant(m: usize) -> Result<Self, TournamentError> {
        if m < 3 || m.is_multiple_of(2) {
            return Err(TournamentError::EvenOrder(m));
        }
        let half = (m - 1) / 2;
        Ok(Tournament::from_fn(m, |u, v| v - u <= half))
    }

    /// Paley tournament: `i` beats `j` iff `j - i` is a nonzero square mod `p`.
    pub fn quadratic_residue(p: usize) -> Result<Self, TournamentError> {
        let is_prime = p >= 3 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if !is_prime || p % 4 != 3 {
            return Err(TournamentError::NotQrPrime(p));
        }
        let mut square = vec![false; p];
        for x in 1..p {
            square[x * x % p] = true;
        }
        Ok(Tournament::from_fn(p, |u, v| square[(v + p - u) % p]))
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TournamentError> {
        let mut t = Tournament::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(TournamentError::BadEdge(u, v));
            }
            if t.beats(u, v) || t.beats(v, u) {
                return Err(TournamentError::PairNotOriented(u.min(v), u.max(v)));
            }
            t.set_bit(u, v);
        }
        t.check_complete()?;
        Ok(t)
    }

    pub(crate) fn check_complete(&self) -> Result<(), TournamentError> {
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if self.beats(u, v) == self.beats(v, u) {
                    return Err(TournamentError::PairNotOriented(u, v));
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn set_bit(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] |= 1u64 << (v % 64);
    }

    #[inline]
    fn clear_bit(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] &= !(1u64 << (v % 64));
    }

    /// Orients the pair `{u, v}` as `u -> v`.
    #[inline]
    pub(crate) fn orient(&mut self, u: usize, v: usize) {
        self.set_bit(u, v);
        self.clear_bit(v, u);
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.rows[u * self.words..(u + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.n - 1 - self.out_degree(u)
    }

    /// Every out-degree equals `(n-1)/2`; only possible for odd `n`.
    pub fn is_regular(&self) -> bool {
        self.n % 2 == 1 && (0..self.n).all(|u| 2 * self.out_degree(u) == self.n - 1)
    }

    /// Every in-degree is `n/2 - 1` or `n/2`; only possible for even `n`.
    pub fn is_balanced(&self) -> bool {
        self.n.is_multiple_of(2)
            && (0..self.n).all(|u| {
                let d = self.in_degree(u);
                d + 1 == self.n / 2 || d == self.n / 2
            })
    }

    /// All edges `(u, v)` with `u` beating `v`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2);
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v && self.beats(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> TournamentJson {
        TournamentJson {
            n: self.n,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(doc: &TournamentJson) -> Result<Self, TournamentError> {
        let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Tournament::from_edges(doc.n, &edges)
    }

    /// Hex-row format: a line with `n`, then one line per row. Bit `j` of row
    /// `i` is "i beats j", packed big-endian within each byte (vertex 0 is the
    /// most significant bit of the first byte).
    pub fn to_hex_rows(&self) -> String {
        let bytes = self.n.div_ceil(8);
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.n);
        for u in 0..self.n {
            for b in 0..bytes {
                let mut byte = 0u8;
                for bit in 0..8 {
                    let v = b * 8 + bit;
                    if v < self.n && self.beats(u, v) {
                        byte |= 0x80 >> bit;
                    }
                }
                let _ = write!(s, "{byte:02x}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_hex_rows(text: &str) -> Result<Self, TournamentError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| TournamentError::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|e| TournamentError::Parse(format!("vertex count: {e}")))?;
        let bytes = n.div_ceil(8);
        let mut t = Tournament::empty(n);
        for u in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| TournamentError::Parse(format!("missing row {u}")))?;
            if line.len() != 2 * bytes {
                return Err(TournamentError::Parse(format!(
                    "row {u} has {} hex digits, expected {}",
                    line.len(),
                    2 * bytes
                )));
            }
            for b in 0..bytes {
                let byte = u8::from_str_radix(&line[2 * b..2 * b + 2], 16)
                    .map_err(|e| TournamentError::Parse(format!("row {u}: {e}")))?;
                for bit in 0..8 {
                    let v = b * 8 + bit;
                    if byte & (0x80 >> bit) != 0 {
                        if v >= n || v == u {
                            return Err(TournamentError::BadEdge(u, v));
                        }
                        t.set_bit(u, v);
                    }
                }
            }
        }
        t.check_complete()?;
        Ok(t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TournamentJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circulant_orders() {
        let t3 = Tournament::circulant(3).unwrap();
        assert!(t3.beats(0, 1) && t3.beats(1, 2) && t3.beats(2, 0));
        for m in [5, 7, 9, 11] {
            let t = Tournament::circulant(m).unwrap();
            assert!(t.is_regular(), "m={m}");
            assert!((0..m).all(|u| t.out_degree(u) == (m - 1) / 2));
        }
        assert_eq!(Tournament::circulant(4), Err(TournamentError::EvenOrder(4)));
        assert!(Tournament::circulant(1).is_err());
    }

    #[test]
    fn paley_is_regular() {
        let t = Tournament::quadratic_residue(7).unwrap();
        assert!(t.is_regular());
        // squares mod 7 are {1, 2, 4}
        assert!(t.beats(0, 1) && t.beats(0, 2) && t.beats(0, 4) && t.beats(3, 0));
        assert!(Tournament::quadratic_residue(5).is_err());
    }

    #[test]
    fn transitive_degrees() {
        let t = Tournament::transitive(6);
        assert_eq!((0..6).map(|u| t.out_degree(u)).collect::<Vec<_>>(), [5, 4, 3, 2, 1, 0]);
        assert!(!t.is_balanced());
    }

    #[test]
    fn hex_rows_layout() {
        let t = Tournament::circulant(3).unwrap();
        // row 0 beats 1 -> 0b0100_0000
        assert_eq!(t.to_hex_rows(), "3\n40\n20\n80\n");
    }

    #[test]
    fn formats_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2, 7, 8, 9, 17, 70] {
            let t = Tournament::random(n, &mut rng);
            assert_eq!(Tournament::from_hex_rows(&t.to_hex_rows()).unwrap(), t);
            assert_eq!(Tournament::from_json(&t.to_json()).unwrap(), t);
        }
    }

    #[test]
    fn rejects_incomplete_or_doubled() {
        assert_eq!(
            Tournament::from_edges(3, &[(0, 1), (1, 2)]),
            Err(TournamentError::PairNotOriented(0, 2))
        );
        assert_eq!(
            Tournament::from_edges(3, &[(0, 1), (1, 0)]),
            Err(TournamentError::PairNotOriented(0, 1))
        );
        assert!(Tournament::from_hex_rows("3\n60\n20\n80\n").is_err());
    }
}
