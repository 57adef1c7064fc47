//! Per-permutation capture statistics and success probabilities.
//!
//! For a permutation `pi` of the pattern's vertices, `H_pi` places every
//! pattern edge on a pair of `K_n`, hence in exactly one block of the
//! decomposition. Blocks are oriented independently, so the probability that
//! `H_pi` is a copy in the random tournament is the product over blocks of
//! the probability that the block agrees with all pattern arcs it holds.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::CountingError;
use crate::designs::{validate, Block, Decomposition, PairIndex};
use crate::orientation::{is_cyclic_triangle, pair_shape, Orientation, PairShape};
use crate::sampler::BaseTournaments;
use crate::tournament::Tournament;

/// Default cap on `(m)_s`, the injections enumerated for one clique block.
pub const DEFAULT_INJECTION_BUDGET: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CopyBlockStats {
    pub c: u64,
    pub i: u64,
    pub f: u64,
    pub g: u64,
    pub typical: bool,
}

#[derive(Clone, Copy, Debug)]
struct AdjacentPair {
    e1: usize,
    e2: usize,
    induced: bool,
    shape: PairShape,
}

#[derive(Clone, Copy, Debug)]
struct Triangle {
    edges: [usize; 3],
    cyclic: bool,
}

/// A pattern, a validated decomposition and base tournaments, with the
/// pattern's adjacent edge pairs and triangles indexed once.
#[derive(Clone, Debug)]
pub struct CopyEvaluator {
    h: Orientation,
    design: Decomposition,
    bases: BaseTournaments,
    index: PairIndex,
    pairs: Vec<AdjacentPair>,
    triangles: Vec<Triangle>,
    injection_budget: u64,
}

impl CopyEvaluator {
    pub fn new(h: &Orientation, design: &Decomposition, bases: &BaseTournaments) -> Result<Self, CountingError> {
        if h.n() != design.n {
            return Err(CountingError::SizeMismatch { pattern: h.n(), other: design.n });
        }
        if design.t != bases.t() {
            return Err(CountingError::Sampler(crate::sampler::SamplerError::MismatchedT {
                design: design.t,
                base: bases.t(),
            }));
        }
        if let Some(v) = validate(design).first_violation() {
            return Err(CountingError::Sampler(crate::sampler::SamplerError::InvalidDesign(v.clone())));
        }
        let edges = h.edges();
        let mut edge_id = std::collections::HashMap::new();
        for (k, &(u, v)) in edges.iter().enumerate() {
            edge_id.insert((u.min(v), u.max(v)), k);
        }
        let id = |a: usize, b: usize| edge_id[&(a.min(b), a.max(b))];

        let mut pairs = Vec::new();
        for y in 0..h.n() {
            let nb = h.neighbours(y);
            for (a, &x) in nb.iter().enumerate() {
                for &z in &nb[a + 1..] {
                    let (e1, e2) = (id(x, y), id(y, z));
                    pairs.push(AdjacentPair {
                        e1,
                        e2,
                        induced: !h.adjacent(x, z),
                        shape: pair_shape(edges[e1], edges[e2], y),
                    });
                }
            }
        }
        let mut triangles = Vec::new();
        for a in 0..h.n() {
            for b in h.neighbours(a).into_iter().filter(|&b| b > a) {
                for c in h.neighbours(b).into_iter().filter(|&c| c > b && h.adjacent(a, c)) {
                    triangles.push(Triangle { edges: [id(a, b), id(b, c), id(a, c)], cyclic: is_cyclic_triangle(h, a, b, c) });
                }
            }
        }
        Ok(CopyEvaluator {
            h: h.clone(),
            design: design.clone(),
            bases: bases.clone(),
            index: PairIndex::new(design),
            pairs,
            triangles,
            injection_budget: DEFAULT_INJECTION_BUDGET,
        })
    }

    pub fn with_injection_budget(mut self, budget: u64) -> Self {
        self.injection_budget = budget;
        self
    }

    pub fn pattern(&self) -> &Orientation {
        &self.h
    }

    pub fn design(&self) -> &Decomposition {
        &self.design
    }

    pub fn bases(&self) -> &BaseTournaments {
        &self.bases
    }

    pub fn n(&self) -> usize {
        self.h.n()
    }

    fn check_perm(&self, pi: &[usize]) -> Result<(), CountingError> {
        let n = self.n();
        if pi.len() != n {
            return Err(CountingError::SizeMismatch { pattern: n, other: pi.len() });
        }
        let mut seen = vec![false; n];
        for &x in pi {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(CountingError::NotAPermutation);
            }
        }
        Ok(())
    }

    fn block_of_edges(&self, pi: &[usize]) -> Vec<usize> {
        self.h.edges().iter().map(|&(u, v)| self.index.block_of(pi[u], pi[v])).collect()
    }

    /// Edge indices grouped by block, groups in block order.
    fn groups(&self, blocks: &[usize]) -> Vec<(usize, Vec<usize>)> {
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&k| blocks[k]);
        let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
        for k in order {
            match out.last_mut() {
                Some((b, list)) if *b == blocks[k] => list.push(k),
                _ => out.push((blocks[k], vec![k])),
            }
        }
        out
    }

    pub fn stats(&self, pi: &[usize]) -> Result<CopyBlockStats, CountingError> {
        self.check_perm(pi)?;
        let blocks = self.block_of_edges(pi);
        Ok(self.stats_from(pi, &blocks))
    }

    fn stats_from(&self, pi: &[usize], blocks: &[usize]) -> CopyBlockStats {
        let mut s = CopyBlockStats { typical: true, ..Default::default() };
        for p in &self.pairs {
            if p.induced && blocks[p.e1] == blocks[p.e2] {
                match p.shape {
                    PairShape::Consistent => s.c += 1,
                    PairShape::Inconsistent => s.i += 1,
                }
            }
        }
        for tr in &self.triangles {
            let b = blocks[tr.edges[0]];
            if blocks[tr.edges[1]] == b && blocks[tr.edges[2]] == b {
                if tr.cyclic {
                    s.f += 1;
                } else {
                    s.g += 1;
                }
            }
        }
        let edges = self.h.edges();
        for (b, group) in self.groups(blocks) {
            let block = &self.design.blocks[b];
            let atypical = match (block.kind == crate::designs::BlockKind::Kt, group.len()) {
                (_, 1) => false,
                (false, _) => true,
                (true, 2) => false,
                (true, 3) => {
                    let mut vs: Vec<usize> = group.iter().flat_map(|&k| [pi[edges[k].0], pi[edges[k].1]]).collect();
                    vs.sort_unstable();
                    vs.dedup();
                    vs.len() != 3
                }
                (true, _) => true,
            };
            if atypical {
                s.typical = false;
            }
        }
        s
    }

    /// Exact `Pr[H_pi is a copy]` by per-block enumeration.
    pub fn probability(&self, pi: &[usize]) -> Result<BigRational, CountingError> {
        Ok(self.evaluate(pi)?.1)
    }

    /// Capture statistics and exact probability in one pass.
    pub fn evaluate(&self, pi: &[usize]) -> Result<(CopyBlockStats, BigRational), CountingError> {
        self.check_perm(pi)?;
        let blocks = self.block_of_edges(pi);
        let stats = self.stats_from(pi, &blocks);
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        let mut halves = 0u32;
        for (b, group) in self.groups(&blocks) {
            if group.len() == 1 {
                // any single pair of a relabelled tournament or a two-way block is a fair coin
                halves += 1;
                continue;
            }
            let (good, total) = self.block_factor(b, &group, pi)?;
            if good == 0 {
                return Ok((stats, BigRational::zero()));
            }
            num *= good;
            den *= total;
        }
        den <<= halves;
        Ok((stats, BigRational::new(BigInt::from(num), BigInt::from(den))))
    }

    /// `(good, total)` outcomes of block `b` for the arcs of `H_pi` it holds.
    fn block_factor(&self, b: usize, group: &[usize], pi: &[usize]) -> Result<(u64, u64), CountingError> {
        let block: &Block = &self.design.blocks[b];
        let edges = self.h.edges();
        let arcs: Vec<(usize, usize)> = group
            .iter()
            .map(|&k| {
                let (u, v) = edges[k];
                (block.position_of(pi[u]).expect("edge in block"), block.position_of(pi[v]).expect("edge in block"))
            })
            .collect();
        match self.bases.for_kind(block.kind) {
            None => {
                let fwd = arcs.iter().all(|&(i, j)| block.forward_beats(i, j));
                let rev = arcs.iter().all(|&(i, j)| !block.forward_beats(i, j));
                Ok((fwd as u64 + rev as u64, 2))
            }
            Some(base) => {
                let mut touched: Vec<usize> = arcs.iter().flat_map(|&(i, j)| [i, j]).collect();
                touched.sort_unstable();
                touched.dedup();
                let m = block.vertices.len() as u64;
                let s = touched.len() as u64;
                let total = (0..s).try_fold(1u64, |acc, k| acc.checked_mul(m - k)).unwrap_or(u64::MAX);
                if total > self.injection_budget {
                    return Err(CountingError::InjectionBudget { block: b, injections: total, budget: self.injection_budget });
                }
                let local: Vec<(usize, usize)> = arcs
                    .iter()
                    .map(|&(i, j)| (touched.binary_search(&i).unwrap(), touched.binary_search(&j).unwrap()))
                    .collect();
                Ok((count_embeddings(base, touched.len(), &local), total))
            }
        }
    }
}

/// Injections of `s` labelled points into `base` carrying every listed arc.
fn count_embeddings(base: &Tournament, s: usize, arcs: &[(usize, usize)]) -> u64 {
    let mut back: Vec<Vec<(usize, bool)>> = vec![Vec::new(); s];
    for &(i, j) in arcs {
        if i > j {
            back[i].push((j, true));
        } else {
            back[j].push((i, false));
        }
    }
    fn go(k: usize, img: &mut Vec<usize>, used: u64, back: &[Vec<(usize, bool)>], base: &Tournament) -> u64 {
        if k == back.len() {
            return 1;
        }
        let mut total = 0;
        for x in 0..base.n() {
            if used >> x & 1 == 1 {
                continue;
            }
            let ok = back[k].iter().all(|&(e, tail)| if tail { base.beats(x, img[e]) } else { base.beats(img[e], x) });
            if ok {
                img[k] = x;
                total += go(k + 1, img, used | 1 << x, back, base);
            }
        }
        total
    }
    let mut img = vec![0; s];
    go(0, &mut img, 0, &back, base)
}

/// The product formula for a typical copy, from its capture statistics.
pub fn claim_one_probability(stats: &CopyBlockStats, t: usize, e: usize) -> BigRational {
    let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let t = t as i64;
    let pow = |x: BigRational, k: u64| (0..k).fold(BigRational::one(), |acc, _| acc * &x);
    let single = e as i64 - 2 * stats.c as i64 - 2 * stats.i as i64 - 3 * stats.f as i64 - 3 * stats.g as i64;
    assert!(single >= 0, "capture statistics exceed the edge count");
    pow(r(t - 1, 4 * (t - 2)), stats.c)
        * pow(r(t - 3, 4 * (t - 2)), stats.i)
        * pow(r(t + 1, 8 * (t - 2)), stats.f)
        * pow(r(t - 3, 8 * (t - 2)), stats.g)
        * BigRational::new(BigInt::one(), BigInt::one() << single as usize)
}

/// `p * 2^e` as a float; exact up to the final rounding.
pub fn scaled_ratio(p: &BigRational, e: usize) -> f64 {
    (p * BigRational::from_integer(BigInt::one() << e)).to_f64().unwrap_or(f64::NAN)
}
