//! Block-randomised tournaments: every element of a decomposition is
//! oriented independently, clique blocks by a uniformly relabelled copy of a
//! fixed regular tournament and cycle/path/edge blocks by a fair coin
//! between the two directions.
//!
//! Randomness comes from ChaCha8 streams. The master seed (mixed with a
//! per-purpose domain constant) keys the generator and the sample index
//! selects the stream, so sample `i` is the same no matter which thread or
//! in which order it is drawn.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::designs::{validate, BlockKind, Decomposition, Violation};
use crate::tournament::{Tournament, TournamentError};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("decomposition has t = {design}, base tournaments are for t = {base}")]
    MismatchedT { design: usize, base: usize },
    #[error("decomposition is invalid: {0}")]
    InvalidDesign(Violation),
    #[error("base tournament {name} on {n} vertices is not regular")]
    NotRegular { name: &'static str, n: usize },
    #[error("base tournament {name} has {found} vertices, expected {expected}")]
    BaseSize { name: &'static str, expected: usize, found: usize },
    #[error("support has {size} outcomes, budget is {budget}")]
    SupportTooLarge { size: BigUint, budget: u64 },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

/// Domain constants keeping the tournament and permutation streams apart.
pub const TOURNAMENT_DOMAIN: u64 = 0x746f_7572_6e61_6d74;
pub const PERMUTATION_DOMAIN: u64 = 0x7065_726d_7574_6174;

/// The generator for sample `index` of a run seeded with `master`.
pub fn stream_rng(master: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ domain);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSeed {
    pub master: u64,
    pub index: u64,
}

impl SampleSeed {
    pub fn new(master: u64, index: u64) -> Self {
        SampleSeed { master, index }
    }
}

/// `R` on `t` vertices and `R*` on `2t - 1` vertices, both regular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseTournaments {
    r: Tournament,
    rstar: Tournament,
}

impl BaseTournaments {
    pub fn circulant(t: usize) -> Result<Self, SamplerError> {
        Ok(BaseTournaments { r: Tournament::circulant(t)?, rstar: Tournament::circulant(2 * t - 1)? })
    }

    pub fn new(r: Tournament, rstar: Tournament) -> Result<Self, SamplerError> {
        if r.n().is_multiple_of(2) || r.n() < 3 {
            return Err(SamplerError::Tournament(TournamentError::EvenOrder(r.n())));
        }
        if !r.is_regular() {
            return Err(SamplerError::NotRegular { name: "R", n: r.n() });
        }
        if rstar.n() != 2 * r.n() - 1 {
            return Err(SamplerError::BaseSize { name: "R*", expected: 2 * r.n() - 1, found: rstar.n() });
        }
        if !rstar.is_regular() {
            return Err(SamplerError::NotRegular { name: "R*", n: rstar.n() });
        }
        Ok(BaseTournaments { r, rstar })
    }

    /// Custom `R` with the circulant as `R*`.
    pub fn with_r(r: Tournament) -> Result<Self, SamplerError> {
        let rstar = Tournament::circulant(2 * r.n().max(2) - 1)?;
        BaseTournaments::new(r, rstar)
    }

    pub fn t(&self) -> usize {
        self.r.n()
    }

    pub fn r(&self) -> &Tournament {
        &self.r
    }

    pub fn rstar(&self) -> &Tournament {
        &self.rstar
    }

    /// The base used for a clique block; `None` for two-way blocks.
    pub fn for_kind(&self, kind: BlockKind) -> Option<&Tournament> {
        match kind {
            BlockKind::Kt => Some(&self.r),
            BlockKind::K2t1 => Some(&self.rstar),
            _ => None,
        }
    }
}

/// Checks `d` and `bases` once; sampling is then infallible.
#[derive(Clone, Debug)]
pub struct BlockSampler {
    design: Decomposition,
    bases: BaseTournaments,
}

impl BlockSampler {
    pub fn new(design: &Decomposition, bases: &BaseTournaments) -> Result<Self, SamplerError> {
        if design.t != bases.t() {
            return Err(SamplerError::MismatchedT { design: design.t, base: bases.t() });
        }
        if let Some(v) = validate(design).first_violation() {
            return Err(SamplerError::InvalidDesign(v.clone()));
        }
        Ok(BlockSampler { design: design.clone(), bases: bases.clone() })
    }

    pub fn design(&self) -> &Decomposition {
        &self.design
    }

    pub fn bases(&self) -> &BaseTournaments {
        &self.bases
    }

    pub fn sample(&self, seed: SampleSeed) -> Tournament {
        let mut rng = stream_rng(seed.master, TOURNAMENT_DOMAIN, seed.index);
        let mut out = Tournament::empty(self.design.n);
        let mut sigma = Vec::new();
        for block in &self.design.blocks {
            let vs = &block.vertices;
            match self.bases.for_kind(block.kind) {
                Some(base) => {
                    sigma.clear();
                    sigma.extend(0..vs.len());
                    sigma.shuffle(&mut rng);
                    for (i, j) in block.position_pairs() {
                        if base.beats(sigma[i], sigma[j]) {
                            out.orient(vs[i], vs[j]);
                        } else {
                            out.orient(vs[j], vs[i]);
                        }
                    }
                }
                None => {
                    let forward = rng.random::<bool>();
                    for (i, j) in block.position_pairs() {
                        if block.forward_beats(i, j) == forward {
                            out.orient(vs[i], vs[j]);
                        } else {
                            out.orient(vs[j], vs[i]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Number of equally likely outcomes: `m!` per clique block, 2 otherwise.
    pub fn support_size(&self) -> BigUint {
        self.design
            .blocks
            .iter()
            .map(|b| {
                if b.kind.is_clique() {
                    (1..=b.vertices.len()).map(BigUint::from).product()
                } else {
                    BigUint::from(2u32)
                }
            })
            .product()
    }

    /// Every outcome of the block randomisation, each with weight `1/size`.
    pub fn enumerate_support(&self, budget: u64) -> Result<SupportIter, SamplerError> {
        let size = self.support_size();
        if size > BigUint::from(budget) {
            return Err(SamplerError::SupportTooLarge { size, budget });
        }
        let options: Vec<Vec<Vec<(usize, usize)>>> = self
            .design
            .blocks
            .iter()
            .map(|block| {
                let vs = &block.vertices;
                let pairs = block.position_pairs();
                let arcs = |beats: &dyn Fn(usize, usize) -> bool| -> Vec<(usize, usize)> {
                    pairs.iter().map(|&(i, j)| if beats(i, j) { (vs[i], vs[j]) } else { (vs[j], vs[i]) }).collect()
                };
                match self.bases.for_kind(block.kind) {
                    Some(base) => (0..vs.len())
                        .permutations(vs.len())
                        .map(|sigma| arcs(&|i, j| base.beats(sigma[i], sigma[j])))
                        .collect(),
                    None => vec![arcs(&|i, j| block.forward_beats(i, j)), arcs(&|i, j| !block.forward_beats(i, j))],
                }
            })
            .collect();
        Ok(SupportIter {
            n: self.design.n,
            weight: BigRational::new(1.into(), size.into()),
            counters: vec![0; options.len()],
            options,
            done: false,
        })
    }
}

pub fn sample(d: &Decomposition, bases: &BaseTournaments, seed: SampleSeed) -> Result<Tournament, SamplerError> {
    Ok(BlockSampler::new(d, bases)?.sample(seed))
}

/// Odometer over the per-block outcome lists.
pub struct SupportIter {
    n: usize,
    weight: BigRational,
    options: Vec<Vec<Vec<(usize, usize)>>>,
    counters: Vec<usize>,
    done: bool,
}

impl Iterator for SupportIter {
    type Item = (Tournament, BigRational);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut t = Tournament::empty(self.n);
        for (opts, &c) in self.options.iter().zip(&self.counters) {
            for &(u, v) in &opts[c] {
                t.orient(u, v);
            }
        }
        self.done = true;
        for (c, opts) in self.counters.iter_mut().zip(&self.options) {
            *c += 1;
            if *c < opts.len() {
                self.done = false;
                break;
            }
            *c = 0;
        }
        Some((t, self.weight.clone()))
    }
}

/// Merges identical outcomes, summing their weights. Sorted for stable output.
pub fn collapse_support(outcomes: impl Iterator<Item = (Tournament, BigRational)>) -> Vec<(Tournament, BigRational)> {
    let mut merged: HashMap<Tournament, BigRational> = HashMap::new();
    for (t, w) in outcomes {
        *merged.entry(t).or_insert_with(|| BigRational::from_integer(0.into())) += w;
    }
    let mut out: Vec<_> = merged.into_iter().collect();
    out.sort_by_key(|a| a.0.to_hex_rows());
    out
}

pub fn total_weight(outcomes: &[(Tournament, BigRational)]) -> BigRational {
    outcomes.iter().fold(BigRational::from_integer(0.into()), |acc, (_, w)| acc + w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::designs::{adjusted_decomposition, extend_to_even, projective_plane_decomposition, steiner_triple_system, Block};

    fn fano() -> (Decomposition, BaseTournaments) {
        (steiner_triple_system(7).unwrap(), BaseTournaments::circulant(3).unwrap())
    }

    #[test]
    fn fano_samples_are_regular() {
        let (d, b) = fano();
        let s = BlockSampler::new(&d, &b).unwrap();
        for i in 0..1000 {
            let t = s.sample(SampleSeed::new(11, i));
            assert!((0..7).all(|v| t.out_degree(v) == 3));
        }
    }

    #[test]
    fn pg24_samples_are_regular() {
        let d = projective_plane_decomposition(4).unwrap();
        let s = BlockSampler::new(&d, &BaseTournaments::circulant(5).unwrap()).unwrap();
        for i in 0..100 {
            let t = s.sample(SampleSeed::new(3, i));
            assert!((0..21).all(|v| t.out_degree(v) == 10), "seed index {i}");
        }
    }

    #[test]
    fn adjusted_samples_are_regular() {
        let d = adjusted_decomposition(11, 3).unwrap();
        let s = BlockSampler::new(&d, &BaseTournaments::circulant(3).unwrap()).unwrap();
        for i in 0..1000 {
            assert!(s.sample(SampleSeed::new(5, i)).is_regular());
        }
    }

    #[test]
    fn even_extension_is_balanced() {
        let (d, b) = fano();
        let d8 = extend_to_even(&d).unwrap();
        let s = BlockSampler::new(&d8, &b).unwrap();
        for i in 0..1000 {
            let t = s.sample(SampleSeed::new(9, i));
            assert!((0..8).all(|v| matches!(t.in_degree(v), 3 | 4)));
            assert!(t.is_balanced());
        }
    }

    #[test]
    fn marginal_fairness() {
        let d = projective_plane_decomposition(4).unwrap();
        let s = BlockSampler::new(&d, &BaseTournaments::circulant(5).unwrap()).unwrap();
        let draws = 10_000;
        for (u, v) in [(0, 1), (3, 17), (20, 5)] {
            let wins = (0..draws).filter(|&i| s.sample(SampleSeed::new(77, i)).beats(u, v)).count();
            let freq = wins as f64 / draws as f64;
            assert!((freq - 0.5).abs() <= 0.02, "pair ({u},{v}): {freq}");
        }
    }

    #[test]
    fn deterministic_per_index() {
        let (d, b) = fano();
        let s = BlockSampler::new(&d, &b).unwrap();
        let a: Vec<_> = (0..50).map(|i| s.sample(SampleSeed::new(42, i))).collect();
        let rev: Vec<_> = (0..50).rev().map(|i| s.sample(SampleSeed::new(42, i))).collect();
        assert!(a.iter().eq(rev.iter().rev()));
        let other: Vec<_> = (0..50).map(|i| s.sample(SampleSeed::new(43, i))).collect();
        assert_ne!(a, other);
    }

    #[test]
    fn fano_support_collapses_to_128() {
        let (d, b) = fano();
        let s = BlockSampler::new(&d, &b).unwrap();
        assert_eq!(s.support_size(), BigUint::from(279_936u32));
        let outcomes = collapse_support(s.enumerate_support(1 << 20).unwrap());
        assert_eq!(outcomes.len(), 128);
        let eighth = BigRational::new(1.into(), 128.into());
        assert!(outcomes.iter().all(|(t, w)| *w == eighth && t.is_regular()));
        assert!(total_weight(&outcomes).is_one());
    }

    #[test]
    fn single_cycle_block_support() {
        let d = Decomposition { n: 5, t: 3, blocks: vec![Block::new(BlockKind::K2t1, (0..5).collect())] };
        let s = BlockSampler::new(&d, &BaseTournaments::circulant(3).unwrap()).unwrap();
        assert_eq!(s.support_size(), BigUint::from(120u32));
        // the 5-vertex regular tournaments are the 24 relabellings of the circulant
        assert_eq!(collapse_support(s.enumerate_support(1000).unwrap()).len(), 24);
    }

    #[test]
    fn support_budget() {
        let d = projective_plane_decomposition(4).unwrap();
        let s = BlockSampler::new(&d, &BaseTournaments::circulant(5).unwrap()).unwrap();
        match s.enumerate_support(1_000_000) {
            Err(SamplerError::SupportTooLarge { size, .. }) => assert_eq!(size, BigUint::from(120u32).pow(21)),
            _ => panic!("expected a budget error"),
        }
    }

    #[test]
    fn mismatches_rejected() {
        let (d, _) = fano();
        assert!(matches!(
            BlockSampler::new(&d, &BaseTournaments::circulant(5).unwrap()),
            Err(SamplerError::MismatchedT { design: 3, base: 5 })
        ));
        let mut broken = d.clone();
        broken.blocks.pop();
        assert!(matches!(
            BlockSampler::new(&broken, &BaseTournaments::circulant(3).unwrap()),
            Err(SamplerError::InvalidDesign(_))
        ));
        assert!(matches!(
            BaseTournaments::new(Tournament::transitive(3), Tournament::circulant(5).unwrap()),
            Err(SamplerError::NotRegular { .. })
        ));
        assert!(BaseTournaments::new(Tournament::quadratic_residue(7).unwrap(), Tournament::circulant(13).unwrap()).is_ok());
    }
}
