//! Expected labelled-copy counts: exact sums over all `n!` placements for
//! tiny `n`, and a Monte Carlo estimator over uniform placements.
//!
//! The estimator aggregates in fixed chunks of consecutive sample indices
//! and merges the chunk moments in index order, so the result does not
//! depend on how many worker threads evaluated the chunks.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use super::copies::{scaled_ratio, CopyEvaluator};
use super::CountingError;
use crate::orientation::Orientation;
use crate::sampler::{stream_rng, PERMUTATION_DOMAIN};

pub const EXACT_MAX_N: usize = 9;
const CHUNK: u64 = 1024;

/// `n! / 2^e`, the expected count in a uniformly random tournament.
pub fn baseline(n: usize, e: usize) -> BigRational {
    let fact: BigUint = (1..=n).map(BigUint::from).product();
    BigRational::new(BigInt::from(fact), BigInt::one() << e)
}

pub fn log2_rational(x: &BigRational) -> f64 {
    fn log2_int(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits <= 1000 {
            v.to_f64().unwrap().log2()
        } else {
            let shift = bits - 64;
            (v >> shift as usize).to_f64().unwrap().log2() + shift as f64
        }
    }
    log2_int(x.numer()) - log2_int(x.denom())
}

/// Heap's algorithm over `0..n`, calling `visit` on each permutation.
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    visit(&p);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            visit(&p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Exact results of a full sweep over all placements.
#[derive(Clone, Debug)]
pub struct ExactSummary {
    pub expected: BigRational,
    pub baseline: BigRational,
    /// Means of `C_pi, I_pi, F_pi, G_pi` over all `n!` placements.
    pub c: BigRational,
    pub i: BigRational,
    pub f: BigRational,
    pub g: BigRational,
    pub typical: BigUint,
    pub placements: BigUint,
    /// Number of typical placements where the product formula disagreed with enumeration.
    pub closed_form_mismatches: u64,
}

impl ExactSummary {
    pub fn ratio(&self) -> BigRational {
        &self.expected / &self.baseline
    }

    pub fn typical_fraction(&self) -> f64 {
        BigRational::new(self.typical.clone().into(), self.placements.clone().into()).to_f64().unwrap_or(f64::NAN)
    }
}

pub fn exact_summary(ev: &CopyEvaluator) -> Result<ExactSummary, CountingError> {
    let n = ev.n();
    if n > EXACT_MAX_N {
        return Err(CountingError::ExactBudget { n, max: EXACT_MAX_N });
    }
    let e = ev.pattern().edge_count();
    let t = ev.design().t;
    // every probability has a power-of-two-times-small-factorial denominator;
    // summing p * 2^e keeps the accumulator's denominators small
    let mut sum = BigRational::zero();
    let (mut c, mut i, mut f, mut g, mut typical, mut mismatches) = (0u64, 0u64, 0u64, 0u64, 0u64, 0u64);
    let mut err = None;
    let scale = BigRational::from_integer(BigInt::one() << e);
    for_each_permutation(n, |pi| {
        if err.is_some() {
            return;
        }
        match ev.evaluate(pi) {
            Ok((s, p)) => {
                if s.typical {
                    typical += 1;
                    if super::copies::claim_one_probability(&s, t, e) != p {
                        mismatches += 1;
                    }
                }
                c += s.c;
                i += s.i;
                f += s.f;
                g += s.g;
                sum += p * &scale;
            }
            Err(x) => err = Some(x),
        }
    });
    if let Some(x) = err {
        return Err(x);
    }
    let placements: BigUint = (1..=n).map(BigUint::from).product();
    let mean = |x: u64| BigRational::new(BigInt::from(x), BigInt::from(placements.clone()));
    Ok(ExactSummary {
        expected: sum / scale,
        baseline: baseline(n, e),
        c: mean(c),
        i: mean(i),
        f: mean(f),
        g: mean(g),
        typical: BigUint::from(typical),
        placements: placements.clone(),
        closed_form_mismatches: mismatches,
    })
}

/// `sum over pi of Pr[H_pi is a copy]`, exactly.
pub fn exact_expected_copies(ev: &CopyEvaluator) -> Result<BigRational, CountingError> {
    Ok(exact_summary(ev)?.expected)
}

/// Running mean and sum of squared deviations, mergeable in a fixed order.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        let total = self.count + other.count;
        let d = other.mean - self.mean;
        self.mean += d * other.count / total;
        self.m2 += other.m2 + d * d * self.count * other.count / total;
        self.count = total;
    }

    fn stderr(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

/// Ratio, C, I, F, G, typical indicator.
const FIELDS: usize = 6;

fn sample_permutation(n: usize, master: u64, index: u64) -> Vec<usize> {
    let mut rng = stream_rng(master, PERMUTATION_DOMAIN, index);
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(&mut rng);
    pi
}

fn chunked(
    samples: u64,
    seed: u64,
    n: usize,
    eval: impl Fn(&[usize]) -> Result<[f64; FIELDS], CountingError> + Sync,
) -> Result<[Moments; FIELDS], CountingError> {
    if samples == 0 {
        return Err(CountingError::NoSamples);
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<[Moments; FIELDS]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = [Moments::default(); FIELDS];
            for idx in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let values = eval(&sample_permutation(n, seed, idx))?;
                for (acc, v) in m.iter_mut().zip(values) {
                    acc.push(v);
                }
            }
            Ok(m)
        })
        .collect::<Result<_, CountingError>>()?;
    let mut total = [Moments::default(); FIELDS];
    for part in &parts {
        for (acc, p) in total.iter_mut().zip(part) {
            acc.merge(p);
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub n: usize,
    pub edges: usize,
    /// `n!/2^e` as an exact decimal fraction string.
    pub baseline: String,
    pub baseline_log2: f64,
    /// Estimated `E[G(H)] / baseline`.
    pub ratio: f64,
    pub stderr_ratio: f64,
    pub estimate_log2: f64,
    pub samples: u64,
    pub seed: u64,
    pub typical_fraction: f64,
    /// `11 d^3 t^4 / n`, the atypical-fraction bound for maximum degree `d`.
    pub atypical_bound: f64,
    pub averages: BlockAverages,
}

impl EstimateReport {
    pub fn estimate(&self) -> f64 {
        self.estimate_log2.exp2()
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockAverages {
    pub c: f64,
    pub i: f64,
    pub f: f64,
    pub g: f64,
    pub c_stderr: f64,
    pub i_stderr: f64,
    pub f_stderr: f64,
    pub g_stderr: f64,
    pub typical_fraction: f64,
    pub samples: u64,
}

fn averages_from(m: &[Moments; FIELDS], samples: u64) -> BlockAverages {
    BlockAverages {
        c: m[1].mean,
        i: m[2].mean,
        f: m[3].mean,
        g: m[4].mean,
        c_stderr: m[1].stderr(),
        i_stderr: m[2].stderr(),
        f_stderr: m[3].stderr(),
        g_stderr: m[4].stderr(),
        typical_fraction: m[5].mean,
        samples,
    }
}

pub fn atypical_bound(h: &Orientation, t: usize) -> f64 {
    let d = h.max_degree() as f64;
    11.0 * d.powi(3) * (t as f64).powi(4) / h.n() as f64
}

/// Monte Carlo estimate of `E[G(H)]` over `samples` uniform placements.
pub fn estimate_expected_copies(ev: &CopyEvaluator, samples: u64, seed: u64) -> Result<EstimateReport, CountingError> {
    let n = ev.n();
    let e = ev.pattern().edge_count();
    let m = chunked(samples, seed, n, |pi| {
        let (s, p) = ev.evaluate(pi)?;
        Ok([scaled_ratio(&p, e), s.c as f64, s.i as f64, s.f as f64, s.g as f64, s.typical as u8 as f64])
    })?;
    let base = baseline(n, e);
    let baseline_log2 = log2_rational(&base);
    let ratio = m[0].mean;
    Ok(EstimateReport {
        n,
        edges: e,
        baseline: base.to_string(),
        baseline_log2,
        ratio,
        stderr_ratio: m[0].stderr(),
        estimate_log2: baseline_log2 + ratio.log2(),
        samples,
        seed,
        typical_fraction: m[5].mean,
        atypical_bound: atypical_bound(ev.pattern(), ev.design().t),
        averages: averages_from(&m, samples),
    })
}

/// Sample means of the capture statistics over uniform placements.
pub fn empirical_block_averages(ev: &CopyEvaluator, samples: u64, seed: u64) -> Result<BlockAverages, CountingError> {
    let m = chunked(samples, seed, ev.n(), |pi| {
        let s = ev.stats(pi)?;
        Ok([0.0, s.c as f64, s.i as f64, s.f as f64, s.g as f64, s.typical as u8 as f64])
    })?;
    Ok(averages_from(&m, samples))
}

/// The window `stat * ((t-2)/(n-2) -+ 3t^2/n^2)` for an average capture count.
pub fn capture_window(stat: u64, n: usize, t: usize) -> (f64, f64) {
    let (n, t, s) = (n as f64, t as f64, stat as f64);
    let centre = (t - 2.0) / (n - 2.0);
    let slack = 3.0 * t * t / (n * n);
    (s * (centre - slack), s * (centre + slack))
}

/// The `n!`-normalised exact value of `stat * (t-2)/(n-2)` on pure designs.
pub fn pure_design_average(stat: u64, n: usize, t: usize) -> BigRational {
    BigRational::new(BigInt::from(stat * (t as u64 - 2)), BigInt::from(n as u64 - 2))
}
