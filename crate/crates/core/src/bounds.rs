//! Relabelling probabilities of regular tournaments, the parameter choice
//! `(t, rho, delta)` for given `(eps, k)`, and the closed-form boost bounds.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::tournament::Tournament;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("tournament on {0} vertices is not regular")]
    NotRegular(usize),
    #[error("relabelling enumeration supports odd 3 <= t <= {max}, got {t}")]
    RelabelSize { t: usize, max: usize },
    #[error("eps must lie in (0, 1], got {0}")]
    EpsOutOfRange(String),
    #[error("k must be at least 1")]
    KZero,
    #[error("need odd t >= 5, got {0}")]
    BadT(u64),
    #[error("cannot decide the inequalities at t = {0} in floating point")]
    Undecidable(u64),
    #[error("no odd t <= {0} satisfies the inequalities")]
    NoSolution(u64),
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
}

/// Parses `"1"`, `"0.25"`, `"-3.5"`, `"1/3"` or `"2.5e-1"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, BoundsError> {
    let err = || BoundsError::Parse(text.to_string());
    let s = text.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num = BigInt::from_str(a.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(b.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| err())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int}{frac}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| err())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(num * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(num, Pow::pow(&ten, (-scale) as u32))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub const RELABEL_MAX_T: usize = 9;

#[derive(Clone, Debug, Serialize)]
pub struct RelabelReport {
    pub t: usize,
    pub relabelings: u64,
    pub triples: u64,
    /// `Pr[y -> z | x -> y]`.
    pub consistent: String,
    /// `Pr[z -> y | x -> y]`.
    pub inconsistent: String,
    pub c3: String,
    pub t3: String,
    /// Ordered triples `(x, y, z)` where some probability differs from the closed form.
    pub mismatches: Vec<[usize; 3]>,
}

impl RelabelReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The closed forms `(t-1)/(2t-4)`, `(t-3)/(2t-4)`, `(t+1)/(4(t-2))`, `3(t-3)/(4(t-2))`.
pub fn relabel_formulas(t: usize) -> [BigRational; 4] {
    let t = t as i64;
    [rat(t - 1, 2 * t - 4), rat(t - 3, 2 * t - 4), rat(t + 1, 4 * (t - 2)), rat(3 * (t - 3), 4 * (t - 2))]
}

/// Enumerates all `t!` relabellings `sigma` of `r`, where `sigma(r)` has
/// `x -> y` iff `r` has `sigma(x) -> sigma(y)`, for every ordered triple.
pub fn verify_relabel_probabilities(r: &Tournament) -> Result<RelabelReport, BoundsError> {
    let t = r.n();
    if t.is_multiple_of(2) || !(3..=RELABEL_MAX_T).contains(&t) {
        return Err(BoundsError::RelabelSize { t, max: RELABEL_MAX_T });
    }
    if !r.is_regular() {
        return Err(BoundsError::NotRegular(t));
    }
    let perms: Vec<Vec<usize>> = {
        let mut all = Vec::new();
        crate::counting::for_each_permutation(t, |p| all.push(p.to_vec()));
        all
    };
    let expected = relabel_formulas(t);
    let mut mismatches = Vec::new();
    let mut observed: Option<[BigRational; 4]> = None;
    let mut triples = 0;
    for x in 0..t {
        for y in (0..t).filter(|&y| y != x) {
            for z in (0..t).filter(|&z| z != x && z != y) {
                triples += 1;
                let (mut xy, mut xy_yz, mut xy_zy, mut cyc, mut trans) = (0i64, 0i64, 0i64, 0i64, 0i64);
                for s in &perms {
                    let b = |u: usize, v: usize| r.beats(s[u], s[v]);
                    let (ab, bc, ca) = (b(x, y), b(y, z), b(z, x));
                    if ab {
                        xy += 1;
                        if bc {
                            xy_yz += 1;
                        } else {
                            xy_zy += 1;
                        }
                    }
                    if ab == bc && bc == ca {
                        cyc += 1;
                    } else {
                        trans += 1;
                    }
                }
                let total = perms.len() as i64;
                let got = [rat(xy_yz, xy), rat(xy_zy, xy), rat(cyc, total), rat(trans, total)];
                if got != expected {
                    mismatches.push([x, y, z]);
                }
                observed.get_or_insert(got);
            }
        }
    }
    let obs = observed.expect("t >= 3 has triples");
    Ok(RelabelReport {
        t,
        relabelings: perms.len() as u64,
        triples,
        consistent: obs[0].to_string(),
        inconsistent: obs[1].to_string(),
        c3: obs[2].to_string(),
        t3: obs[3].to_string(),
        mismatches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ParameterSolution {
    pub t: u64,
    pub rho: String,
    pub delta: f64,
    pub delta_exact: String,
    pub eps: String,
    pub k: u64,
    /// Outcome of the three inequalities at `t - 2` (none when `t - 2 < 3`).
    pub previous: Option<[bool; 3]>,
    /// `N` is only said to be sufficiently large; no value is computed.
    pub n_threshold: &'static str,
}

fn upow(base: u64, exp: &BigUint) -> Option<BigUint> {
    let e = exp.to_u32()?;
    Some(Pow::pow(BigUint::from(base), e))
}

/// Exponents above this go to log space.
const EXACT_EXPONENT_LIMIT: u64 = 20_000;

/// `[first, second, third]` inequality at odd `t` for `eps = a/b`, `k`.
pub fn check_inequalities(t: u64, eps: &BigRational, k: u64) -> Result<[bool; 3], BoundsError> {
    if t < 3 {
        return Err(BoundsError::BadT(t));
    }
    let (a, b) = (eps.numer().to_biguint().unwrap(), eps.denom().to_biguint().unwrap());
    let three_b_a = BigUint::from(3u32) * &b - &a;

    // (t+1)^b (t-2)^(3b-a) >= (t-1)^(3b-a) (t-2)^b
    let first = if b.to_u64().is_some_and(|x| x * 3 <= EXACT_EXPONENT_LIMIT) {
        let lhs = upow(t + 1, &b).unwrap() * upow(t - 2, &three_b_a).unwrap();
        let rhs = upow(t - 1, &three_b_a).unwrap() * upow(t - 2, &b).unwrap();
        lhs >= rhs
    } else {
        let e = eps.to_f64().unwrap();
        let tf = t as f64;
        let diff = ((tf + 1.0) / (tf - 2.0)).ln() - (3.0 - e) * (1.0 / (tf - 2.0)).ln_1p();
        decided(diff, t)?
    };

    // ((t-1)(t-3))^(2k^2 b) (2(t-1))^a >= (t-2)^(4k^2 b) (2t-3)^a
    let m = BigUint::from(2 * k * k) * &b;
    let second = if t == 3 {
        false
    } else if m.to_u64().is_some_and(|x| x <= EXACT_EXPONENT_LIMIT) && a.to_u64().is_some_and(|x| x <= EXACT_EXPONENT_LIMIT) {
        let lhs = upow((t - 1) * (t - 3), &m).unwrap() * upow(2 * (t - 1), &a).unwrap();
        let rhs = upow(t - 2, &(&m * 2u32)).unwrap() * upow(2 * t - 3, &a).unwrap();
        lhs >= rhs
    } else {
        let tf = t as f64;
        let rho = 1.0 / (tf - 2.0);
        let e = eps.to_f64().unwrap();
        let diff = (2.0 * (k * k) as f64 / e) * (-rho * rho).ln_1p() + rho.ln_1p() - (rho / 2.0).ln_1p();
        decided(diff, t)?
    };

    let third = BigUint::from(t) * &a >= BigUint::from(2u32) * &b;
    Ok([first, second, third])
}

fn decided(diff: f64, t: u64) -> Result<bool, BoundsError> {
    if diff.abs() < 1e-12 {
        return Err(BoundsError::Undecidable(t));
    }
    Ok(diff > 0.0)
}

pub const SOLVE_MAX_T: u64 = 100_000_001;

/// Least odd `t` satisfying all three inequalities.
pub fn solve_parameters(eps: &BigRational, k: u64) -> Result<ParameterSolution, BoundsError> {
    if !eps.is_positive() || *eps > BigRational::one() {
        return Err(BoundsError::EpsOutOfRange(eps.to_string()));
    }
    if k == 0 {
        return Err(BoundsError::KZero);
    }
    let mut t = 3;
    let mut previous = None;
    while t <= SOLVE_MAX_T {
        let checks = check_inequalities(t, eps, k)?;
        if checks.iter().all(|&c| c) {
            let rho = rat(1, t as i64 - 2);
            let delta = &rho / BigRational::from_integer(4.into());
            return Ok(ParameterSolution {
                t,
                rho: rho.to_string(),
                delta: delta.to_f64().unwrap(),
                delta_exact: delta.to_string(),
                eps: eps.to_string(),
                k,
                previous,
                n_threshold: "not computed",
            });
        }
        previous = Some(checks);
        t += 2;
    }
    Err(BoundsError::NoSolution(SOLVE_MAX_T))
}

/// `((t-1)/(t-2))^(k(t-3)) (1 - 1/(t-2)^2)^(k^2 t) (1 - (3t-5)/(t-1)^3)^(k^2 t)`,
/// evaluated in log space. Tends to `e^k` as `t` grows.
pub fn kreg_boost_formula(k: u64, t: u64) -> Result<f64, BoundsError> {
    if t < 5 || t.is_multiple_of(2) {
        return Err(BoundsError::BadT(t));
    }
    let (k, tf) = (k as f64, t as f64);
    let log = k * (tf - 3.0) * (1.0 / (tf - 2.0)).ln_1p()
        + k * k * tf * (-1.0 / ((tf - 2.0) * (tf - 2.0))).ln_1p()
        + k * k * tf * (-(3.0 * tf - 5.0) / (tf - 1.0).powi(3)).ln_1p();
    Ok(log.exp())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AmGmBound {
    pub value: f64,
    pub log2: f64,
    /// `C + (3 - eps) F - I - G`.
    pub margin: f64,
    /// `(eps / 2) t`.
    pub target: f64,
}

/// `((t-1)/(t-2))^C ((t-3)/(t-2))^I ((t+1)/(t-2))^F ((t-3)/(t-2))^G` with `0^0 = 1`.
pub fn amgm_bound(c: f64, i: f64, f: f64, g: f64, t: usize, eps: f64) -> AmGmBound {
    let tf = t as f64;
    let term = |base: f64, exp: f64| if exp == 0.0 { 0.0 } else { exp * base.log2() };
    let log2 = term((tf - 1.0) / (tf - 2.0), c)
        + term((tf - 3.0) / (tf - 2.0), i)
        + term((tf + 1.0) / (tf - 2.0), f)
        + term((tf - 3.0) / (tf - 2.0), g);
    AmGmBound { value: log2.exp2(), log2, margin: c + (3.0 - eps) * f - i - g, target: eps / 2.0 * tf }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn relabel_small_t() {
        let r3 = verify_relabel_probabilities(&Tournament::circulant(3).unwrap()).unwrap();
        assert!(r3.passed());
        assert_eq!((r3.consistent.as_str(), r3.inconsistent.as_str(), r3.c3.as_str(), r3.t3.as_str()), ("1", "0", "1", "0"));
        let r5 = verify_relabel_probabilities(&Tournament::circulant(5).unwrap()).unwrap();
        assert!(r5.passed());
        assert_eq!((r5.consistent.as_str(), r5.c3.as_str(), r5.relabelings), ("2/3", "1/2", 120));
        let r7 = verify_relabel_probabilities(&Tournament::circulant(7).unwrap()).unwrap();
        assert_eq!((r7.consistent.as_str(), r7.c3.as_str()), ("3/5", "2/5"));
        assert!(verify_relabel_probabilities(&Tournament::quadratic_residue(7).unwrap()).unwrap().passed());
    }

    #[test]
    fn relabel_t9() {
        assert!(verify_relabel_probabilities(&Tournament::circulant(9).unwrap()).unwrap().passed());
    }

    #[test]
    fn relabel_rejects() {
        assert_eq!(verify_relabel_probabilities(&Tournament::transitive(5)).unwrap_err(), BoundsError::NotRegular(5));
        assert!(verify_relabel_probabilities(&Tournament::circulant(11).unwrap()).is_err());
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(q("1"), rat(1, 1));
        assert_eq!(q("0.1"), rat(1, 10));
        assert_eq!(q("1/3"), rat(1, 3));
        assert_eq!(q(" 2.5e-1 "), rat(1, 4));
        assert_eq!(q("-1.5"), rat(-3, 2));
        assert_eq!(q(".5"), rat(1, 2));
        for bad in ["", "abc", "1/0", "1..2", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn solve_examples() {
        let s = solve_parameters(&q("1"), 1).unwrap();
        assert_eq!((s.t, s.delta_exact.as_str(), s.rho.as_str()), (7, "1/20", "1/5"));
        assert_eq!(s.delta, 0.05);
        let s = solve_parameters(&q("1"), 2).unwrap();
        assert_eq!((s.t, s.delta_exact.as_str()), (19, "1/68"));
        assert!(solve_parameters(&q("0.1"), 1).unwrap().t >= 21);
    }

    /// Real-valued scan, unrelated to the cross-multiplied integer form.
    fn float_scan(eps: f64, k: u64) -> u64 {
        let mut t = 3u64;
        loop {
            let tf = t as f64;
            let rho = 1.0 / (tf - 2.0);
            let one = (tf + 1.0) / (tf - 2.0) >= ((tf - 1.0) / (tf - 2.0)).powf(3.0 - eps);
            let two = (1.0 - rho * rho).powf(2.0 * (k * k) as f64 / eps) * (1.0 + rho) >= 1.0 + rho / 2.0;
            if one && two && tf >= 2.0 / eps {
                return t;
            }
            t += 2;
        }
    }

    #[test]
    fn solver_matches_float_scan() {
        for (eps, k) in [("1", 1), ("1", 2), ("1", 3), ("0.5", 1), ("0.1", 1), ("1/3", 2), ("0.75", 4), ("0.2", 2)] {
            let e = q(eps);
            let s = solve_parameters(&e, k).unwrap();
            assert_eq!(s.t, float_scan(e.to_f64().unwrap(), k), "eps={eps} k={k}");
            assert!(check_inequalities(s.t, &e, k).unwrap().iter().all(|&c| c));
            if let Some(prev) = s.previous {
                assert!(prev.iter().any(|&c| !c));
            }
        }
    }

    #[test]
    fn solver_rejects() {
        assert!(matches!(solve_parameters(&q("0"), 1), Err(BoundsError::EpsOutOfRange(_))));
        assert!(matches!(solve_parameters(&q("1.5"), 1), Err(BoundsError::EpsOutOfRange(_))));
        assert_eq!(solve_parameters(&q("1"), 0).unwrap_err(), BoundsError::KZero);
    }

    #[test]
    fn boost_formula_values() {
        assert!((kreg_boost_formula(1, 7).unwrap() - 0.909).abs() < 1e-3);
        let e = std::f64::consts::E;
        assert!((kreg_boost_formula(1, 10_001).unwrap() / e - 1.0).abs() < 1e-3);
        assert!((kreg_boost_formula(2, 100_001).unwrap() / (e * e) - 1.0).abs() < 1e-2);
        for k in 1..=3 {
            let v = kreg_boost_formula(k, 1_000_001).unwrap();
            assert!((v / (k as f64).exp() - 1.0).abs() < 1e-3, "k={k}: {v}");
        }
        assert_eq!(kreg_boost_formula(1, 4), Err(BoundsError::BadT(4)));
    }

    #[test]
    fn amgm_examples() {
        let none = amgm_bound(0.0, 0.0, 0.0, 0.0, 5, 1.0);
        assert_eq!(none.value, 1.0);
        let fano = amgm_bound(1.4, 0.0, 0.0, 0.0, 3, 1.0);
        assert!((fano.value - 1.4f64.exp2()).abs() < 1e-12);
        assert_eq!(amgm_bound(1.0, 0.5, 0.0, 0.0, 3, 1.0).value, 0.0);
        assert_eq!(amgm_bound(1.0, 0.0, 0.0, 0.25, 3, 1.0).value, 0.0);
        let m = amgm_bound(3.0, 1.0, 2.0, 1.0, 7, 0.5);
        assert_eq!((m.margin, m.target), (6.0, 1.75));
    }
}
