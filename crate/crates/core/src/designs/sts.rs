//! Steiner triple systems via the Bose (n = 3 mod 6) and Skolem (n = 1 mod 6)
//! constructions. Triples are stored as `K_t` blocks with `t = 3`.

use super::{Block, BlockKind, Decomposition, DesignError};

pub fn steiner_triple_system(n: usize) -> Result<Decomposition, DesignError> {
    let triples = match n % 6 {
        3 => bose(n / 3),
        1 if n >= 7 => skolem(n / 6),
        r => return Err(DesignError::UnsupportedResidue(n, r)),
    };
    Ok(Decomposition {
        n,
        t: 3,
        blocks: triples.into_iter().map(|tr| Block::new(BlockKind::Kt, tr.to_vec())).collect(),
    })
}

/// Points `(x, i)` for `x` in `Z_m` (m odd), `i` in `0..3`, numbered `3x + i`.
/// Uses the idempotent commutative quasigroup `x o y = (x + y)/2 mod m`.
fn bose(m: usize) -> Vec<[usize; 3]> {
    let half = m.div_ceil(2); // inverse of 2 mod m
    let op = |x: usize, y: usize| (x + y) * half % m;
    let p = |x: usize, i: usize| 3 * x + i % 3;
    let mut out = Vec::with_capacity(m * (3 * m - 1) / 2);
    for x in 0..m {
        out.push([p(x, 0), p(x, 1), p(x, 2)]);
    }
    for i in 0..3 {
        for x in 0..m {
            for y in (x + 1)..m {
                out.push([p(x, i), p(y, i), p(op(x, y), i + 1)]);
            }
        }
    }
    out
}

/// `n = 6k + 1`: points `(x, i)` for `x` in `Z_2k` numbered `3x + i`, plus
/// the point at infinity `6k`. Uses the half-idempotent commutative
/// quasigroup obtained from addition mod 2k by sending `2j -> j` and
/// `2j + 1 -> k + j`.
fn skolem(k: usize) -> Vec<[usize; 3]> {
    let m = 2 * k;
    let op = |x: usize, y: usize| {
        let s = (x + y) % m;
        if s.is_multiple_of(2) { s / 2 } else { k + s / 2 }
    };
    let p = |x: usize, i: usize| 3 * x + i % 3;
    let inf = 3 * m;
    let mut out = Vec::new();
    for x in 0..k {
        out.push([p(x, 0), p(x, 1), p(x, 2)]);
    }
    for x in 0..k {
        for i in 0..3 {
            out.push([inf, p(k + x, i), p(x, i + 1)]);
        }
    }
    for i in 0..3 {
        for x in 0..m {
            for y in (x + 1)..m {
                out.push([p(x, i), p(y, i), p(op(x, y), i + 1)]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::validate;

    #[test]
    fn small_orders_are_partitions() {
        for n in [3, 7, 9, 13, 15, 19, 21, 25, 27, 31, 33] {
            let d = steiner_triple_system(n).unwrap();
            assert_eq!(d.blocks.len(), n * (n - 1) / 6, "n={n}");
            let r = validate(&d);
            assert!(r.passed(), "n={n}: {:?}", r.first_violation());
        }
    }

    #[test]
    fn wrong_residues_rejected() {
        assert_eq!(steiner_triple_system(8), Err(DesignError::UnsupportedResidue(8, 2)));
        for n in [1, 5, 11, 12, 17] {
            assert!(steiner_triple_system(n).is_err(), "n={n}");
        }
    }
}
