use num_bigint::BigUint;

use super::CountingError;
use crate::orientation::Orientation;
use crate::tournament::Tournament;

pub const BRUTE_FORCE_MAX_N: usize = 10;
pub const DP_MAX_N: usize = 20;

/// Number of permutations `pi` with `(pi(u), pi(v))` an arc of `t` for every arc `(u, v)` of `h`.
pub fn count_labeled_copies(h: &Orientation, t: &Tournament) -> Result<BigUint, CountingError> {
    let n = h.n();
    if t.n() != n {
        return Err(CountingError::SizeMismatch { pattern: n, other: t.n() });
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(CountingError::BruteForceBudget { n, max: BRUTE_FORCE_MAX_N });
    }

    // place vertices in BFS order so constraints bite early
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        order.push(root);
        let mut head = order.len() - 1;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for w in h.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    // for each step, arcs to earlier vertices: (earlier step, true if the new vertex is the tail)
    let mut constraints: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    let mut step_of = vec![0; n];
    for (s, &v) in order.iter().enumerate() {
        step_of[v] = s;
    }
    for &(u, v) in h.edges() {
        let (su, sv) = (step_of[u], step_of[v]);
        if su > sv {
            constraints[su].push((sv, true));
        } else {
            constraints[sv].push((su, false));
        }
    }

    fn go(step: usize, image: &mut [usize], used: u32, cons: &[Vec<(usize, bool)>], t: &Tournament) -> u64 {
        let n = image.len();
        if step == n {
            return 1;
        }
        let mut total = 0;
        for x in 0..n {
            if used >> x & 1 == 1 {
                continue;
            }
            let ok = cons[step].iter().all(|&(s, tail)| {
                let y = image[s];
                if tail { t.beats(x, y) } else { t.beats(y, x) }
            });
            if ok {
                image[step] = x;
                total += go(step + 1, image, used | 1 << x, cons, t);
            }
        }
        total
    }

    let mut image = vec![0; n];
    Ok(BigUint::from(go(0, &mut image, 0, &constraints, t)))
}

fn dp_check(t: &Tournament) -> Result<usize, CountingError> {
    let n = t.n();
    if n > DP_MAX_N {
        return Err(CountingError::DpBudget { n, max: DP_MAX_N });
    }
    Ok(n)
}

/// Directed Hamilton cycles (each counted once, not per starting vertex).
pub fn count_hamilton_cycles(t: &Tournament) -> Result<BigUint, CountingError> {
    let n = dp_check(t)?;
    if n < 3 {
        return Ok(BigUint::from(0u32));
    }
    // paths starting at 0; state is the set of other visited vertices (bit v-1) and the endpoint
    let m = n - 1;
    let full = (1usize << m) - 1;
    let mut dp = vec![0u64; (1 << m) * m];
    for v in 1..n {
        if t.beats(0, v) {
            dp[(1 << (v - 1)) * m + (v - 1)] = 1;
        }
    }
    for mask in 1..=full {
        for end in 0..m {
            let ways = dp[mask * m + end];
            if ways == 0 {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let next = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if t.beats(end + 1, next + 1) {
                    dp[(mask | 1 << next) * m + next] += ways;
                }
            }
        }
    }
    let total: u64 = (0..m).filter(|&e| t.beats(e + 1, 0)).map(|e| dp[full * m + e]).sum();
    Ok(BigUint::from(total))
}

pub fn count_hamilton_paths(t: &Tournament) -> Result<BigUint, CountingError> {
    let n = dp_check(t)?;
    if n == 0 {
        return Ok(BigUint::from(0u32));
    }
    let full = (1usize << n) - 1;
    let mut dp = vec![0u64; (1 << n) * n];
    for v in 0..n {
        dp[(1 << v) * n + v] = 1;
    }
    for mask in 1..=full {
        for end in 0..n {
            let ways = dp[mask * n + end];
            if ways == 0 {
                continue;
            }
            let mut rest = full & !mask;
            while rest != 0 {
                let next = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if t.beats(end, next) {
                    dp[(mask | 1 << next) * n + next] += ways;
                }
            }
        }
    }
    Ok(BigUint::from((0..n).map(|e| dp[full * n + e]).sum::<u64>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orientation::{make_pattern, PatternKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cycle(n: usize) -> Orientation {
        make_pattern(PatternKind::Cycle, n, None, None).unwrap()
    }

    fn path(n: usize) -> Orientation {
        make_pattern(PatternKind::Path, n, None, None).unwrap()
    }

    /// Every tournament on `n` vertices, pairs in lexicographic order.
    fn all_tournaments(n: usize) -> Vec<Tournament> {
        let pairs = n * (n - 1) / 2;
        (0..1u64 << pairs)
            .map(|bits| {
                let mut k = 0;
                Tournament::from_fn(n, |_, _| {
                    k += 1;
                    bits >> (k - 1) & 1 == 1
                })
            })
            .collect()
    }

    #[test]
    fn triangle_counts() {
        let c3 = cycle(3);
        assert_eq!(count_labeled_copies(&c3, &Tournament::circulant(3).unwrap()).unwrap(), BigUint::from(3u32));
        assert_eq!(count_labeled_copies(&c3, &Tournament::transitive(3)).unwrap(), BigUint::from(0u32));
        assert_eq!(count_hamilton_cycles(&Tournament::circulant(3).unwrap()).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn transitive_has_one_path_no_cycle() {
        for n in 1..=12 {
            let t = Tournament::transitive(n);
            assert_eq!(count_hamilton_paths(&t).unwrap(), BigUint::from(1u32));
            assert_eq!(count_hamilton_cycles(&t).unwrap(), BigUint::from(0u32));
        }
    }

    #[test]
    fn matching_on_four_vertices() {
        let m2 = make_pattern(PatternKind::Matching, 4, None, None).unwrap();
        let all = all_tournaments(4);
        assert_eq!(all.len(), 64);
        for t in &all {
            assert_eq!(count_labeled_copies(&m2, t).unwrap(), BigUint::from(6u32));
        }
    }

    #[test]
    fn dp_agrees_with_brute_force() {
        let check = |t: &Tournament| {
            let n = t.n();
            let cyc = count_labeled_copies(&cycle(n), t).unwrap();
            assert_eq!(cyc, count_hamilton_cycles(t).unwrap() * BigUint::from(n));
            assert_eq!(count_labeled_copies(&path(n), t).unwrap(), count_hamilton_paths(t).unwrap());
        };
        for n in 3..=5 {
            all_tournaments(n).iter().for_each(check);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for k in 0..100 {
            check(&Tournament::random(6 + k % 4, &mut rng));
        }
        for m in [5, 7, 9] {
            check(&Tournament::circulant(m).unwrap());
        }
    }

    #[test]
    fn budgets() {
        let t = Tournament::transitive(11);
        assert!(matches!(count_labeled_copies(&path(11), &t), Err(CountingError::BruteForceBudget { n: 11, .. })));
        assert!(matches!(count_hamilton_paths(&Tournament::transitive(21)), Err(CountingError::DpBudget { .. })));
        assert!(matches!(count_labeled_copies(&path(5), &t), Err(CountingError::SizeMismatch { .. })));
    }
}
