//! The three-step construction of adjusted `t`-decompositions of `K_n`
//! (`n`, `t` odd), and the extension to even `n`.
//!
//! 1. With `q = n mod (t-1)` in `{1, 3, ..., t-2}`, strip `(q-1)/2` spanning
//!    factors made of vertex-disjoint triangles and at most two 4-cycles.
//!    Afterwards every residual degree is `n - q`, a multiple of `t - 1`.
//! 2. Strip `k <= t-1` vertex-disjoint copies of `K_{2t-1}` so the residual
//!    edge count becomes a multiple of `t(t-1)/2`. Such `k` exists because
//!    `gcd((2t-1)(t-1), t(t-1)/2) = (t-1)/2` for odd `t`.
//! 3. Decompose the residual into copies of `K_t`: by a known family when
//!    the residual is still complete, by backtracking otherwise.

use num_integer::Integer;

use super::search::{disjoint_cliques, triangle_square_factor};
use super::{
    backtracking_kt_decomposition, projective_plane_decomposition, steiner_triple_system, validate, Block, BlockKind,
    Decomposition, DesignError, SimpleGraph, DEFAULT_NODE_BUDGET,
};

#[derive(Clone, Debug)]
pub struct AdjustedBuild {
    pub decomposition: Decomposition,
    pub q: usize,
    pub factor_rounds: usize,
    pub cliques_removed: usize,
    pub degrees_after_factors: Vec<usize>,
    pub degrees_after_cliques: Vec<usize>,
    /// `"empty"`, `"sts"`, `"pg(2,4)"`, `"single block"` or `"backtracking"`.
    pub residual_method: &'static str,
}

pub fn adjusted_decomposition(n: usize, t: usize) -> Result<Decomposition, DesignError> {
    adjusted_decomposition_traced(n, t, DEFAULT_NODE_BUDGET).map(|b| b.decomposition)
}

fn infeasible(msg: String) -> DesignError {
    DesignError::InfeasibleAtDeskScale(msg)
}

// Budget exhaustion and exhausted searches both mean "not at this size".
fn desk_scale<T>(step: &str, res: Result<Option<T>, DesignError>) -> Result<T, DesignError> {
    match res {
        Ok(Some(x)) => Ok(x),
        Ok(None) => Err(infeasible(format!("{step}: search space exhausted"))),
        Err(DesignError::SearchBudget(b)) => Err(infeasible(format!("{step}: node budget of {b} exhausted"))),
        Err(e) => Err(e),
    }
}

pub fn adjusted_decomposition_traced(n: usize, t: usize, node_budget: u64) -> Result<AdjustedBuild, DesignError> {
    if n.is_multiple_of(2) || t.is_multiple_of(2) || t < 3 || n < t {
        return Err(DesignError::BadParameters { n, t });
    }
    let mut g = SimpleGraph::complete(n)?;
    let mut blocks = Vec::new();

    let q = n % (t - 1);
    let factor_rounds = (q - 1) / 2;
    for round in 0..factor_rounds {
        let squares = [0, 1, 2]
            .into_iter()
            .find(|&y| 4 * y <= n && (n - 4 * y).is_multiple_of(3))
            .ok_or_else(|| infeasible(format!("{n} vertices cannot be split into triangles and at most two 4-cycles")))?;
        let triangles = (n - 4 * squares) / 3;
        let factor = desk_scale(
            &format!("triangle/4-cycle factor {}", round + 1),
            triangle_square_factor(&g, triangles, squares, node_budget),
        )?;
        for cycle in factor {
            g.remove_cycle(&cycle);
            let kind = if cycle.len() == 3 { BlockKind::C3 } else { BlockKind::C4 };
            blocks.push(Block::new(kind, cycle));
        }
    }
    let degrees_after_factors = g.degrees();

    let big = 2 * t - 1;
    let per_big = big * (t - 1);
    let per_kt = t * (t - 1) / 2;
    let e = g.edge_count();
    let cliques_removed = (0..t)
        .find(|&k| (e + k * (per_kt - 1) * per_big).is_multiple_of(per_kt))
        .ok_or_else(|| infeasible(format!("no count of K_{big} copies makes {e} edges divisible by {per_kt}")))?;
    if cliques_removed * big > n {
        return Err(infeasible(format!(
            "{cliques_removed} vertex-disjoint copies of K_{big} need {} vertices, only {n} available",
            cliques_removed * big
        )));
    }
    if cliques_removed * per_big > e {
        return Err(infeasible(format!("{cliques_removed} copies of K_{big} need more than the {e} remaining edges")));
    }
    if cliques_removed > 0 {
        let cliques = desk_scale(
            &format!("{cliques_removed} disjoint K_{big}"),
            disjoint_cliques(&g, big, cliques_removed, node_budget),
        )?;
        for c in cliques {
            g.remove_clique(&c);
            blocks.push(Block::new(BlockKind::K2t1, c));
        }
    }
    let degrees_after_cliques = g.degrees();

    let untouched = factor_rounds == 0 && cliques_removed == 0;
    let (residual, residual_method) = if g.edge_count() == 0 {
        (Vec::new(), "empty")
    } else if untouched && n == t {
        (vec![(0..n).collect()], "single block")
    } else if untouched && t == 3 && matches!(n % 6, 1 | 3) {
        (family_blocks(steiner_triple_system(n)?), "sts")
    } else if untouched && t == 5 && n == 21 {
        (family_blocks(projective_plane_decomposition(4)?), "pg(2,4)")
    } else {
        let found = desk_scale(
            &format!("K_{t} decomposition of the residual"),
            backtracking_kt_decomposition(&g, t, node_budget),
        )?;
        (found, "backtracking")
    };
    blocks.extend(residual.into_iter().map(|v| Block::new(BlockKind::Kt, v)));

    let decomposition = Decomposition { n, t, blocks };
    debug_assert!(validate(&decomposition).passed());
    Ok(AdjustedBuild {
        decomposition,
        q,
        factor_rounds,
        cliques_removed,
        degrees_after_factors,
        degrees_after_cliques,
        residual_method,
    })
}

fn family_blocks(d: Decomposition) -> Vec<Vec<usize>> {
    d.blocks.into_iter().map(|b| b.vertices).collect()
}

/// Adds vertex `n - 1` to a valid decomposition of `K_{n-1}` (odd `n - 1`):
/// star paths `(2i, n-1, 2i+1)` for `i < n/2 - 1` and the edge `{n-2, n-1}`.
pub fn extend_to_even(d: &Decomposition) -> Result<Decomposition, DesignError> {
    let report = validate(d);
    if let Some(v) = report.first_violation() {
        return Err(DesignError::Invalid(v.clone()));
    }
    if d.n.is_multiple_of(2) {
        return Err(DesignError::BadParameters { n: d.n, t: d.t });
    }
    let n = d.n + 1;
    let centre = n - 1;
    let mut blocks = d.blocks.clone();
    for i in 0..(n / 2 - 1) {
        blocks.push(Block::new(BlockKind::StarPath, vec![2 * i, centre, 2 * i + 1]));
    }
    blocks.push(Block::new(BlockKind::Edge, vec![n - 2, centre]));
    Ok(Decomposition { n, t: d.t, blocks })
}

/// `gcd((2t-1)(t-1), t(t-1)/2)`, which equals `(t-1)/2` for odd `t`.
pub fn clique_gcd(t: usize) -> usize {
    ((2 * t - 1) * (t - 1)).gcd(&(t * (t - 1) / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(build: &AdjustedBuild) {
        let d = &build.decomposition;
        let r = validate(d);
        assert!(r.passed(), "n={} t={}: {:?}", d.n, d.t, r.first_violation());
        let n = d.n;
        assert!(build.degrees_after_factors.iter().all(|&x| x == n - build.q));
        assert!(build.degrees_after_cliques.iter().all(|&x| x % (d.t - 1) == 0));
    }

    #[test]
    fn fano_case() {
        let b = adjusted_decomposition_traced(7, 3, DEFAULT_NODE_BUDGET).unwrap();
        check(&b);
        assert_eq!((b.q, b.cliques_removed, b.residual_method), (1, 0, "sts"));
        assert_eq!(b.decomposition.count(BlockKind::Kt), 7);
    }

    #[test]
    fn eleven_three_removes_one_k5() {
        let b = adjusted_decomposition_traced(11, 3, DEFAULT_NODE_BUDGET).unwrap();
        check(&b);
        let d = &b.decomposition;
        assert_eq!(d.count(BlockKind::K2t1), 1);
        assert_eq!(d.count(BlockKind::Kt), 15);
        assert_eq!(validate(d).leftover_max_degree, 4);
        assert_eq!(b.residual_method, "backtracking");
    }

    #[test]
    fn twentyone_five_uses_projective_plane() {
        let b = adjusted_decomposition_traced(21, 5, DEFAULT_NODE_BUDGET).unwrap();
        check(&b);
        assert_eq!(b.residual_method, "pg(2,4)");
        assert!(b.decomposition.is_pure());
        assert_eq!(b.decomposition.blocks.len(), 21);
    }

    #[test]
    fn thirteen_five_is_infeasible() {
        match adjusted_decomposition(13, 5) {
            Err(DesignError::InfeasibleAtDeskScale(msg)) => assert!(msg.contains("27"), "{msg}"),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn small_cases() {
        for (n, t) in [(3, 3), (5, 3), (5, 5), (9, 3), (9, 9), (15, 3), (17, 3)] {
            let b = adjusted_decomposition_traced(n, t, DEFAULT_NODE_BUDGET).unwrap();
            check(&b);
        }
    }

    #[test]
    fn factor_round_case() {
        // q = 7 mod 4 = 3: one triangle + one 4-cycle factor, then K_9 removal is impossible
        // (7 < 9), so the residual must already be divisible: e = 21 - 7 = 14, 14 mod 10 != 0
        let r = adjusted_decomposition_traced(7, 5, DEFAULT_NODE_BUDGET);
        assert!(matches!(r, Err(DesignError::InfeasibleAtDeskScale(_))), "{r:?}");
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(adjusted_decomposition(8, 3), Err(DesignError::BadParameters { .. })));
        assert!(matches!(adjusted_decomposition(9, 4), Err(DesignError::BadParameters { .. })));
        assert!(matches!(adjusted_decomposition(3, 5), Err(DesignError::BadParameters { .. })));
    }

    #[test]
    fn gcd_identity() {
        for t in (3..=99).step_by(2) {
            assert_eq!(clique_gcd(t), (t - 1) / 2, "t={t}");
        }
    }

    #[test]
    fn even_extension() {
        let fano = adjusted_decomposition(7, 3).unwrap();
        let d8 = extend_to_even(&fano).unwrap();
        assert_eq!(d8.n, 8);
        assert_eq!(d8.count(BlockKind::StarPath), 3);
        assert_eq!(d8.count(BlockKind::Edge), 1);
        assert!(validate(&d8).passed(), "{:?}", validate(&d8).first_violation());

        let d22 = extend_to_even(&adjusted_decomposition(21, 5).unwrap()).unwrap();
        assert_eq!((d22.count(BlockKind::StarPath), d22.count(BlockKind::Edge)), (10, 1));
        assert!(validate(&d22).passed());

        let mut broken = fano.clone();
        broken.blocks.pop();
        assert!(matches!(extend_to_even(&broken), Err(DesignError::Invalid(_))));
    }
}
