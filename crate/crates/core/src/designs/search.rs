//! Deterministic backtracking searches on small graphs: `K_t`
//! decompositions, spanning triangle/4-cycle factors, and vertex-disjoint
//! cliques. Branching is lexicographic throughout.

use super::DesignError;

pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

/// Undirected graph on at most 128 vertices with bit-row adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    rows: Vec<u128>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Result<Self, DesignError> {
        if n > 128 {
            return Err(DesignError::TooLarge(n));
        }
        Ok(SimpleGraph { n, rows: vec![0; n] })
    }

    pub fn complete(n: usize) -> Result<Self, DesignError> {
        let mut g = SimpleGraph::empty(n)?;
        let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        for v in 0..n {
            g.rows[v] = all & !(1 << v);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, DesignError> {
        let mut g = SimpleGraph::empty(n)?;
        for &(u, v) in edges {
            g.add(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, u: usize, v: usize) {
        self.rows[u] |= 1 << v;
        self.rows[v] |= 1 << u;
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        self.rows[u] &= !(1 << v);
        self.rows[v] &= !(1 << u);
    }

    #[inline]
    pub fn has(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn remove_clique(&mut self, vs: &[usize]) {
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                self.remove(u, v);
            }
        }
    }

    fn add_clique(&mut self, vs: &[usize]) {
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                self.add(u, v);
            }
        }
    }

    pub fn remove_cycle(&mut self, vs: &[usize]) {
        for i in 0..vs.len() {
            self.remove(vs[i], vs[(i + 1) % vs.len()]);
        }
    }
}

fn bits(mut set: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            None
        } else {
            let v = set.trailing_zeros() as usize;
            set &= set - 1;
            Some(v)
        }
    })
}

/// Bits strictly above `v`.
#[inline]
fn above(v: usize) -> u128 {
    if v >= 127 { 0 } else { !0u128 << (v + 1) }
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn tick(&mut self) -> Result<(), DesignError> {
        self.used += 1;
        if self.used > self.limit {
            Err(DesignError::SearchBudget(self.limit))
        } else {
            Ok(())
        }
    }
}

/// Partitions the edges of `g` into copies of `K_t`.
///
/// Returns `Ok(None)` when the search space is exhausted without a
/// decomposition, and `Err(SearchBudget)` when `node_budget` runs out first.
pub fn backtracking_kt_decomposition(
    g: &SimpleGraph,
    t: usize,
    node_budget: u64,
) -> Result<Option<Vec<Vec<usize>>>, DesignError> {
    if t < 2 {
        return Err(DesignError::Divisibility(format!("clique size t = {t} must be at least 2")));
    }
    let per = t * (t - 1) / 2;
    let e = g.edge_count();
    if !e.is_multiple_of(per) {
        return Err(DesignError::Divisibility(format!("{e} edges is not divisible by C({t},2) = {per}")));
    }
    if let Some(v) = (0..g.n).find(|&v| !g.degree(v).is_multiple_of(t - 1)) {
        return Err(DesignError::Divisibility(format!(
            "vertex {v} has degree {} not divisible by t-1 = {}",
            g.degree(v),
            t - 1
        )));
    }
    let mut work = g.clone();
    let mut out = Vec::with_capacity(e / per);
    let mut budget = Budget { used: 0, limit: node_budget };
    if kt_step(&mut work, t, &mut out, &mut budget)? {
        Ok(Some(out))
    } else {
        Ok(None)
    }
}

fn kt_step(g: &mut SimpleGraph, t: usize, out: &mut Vec<Vec<usize>>, budget: &mut Budget) -> Result<bool, DesignError> {
    budget.tick()?;
    let Some(u) = (0..g.n).find(|&v| g.rows[v] != 0) else {
        return Ok(true);
    };
    let v = g.rows[u].trailing_zeros() as usize;
    let cands = g.rows[u] & g.rows[v];
    let mut clique = vec![u, v];
    if extend_clique(g, t, cands, &mut clique, out, budget)? {
        return Ok(true);
    }
    Ok(false)
}

// Grows `clique` from `cands` in increasing order; on each full clique,
// removes it and recurses into the residual graph.
fn extend_clique(
    g: &mut SimpleGraph,
    t: usize,
    cands: u128,
    clique: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    budget: &mut Budget,
) -> Result<bool, DesignError> {
    if clique.len() == t {
        let mut block = clique.clone();
        block.sort_unstable();
        g.remove_clique(&block);
        out.push(block);
        if kt_step(g, t, out, budget)? {
            return Ok(true);
        }
        let block = out.pop().expect("pushed above");
        g.add_clique(&block);
        return Ok(false);
    }
    let need = t - clique.len();
    if (cands.count_ones() as usize) < need {
        return Ok(false);
    }
    for w in bits(cands) {
        clique.push(w);
        let next = cands & g.rows[w] & above(w);
        let found = extend_clique(g, t, next, clique, out, budget)?;
        clique.pop();
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Covers every vertex of `g` exactly once by `triangles` vertex-disjoint
/// triangles and `squares` 4-cycles. Cycles are returned in cyclic order.
pub(crate) fn triangle_square_factor(
    g: &SimpleGraph,
    triangles: usize,
    squares: usize,
    node_budget: u64,
) -> Result<Option<Vec<Vec<usize>>>, DesignError> {
    if 3 * triangles + 4 * squares != g.n {
        return Err(DesignError::Divisibility(format!(
            "{triangles} triangles and {squares} 4-cycles cannot cover {} vertices",
            g.n
        )));
    }
    let mut out = Vec::new();
    let mut budget = Budget { used: 0, limit: node_budget };
    let free = if g.n == 128 { u128::MAX } else { (1u128 << g.n) - 1 };
    if factor_step(g, free, triangles, squares, &mut out, &mut budget)? {
        Ok(Some(out))
    } else {
        Ok(None)
    }
}

fn factor_step(
    g: &SimpleGraph,
    free: u128,
    triangles: usize,
    squares: usize,
    out: &mut Vec<Vec<usize>>,
    budget: &mut Budget,
) -> Result<bool, DesignError> {
    budget.tick()?;
    if free == 0 {
        return Ok(true);
    }
    let v = free.trailing_zeros() as usize;
    let rest = free & !(1 << v);
    let nv = g.rows[v] & rest;
    if triangles > 0 {
        for a in bits(nv) {
            for b in bits(nv & g.rows[a] & above(a)) {
                out.push(vec![v, a, b]);
                if factor_step(g, rest & !(1 << a) & !(1 << b), triangles - 1, squares, out, budget)? {
                    return Ok(true);
                }
                out.pop();
            }
        }
    }
    if squares > 0 {
        // v - a - b - c - v with a < c to skip the reversed copy
        for a in bits(nv) {
            for b in bits(g.rows[a] & rest & !(1 << a)) {
                for c in bits(nv & g.rows[b] & above(a) & !(1 << b)) {
                    out.push(vec![v, a, b, c]);
                    let left = rest & !(1 << a) & !(1 << b) & !(1 << c);
                    if factor_step(g, left, triangles, squares - 1, out, budget)? {
                        return Ok(true);
                    }
                    out.pop();
                }
            }
        }
    }
    Ok(false)
}

/// Finds `count` pairwise vertex-disjoint cliques of the given size.
pub(crate) fn disjoint_cliques(
    g: &SimpleGraph,
    size: usize,
    count: usize,
    node_budget: u64,
) -> Result<Option<Vec<Vec<usize>>>, DesignError> {
    let mut out = Vec::new();
    let mut budget = Budget { used: 0, limit: node_budget };
    let free = if g.n == 128 { u128::MAX } else { (1u128 << g.n) - 1 };
    if cliques_step(g, free, size, count, &mut out, &mut budget)? {
        Ok(Some(out))
    } else {
        Ok(None)
    }
}

fn cliques_step(
    g: &SimpleGraph,
    free: u128,
    size: usize,
    count: usize,
    out: &mut Vec<Vec<usize>>,
    budget: &mut Budget,
) -> Result<bool, DesignError> {
    if count == 0 {
        return Ok(true);
    }
    let mut clique = Vec::with_capacity(size);
    grow_clique(g, free, free, size, count, &mut clique, out, budget)
}

#[allow(clippy::too_many_arguments)]
fn grow_clique(
    g: &SimpleGraph,
    free: u128,
    cands: u128,
    size: usize,
    count: usize,
    clique: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    budget: &mut Budget,
) -> Result<bool, DesignError> {
    budget.tick()?;
    if clique.len() == size {
        let used = clique.iter().fold(0u128, |m, &v| m | 1 << v);
        out.push(clique.clone());
        if cliques_step(g, free & !used, size, count - 1, out, budget)? {
            return Ok(true);
        }
        out.pop();
        return Ok(false);
    }
    if (cands.count_ones() as usize) < size - clique.len() {
        return Ok(false);
    }
    for w in bits(cands) {
        clique.push(w);
        let next = cands & g.rows[w] & above(w);
        let found = grow_clique(g, free, next, size, count, clique, out, budget)?;
        clique.pop();
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}
