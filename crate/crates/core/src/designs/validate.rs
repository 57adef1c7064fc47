use std::fmt;

use serde::Serialize;

use super::{BlockKind, Decomposition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    BadParameters { n: usize, t: usize },
    BlockArity { block: usize, kind: BlockKind, expected: usize, found: usize },
    VertexOutOfRange { block: usize, vertex: usize },
    RepeatedVertex { block: usize, vertex: usize },
    PairCoveredTwice { u: usize, v: usize, first: usize, second: usize },
    PairUncovered { u: usize, v: usize },
    BudgetExceeded { kind: BlockKind, count: usize, limit: usize },
    LeftoverDegree { vertex: usize, degree: usize, limit: usize },
    EvenExtension { reason: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadParameters { n, t } => write!(f, "need odd t >= 3 (n = {n}, t = {t})"),
            Violation::BlockArity { block, kind, expected, found } => {
                write!(f, "block {block} ({}) has {found} vertices, expected {expected}", kind.name())
            }
            Violation::VertexOutOfRange { block, vertex } => write!(f, "block {block} uses vertex {vertex} out of range"),
            Violation::RepeatedVertex { block, vertex } => write!(f, "block {block} repeats vertex {vertex}"),
            Violation::PairCoveredTwice { u, v, first, second } => {
                write!(f, "pair {{{u},{v}}} covered twice (blocks {first} and {second})")
            }
            Violation::PairUncovered { u, v } => write!(f, "pair {{{u},{v}}} is not covered"),
            Violation::BudgetExceeded { kind, count, limit } => {
                write!(f, "{count} {} blocks exceed the budget of {limit}", kind.name())
            }
            Violation::LeftoverDegree { vertex, degree, limit } => {
                write!(f, "leftover graph has degree {degree} at vertex {vertex}, limit {limit}")
            }
            Violation::EvenExtension { reason } => write!(f, "even extension: {reason}"),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub pairs_covered: usize,
    pub leftover_max_degree: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

/// Checks partition exactness, leftover budgets and the leftover degree bound.
///
/// With star-path or edge blocks present the decomposition is read as an
/// even extension: the budgets and degree bound apply to the odd part on
/// `n - 1` vertices, and vertex `n - 1` must be covered by exactly `n/2 - 1`
/// star paths plus one edge.
pub fn validate(d: &Decomposition) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (n, t) = (d.n, d.t);
    if t < 3 || t % 2 == 0 {
        report.violations.push(Violation::BadParameters { n, t });
        return report;
    }

    let mut shape_ok = true;
    for (b, block) in d.blocks.iter().enumerate() {
        let expected = block.kind.arity(t);
        if block.vertices.len() != expected {
            report.violations.push(Violation::BlockArity { block: b, kind: block.kind, expected, found: block.vertices.len() });
            shape_ok = false;
            continue;
        }
        for (i, &v) in block.vertices.iter().enumerate() {
            if v >= n {
                report.violations.push(Violation::VertexOutOfRange { block: b, vertex: v });
                shape_ok = false;
            } else if block.vertices[..i].contains(&v) {
                report.violations.push(Violation::RepeatedVertex { block: b, vertex: v });
                shape_ok = false;
            }
        }
    }
    if !shape_ok {
        return report;
    }

    let mut owner = vec![usize::MAX; n * n];
    for (b, block) in d.blocks.iter().enumerate() {
        for (u, v) in block.pairs() {
            let (u, v) = (u.min(v), u.max(v));
            let slot = &mut owner[u * n + v];
            if *slot != usize::MAX {
                report.violations.push(Violation::PairCoveredTwice { u, v, first: *slot, second: b });
            } else {
                *slot = b;
                report.pairs_covered += 1;
            }
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if owner[u * n + v] == usize::MAX {
                report.violations.push(Violation::PairUncovered { u, v });
            }
        }
    }

    let extension = d.count(BlockKind::StarPath) + d.count(BlockKind::Edge) > 0;
    let core_n = if extension { n - 1 } else { n };
    if extension {
        check_even_extension(d, &mut report);
    } else if n % 2 == 0 {
        report.violations.push(Violation::EvenExtension {
            reason: format!("n = {n} is even but no star-path/edge extension blocks are present"),
        });
    }

    let budgets = [
        (BlockKind::C3, core_n * (t - 3) / 6),
        (BlockKind::C4, t - 3),
        (BlockKind::K2t1, t - 1),
    ];
    for (kind, limit) in budgets {
        let count = d.count(kind);
        if count > limit {
            report.violations.push(Violation::BudgetExceeded { kind, count, limit });
        }
    }

    let mut degree = vec![0usize; n];
    for block in &d.blocks {
        if matches!(block.kind, BlockKind::C3 | BlockKind::C4 | BlockKind::K2t1) {
            for (u, v) in block.pairs() {
                degree[u] += 1;
                degree[v] += 1;
            }
        }
    }
    let limit = 3 * t - 5;
    report.leftover_max_degree = degree.iter().copied().max().unwrap_or(0);
    if let Some((vertex, &deg)) = degree.iter().enumerate().find(|(_, &deg)| deg > limit) {
        report.violations.push(Violation::LeftoverDegree { vertex, degree: deg, limit });
    }
    report
}

fn check_even_extension(d: &Decomposition, report: &mut ValidationReport) {
    let n = d.n;
    let push = |report: &mut ValidationReport, reason: String| {
        report.violations.push(Violation::EvenExtension { reason });
    };
    if n % 2 == 1 {
        push(report, format!("star-path/edge blocks need even n, got {n}"));
        return;
    }
    let centre = n - 1;
    let stars = d.count(BlockKind::StarPath);
    let edges = d.count(BlockKind::Edge);
    if stars != n / 2 - 1 || edges != 1 {
        push(report, format!("expected {} star paths and 1 edge, found {stars} and {edges}", n / 2 - 1));
    }
    for block in &d.blocks {
        match block.kind {
            BlockKind::StarPath if block.vertices[1] != centre => {
                push(report, format!("star path {:?} is not centred at {centre}", block.vertices));
            }
            BlockKind::Edge if !block.vertices.contains(&centre) => {
                push(report, format!("edge {:?} does not touch {centre}", block.vertices));
            }
            BlockKind::Kt | BlockKind::K2t1 | BlockKind::C3 | BlockKind::C4 if block.vertices.contains(&centre) => {
                push(report, format!("{} block {:?} touches the extension vertex", block.kind.name(), block.vertices));
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{steiner_triple_system, Block};

    #[test]
    fn fano_passes() {
        let d = steiner_triple_system(7).unwrap();
        let r = validate(&d);
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.pairs_covered, 21);
    }

    #[test]
    fn duplicated_triple_fails() {
        let mut d = steiner_triple_system(7).unwrap();
        d.blocks.push(d.blocks[0].clone());
        let r = validate(&d);
        assert!(matches!(r.first_violation(), Some(Violation::PairCoveredTwice { .. })));
    }

    #[test]
    fn missing_triple_fails() {
        let mut d = steiner_triple_system(9).unwrap();
        d.blocks.pop();
        assert!(matches!(validate(&d).first_violation(), Some(Violation::PairUncovered { .. })));
    }

    #[test]
    fn single_k2t1_is_adjusted() {
        // K_5 with t = 3: leftover K_5 has degree 4 = 3t - 5
        let d = Decomposition { n: 5, t: 3, blocks: vec![Block::new(BlockKind::K2t1, (0..5).collect())] };
        let r = validate(&d);
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.leftover_max_degree, 4);
    }

    #[test]
    fn k2t1_budget_boundary() {
        // four disjoint K_9 at t = 5 sit exactly on the budget t - 1; a fifth exceeds it
        let blocks = |count: usize| -> Vec<Block> {
            (0..count).map(|j| Block::new(BlockKind::K2t1, (9 * j..9 * j + 9).collect())).collect()
        };
        let at = validate(&Decomposition { n: 45, t: 5, blocks: blocks(4) });
        assert!(!at.violations.iter().any(|v| matches!(v, Violation::BudgetExceeded { .. })));
        assert!(!at.violations.iter().any(|v| matches!(v, Violation::LeftoverDegree { .. })));
        let over = validate(&Decomposition { n: 45, t: 5, blocks: blocks(5) });
        assert!(over
            .violations.contains(&Violation::BudgetExceeded { kind: BlockKind::K2t1, count: 5, limit: 4 }));
    }

    #[test]
    fn leftover_degree_limit() {
        // two K_5 at t = 3 sharing vertex 0 push its leftover degree to 8 > 4
        let d = Decomposition {
            n: 9,
            t: 3,
            blocks: vec![
                Block::new(BlockKind::K2t1, vec![0, 1, 2, 3, 4]),
                Block::new(BlockKind::K2t1, vec![0, 5, 6, 7, 8]),
            ],
        };
        let r = validate(&d);
        assert!(r.violations.contains(&Violation::LeftoverDegree { vertex: 0, degree: 8, limit: 4 }));
    }

    #[test]
    fn arity_and_range_checks() {
        let d = Decomposition { n: 4, t: 3, blocks: vec![Block::new(BlockKind::Kt, vec![0, 1])] };
        assert!(matches!(validate(&d).first_violation(), Some(Violation::BlockArity { .. })));
        let d = Decomposition { n: 3, t: 3, blocks: vec![Block::new(BlockKind::Kt, vec![0, 1, 5])] };
        assert!(matches!(validate(&d).first_violation(), Some(Violation::VertexOutOfRange { .. })));
        let d = Decomposition { n: 3, t: 4, blocks: vec![] };
        assert!(matches!(validate(&d).first_violation(), Some(Violation::BadParameters { .. })));
    }
}
