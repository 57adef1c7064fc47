//! Lines of the projective planes PG(2, 2) and PG(2, 4) as `K_{q+1}` designs.

use super::{Block, BlockKind, Decomposition, DesignError};

/// Arithmetic in GF(2^m) for m in {1, 2}; elements are bit polynomials.
#[derive(Clone, Copy)]
struct SmallField {
    bits: u32,
    modulus: u32,
}

impl SmallField {
    fn new(q: usize) -> Option<Self> {
        match q {
            2 => Some(SmallField { bits: 1, modulus: 0b11 }), // x + 1
            4 => Some(SmallField { bits: 2, modulus: 0b111 }), // x^2 + x + 1
            _ => None,
        }
    }

    fn order(self) -> u32 {
        1 << self.bits
    }

    fn mul(self, a: u32, b: u32) -> u32 {
        let mut prod = 0;
        for i in 0..self.bits {
            if b >> i & 1 == 1 {
                prod ^= a << i;
            }
        }
        for i in (self.bits..2 * self.bits).rev() {
            if prod >> i & 1 == 1 {
                prod ^= self.modulus << (i - self.bits);
            }
        }
        prod
    }
}

/// Homogeneous coordinate triples whose first nonzero entry is 1.
fn normalised_points(field: SmallField) -> Vec<[u32; 3]> {
    let q = field.order();
    let mut pts = Vec::new();
    for a in 0..q {
        for b in 0..q {
            pts.push([1, a, b]);
        }
    }
    for b in 0..q {
        pts.push([0, 1, b]);
    }
    pts.push([0, 0, 1]);
    pts
}

pub fn projective_plane_decomposition(q: usize) -> Result<Decomposition, DesignError> {
    let field = SmallField::new(q).ok_or(DesignError::UnsupportedOrder(q))?;
    let points = normalised_points(field);
    let dot = |p: &[u32; 3], l: &[u32; 3]| {
        (0..3).fold(0, |acc, i| acc ^ field.mul(p[i], l[i]))
    };
    let blocks = points
        .iter()
        .map(|line| {
            let on: Vec<usize> = points
                .iter()
                .enumerate()
                .filter(|(_, p)| dot(p, line) == 0)
                .map(|(i, _)| i)
                .collect();
            Block::new(BlockKind::Kt, on)
        })
        .collect();
    Ok(Decomposition { n: q * q + q + 1, t: q + 1, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{steiner_triple_system, validate};

    #[test]
    fn gf4_is_a_field() {
        let f = SmallField::new(4).unwrap();
        for a in 1..4 {
            assert_eq!((1..4).filter(|&b| f.mul(a, b) == 1).count(), 1);
        }
    }

    #[test]
    fn fano_plane() {
        let d = projective_plane_decomposition(2).unwrap();
        assert_eq!((d.n, d.t, d.blocks.len()), (7, 3, 7));
        assert!(validate(&d).passed());
        // same parameters as the Bose/Skolem Fano plane, both valid
        assert!(validate(&steiner_triple_system(7).unwrap()).passed());
    }

    #[test]
    fn pg24_is_k5_design_of_k21() {
        let d = projective_plane_decomposition(4).unwrap();
        assert_eq!((d.n, d.t, d.blocks.len()), (21, 5, 21));
        assert!(d.blocks.iter().all(|b| b.vertices.len() == 5));
        for v in 0..21 {
            assert_eq!(d.blocks.iter().filter(|b| b.vertices.contains(&v)).count(), 5);
        }
        let r = validate(&d);
        assert!(r.passed(), "{:?}", r.first_violation());
    }

    #[test]
    fn unsupported_orders() {
        assert_eq!(projective_plane_decomposition(3), Err(DesignError::UnsupportedOrder(3)));
        assert!(projective_plane_decomposition(5).is_err());
    }
}
