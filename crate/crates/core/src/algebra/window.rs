use std::fmt;

use crate::error::{Error, Result};

/// Lattice coordinate `α ∈ ℤ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(components: Vec<i64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("multi-index must have at least one component"));
        }
        Ok(MultiIndex(components))
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim.max(1)])
    }

    /// Unit vector scaled by `value` along `axis`.
    pub fn axis(dim: usize, axis: usize, value: i64) -> Self {
        let mut c = vec![0; dim];
        c[axis] = value;
        MultiIndex(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// `|α|_∞ = max_k |α_k|`.
    pub fn sup_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Number of nonzero components; `≤ 1` means the index lies on a coordinate axis.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&c| c != 0).count()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()
    }
}

impl std::ops::Neg for &MultiIndex {
    type Output = MultiIndex;

    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|c| -c).collect())
    }
}

impl From<&[i64]> for MultiIndex {
    fn from(c: &[i64]) -> Self {
        MultiIndex(c.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The cube `{α ∈ ℤ^d : |α|_∞ ≤ radius}`.
///
/// Multi-indices are enumerated lexicographically, first component slowest:
/// offset `Σ_k (α_k + N)·(2N+1)^{d-1-k}`. Under this order negation maps offset
/// `o` to `len - 1 - o`, and the origin sits at the center offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    dim: usize,
    radius: usize,
}

impl Window {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("window dimension must be at least 1"));
        }
        let side = 2 * radius + 1;
        if side.checked_pow(dim as u32).is_none() {
            return Err(Error::invalid("window too large"));
        }
        Ok(Window { dim, radius })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Offset of the origin.
    pub fn center(&self) -> usize {
        (self.len() - 1) / 2
    }

    /// Offset of `-α` given the offset of `α`.
    pub fn mirror(&self, offset: usize) -> usize {
        self.len() - 1 - offset
    }

    pub fn with_radius(&self, radius: usize) -> Window {
        Window { dim: self.dim, radius }
    }

    pub fn contains(&self, alpha: &[i64]) -> bool {
        alpha.len() == self.dim && alpha.iter().all(|c| c.unsigned_abs() as usize <= self.radius)
    }

    pub fn offset_of(&self, alpha: &[i64]) -> Option<usize> {
        if !self.contains(alpha) {
            return None;
        }
        let side = self.side();
        let r = self.radius as i64;
        Some(alpha.iter().fold(0usize, |acc, &c| acc * side + (c + r) as usize))
    }

    /// Writes the components of the multi-index at `offset` into `out`.
    pub fn coords_into(&self, mut offset: usize, out: &mut [i64]) {
        let side = self.side();
        let r = self.radius as i64;
        for k in (0..self.dim).rev() {
            out[k] = (offset % side) as i64 - r;
            offset /= side;
        }
    }

    pub fn index_at(&self, offset: usize) -> MultiIndex {
        let mut c = vec![0; self.dim];
        self.coords_into(offset, &mut c);
        MultiIndex(c)
    }

    /// All multi-indices in enumeration order.
    pub fn indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len()).map(move |o| self.index_at(o))
    }

    /// Sup-norm of the multi-index at `offset`.
    pub fn sup_norm_at(&self, offset: usize) -> usize {
        let side = self.side();
        let mut o = offset;
        let mut m = 0;
        for _ in 0..self.dim {
            let c = (o % side).abs_diff(self.radius);
            m = m.max(c);
            o /= side;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_counts_and_roundtrips_offsets() {
        for (dim, radius) in [(1, 0), (1, 3), (2, 2), (3, 1)] {
            let w = Window::new(dim, radius).unwrap();
            assert_eq!(w.len(), (2 * radius + 1).pow(dim as u32));
            let mut prev: Option<MultiIndex> = None;
            for (o, alpha) in w.indices().enumerate() {
                assert!(alpha.sup_norm() as usize <= radius);
                assert_eq!(w.offset_of(alpha.components()), Some(o));
                assert_eq!(w.sup_norm_at(o), alpha.sup_norm() as usize);
                assert_eq!(w.index_at(w.mirror(o)), -&alpha);
                if let Some(p) = prev {
                    assert!(p < alpha, "lexicographic order");
                }
                prev = Some(alpha);
            }
            assert!(w.index_at(w.center()).is_zero());
        }
    }

    #[test]
    fn rejects_zero_dimension_and_foreign_indices() {
        assert!(Window::new(0, 2).is_err());
        let w = Window::new(2, 1).unwrap();
        assert_eq!(w.offset_of(&[2, 0]), None);
        assert_eq!(w.offset_of(&[0, 0, 0]), None);
    }

    #[test]
    fn negation_preserves_sup_norm() {
        let a = MultiIndex::new(vec![3, -7, 2]).unwrap();
        assert_eq!(a.sup_norm(), 7);
        assert_eq!((-&a).sup_norm(), 7);
        assert_eq!(a.support_size(), 3);
        assert!(MultiIndex::new(vec![]).is_err());
    }
}
