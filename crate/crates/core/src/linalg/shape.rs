use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ordered list of labeled tensor factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemShape {
    entries: Vec<(String, usize)>,
}

impl SubsystemShape {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let entries: Vec<(String, usize)> =
            entries.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (label, dim)) in entries.iter().enumerate() {
            if *dim == 0 {
                return Err(Error::shape(format!("subsystem {label} has dimension 0")));
            }
            if entries[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::labeling(format!("duplicate label {label}")));
            }
        }
        Ok(Self { entries })
    }

    /// Shape with a single factor.
    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    /// The trivial (one-dimensional, factor-free) shape.
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, usize)] {
        &self.entries
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.entries.iter().map(|&(_, d)| d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.entries.iter().map(|&(_, d)| d).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|(l, _)| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.entries[p].1)
            .ok_or_else(|| Error::labeling(format!("unknown label {label} in {self}")))
    }

    /// Concatenation `self ⊗ other`; labels must be disjoint.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Self::new(self.entries.iter().chain(other.entries.iter()).cloned())
    }

    /// Positions of `labels` in this shape, in the order given.
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for label in labels {
            let p = self
                .position(label)
                .ok_or_else(|| Error::labeling(format!("unknown label {label} in {self}")))?;
            if out.contains(&p) {
                return Err(Error::labeling(format!("label {label} listed twice")));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Sub-shape made of `labels`, in the order given.
    pub fn select(&self, labels: &[&str]) -> Result<Self> {
        let pos = self.positions(labels)?;
        Ok(Self {
            entries: pos.into_iter().map(|p| self.entries[p].clone()).collect(),
        })
    }

    /// Labels of this shape that are not in `labels`, in shape order.
    pub fn complement(&self, labels: &[&str]) -> Vec<&str> {
        self.labels().filter(|l| !labels.contains(l)).collect()
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        let p = self
            .position(from)
            .ok_or_else(|| Error::labeling(format!("unknown label {from} in {self}")))?;
        let mut entries = self.entries.clone();
        entries[p].0 = to.to_string();
        Self::new(entries)
    }

    /// Replace all labels at once, keeping dimensions.
    pub fn with_labels(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::labeling(format!(
                "expected {} labels for {self}, got {}",
                self.len(),
                labels.len()
            )));
        }
        Self::new(labels.iter().zip(self.dims()).map(|(l, d)| (l.to_string(), d)))
    }

    /// For every flat index, its flat index within the factors at `keep`
    /// (in the order given) and within the remaining factors (shape order).
    pub(crate) fn split_indices(&self, keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
        let dims = self.dims();
        let rest: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
        let keep_dim: usize = keep.iter().map(|&p| dims[p]).product();
        let rest_dim: usize = rest.iter().map(|&p| dims[p]).product();
        let total = self.total_dim();
        let mut kept = vec![0; total];
        let mut traced = vec![0; total];
        let mut digits = vec![0usize; dims.len()];
        for flat in 0..total {
            let mut k = 0;
            for &p in keep {
                k = k * dims[p] + digits[p];
            }
            let mut t = 0;
            for &p in &rest {
                t = t * dims[p] + digits[p];
            }
            kept[flat] = k;
            traced[flat] = t;
            // increment the row-major multi-index
            for p in (0..dims.len()).rev() {
                digits[p] += 1;
                if digits[p] < dims[p] {
                    break;
                }
                digits[p] = 0;
            }
        }
        (kept, traced, keep_dim, rest_dim)
    }

    /// Map old flat index -> new flat index for the reordering `order`
    /// (positions of the old factors, listed in their new order).
    pub(crate) fn permutation_map(&self, order: &[usize]) -> Vec<usize> {
        self.split_indices(order).0
    }
}

impl fmt::Display for SubsystemShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (l, d)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}:{d}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(matches!(
            SubsystemShape::new([("A", 2), ("A", 3)]),
            Err(Error::Labeling(_))
        ));
        assert!(matches!(
            SubsystemShape::new([("A", 0)]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn total_dim_is_product() {
        let s = SubsystemShape::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        assert_eq!(s.total_dim(), 24);
        assert_eq!(SubsystemShape::empty().total_dim(), 1);
    }

    #[test]
    fn split_indices_matches_digit_arithmetic() {
        let s = SubsystemShape::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let (kept, traced, kd, td) = s.split_indices(&[2, 0]);
        assert_eq!((kd, td), (4, 3));
        for a in 0..2 {
            for b in 0..3 {
                for c in 0..2 {
                    let flat = a * 6 + b * 2 + c;
                    assert_eq!(kept[flat], c * 2 + a);
                    assert_eq!(traced[flat], b);
                }
            }
        }
    }
}
