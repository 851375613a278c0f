//! ℤ-indexed filtrations by subspaces and their graded dimensions.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, InvariantViolation, Result};
use crate::matrix::QMatrix;
use crate::rational::{QStr, Rational};
use crate::subspace::Subspace;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// A filtration stored by its distinct steps.
///
/// Decreasing: `F^i = steps[k]` for the least key `k ≥ i`, and `0` above the
/// largest key. Increasing: `F_i = steps[k]` for the greatest key `k ≤ i`, and
/// `0` below the smallest key. Redundant keys are dropped on construction, so
/// two filtrations are equal exactly when their stored forms are equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IndexedFiltration {
    ambient: usize,
    orientation: Orientation,
    steps: BTreeMap<i64, Subspace>,
}

impl IndexedFiltration {
    pub fn new(ambient: usize, orientation: Orientation, steps: BTreeMap<i64, Subspace>) -> Result<Self> {
        for s in steps.values() {
            if s.ambient_dim() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: s.ambient_dim() });
            }
        }
        let ordered: Vec<&Subspace> = steps.values().collect();
        for w in ordered.windows(2) {
            let ok = match orientation {
                Orientation::Decreasing => w[1].is_subspace_of(w[0]),
                Orientation::Increasing => w[0].is_subspace_of(w[1]),
            };
            if !ok {
                return Err(InvariantViolation::Filtration("steps are not nested".into()).into());
            }
        }
        let mut f = IndexedFiltration { ambient, orientation, steps };
        f.normalize();
        Ok(f)
    }

    /// `full` up to and including `at`, zero afterwards (or the mirror image
    /// for increasing filtrations).
    pub fn single_jump(ambient: usize, orientation: Orientation, at: i64) -> Self {
        let steps = BTreeMap::from([(at, Subspace::full(ambient))]);
        IndexedFiltration::new(ambient, orientation, steps).expect("single step")
    }

    /// Builds a filtration from cumulative steps that may be listed in any order.
    pub fn from_steps(ambient: usize, orientation: Orientation, steps: impl IntoIterator<Item = (i64, Subspace)>) -> Result<Self> {
        Self::new(ambient, orientation, steps.into_iter().collect())
    }

    fn normalize(&mut self) {
        self.steps.retain(|_, s| !s.is_zero());
        let keys: Vec<i64> = self.steps.keys().copied().collect();
        let mut drop = Vec::new();
        for w in keys.windows(2) {
            if self.steps[&w[0]] == self.steps[&w[1]] {
                match self.orientation {
                    Orientation::Decreasing => drop.push(w[0]),
                    Orientation::Increasing => drop.push(w[1]),
                }
            }
        }
        for k in drop {
            self.steps.remove(&k);
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn steps(&self) -> &BTreeMap<i64, Subspace> {
        &self.steps
    }

    pub fn step(&self, i: i64) -> Subspace {
        let found = match self.orientation {
            Orientation::Decreasing => self.steps.range(i..).next(),
            Orientation::Increasing => self.steps.range(..=i).next_back(),
        };
        found.map(|(_, s)| s.clone()).unwrap_or_else(|| Subspace::zero(self.ambient))
    }

    pub fn min_key(&self) -> Option<i64> {
        self.steps.keys().next().copied()
    }

    pub fn max_key(&self) -> Option<i64> {
        self.steps.keys().next_back().copied()
    }

    /// Every vector lies in some step.
    pub fn is_exhaustive(&self) -> bool {
        if self.ambient == 0 {
            return true;
        }
        let extreme = match self.orientation {
            Orientation::Decreasing => self.steps.values().next(),
            Orientation::Increasing => self.steps.values().next_back(),
        };
        extreme.is_some_and(Subspace::is_full)
    }

    /// Dimensions of the graded pieces, keyed where they are nonzero.
    pub fn graded_dims(&self) -> GradedDims<i64> {
        let entries: Vec<(i64, usize)> = self.steps.iter().map(|(k, s)| (*k, s.dim())).collect();
        let mut out = BTreeMap::new();
        for (idx, &(k, dim)) in entries.iter().enumerate() {
            let below = match self.orientation {
                Orientation::Decreasing => entries.get(idx + 1).map_or(0, |e| e.1),
                Orientation::Increasing => idx.checked_sub(1).map_or(0, |j| entries[j].1),
            };
            if dim > below {
                out.insert(k, dim - below);
            }
        }
        GradedDims(out)
    }

    /// Indices `i` with a nonzero graded piece.
    pub fn jumps(&self) -> Vec<i64> {
        self.graded_dims().0.into_keys().collect()
    }

    /// Image under a linear map `m` (columns are source coordinates).
    pub fn image_under(&self, m: &QMatrix) -> Result<IndexedFiltration> {
        let steps = self
            .steps
            .iter()
            .map(|(k, s)| Ok((*k, s.image_under(m)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        IndexedFiltration::new(m.rows(), self.orientation, steps)
    }

    /// Intersection of every step with `sub`, as a filtration of the ambient space.
    pub fn intersect_with(&self, sub: &Subspace) -> Result<IndexedFiltration> {
        let steps = self
            .steps
            .iter()
            .map(|(k, s)| Ok((*k, s.intersect(sub)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        IndexedFiltration::new(self.ambient, self.orientation, steps)
    }

    /// Index window outside which the filtration is constant (0 or full).
    pub fn key_window(&self) -> Option<(i64, i64)> {
        Some((self.min_key()?, self.max_key()?))
    }

    /// Indices in `lo..=hi` where the two filtrations differ, with both step dimensions.
    pub fn diff(&self, other: &IndexedFiltration, lo: i64, hi: i64) -> Vec<StepDiff> {
        (lo..=hi)
            .filter_map(|i| {
                let (a, b) = (self.step(i), other.step(i));
                (a != b).then(|| StepDiff { index: i, left_dim: a.dim(), right_dim: b.dim() })
            })
            .collect()
    }

    /// Range of indices covering every key of both filtrations, padded by one.
    pub fn joint_window(&self, other: &IndexedFiltration) -> (i64, i64) {
        let keys: Vec<i64> = self.steps.keys().chain(other.steps.keys()).copied().collect();
        let lo = keys.iter().min().copied().unwrap_or(0) - 1;
        let hi = keys.iter().max().copied().unwrap_or(0) + 1;
        (lo, hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepDiff {
    pub index: i64,
    pub left_dim: usize,
    pub right_dim: usize,
}

fn rows_json(s: &Subspace) -> Vec<Vec<QStr>> {
    s.basis_vectors().into_iter().map(|v| v.into_iter().map(QStr).collect()).collect()
}

impl Serialize for IndexedFiltration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Step {
            index: i64,
            dim: usize,
            basis: Vec<Vec<QStr>>,
        }
        let steps: Vec<Step> =
            self.steps.iter().map(|(k, sub)| Step { index: *k, dim: sub.dim(), basis: rows_json(sub) }).collect();
        let mut st = s.serialize_struct("IndexedFiltration", 4)?;
        st.serialize_field("ambient_dim", &self.ambient)?;
        st.serialize_field("graded_dims", &self.graded_dims())?;
        st.serialize_field("orientation", &self.orientation)?;
        st.serialize_field("steps", &steps)?;
        st.end()
    }
}

/// Multiplicities indexed by `K`; zero entries are not stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GradedDims<K: Ord>(pub BTreeMap<K, usize>);

impl<K: Ord + Clone> GradedDims<K> {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (K, usize)>) -> Self {
        let mut m = BTreeMap::new();
        for (k, v) in pairs {
            *m.entry(k).or_insert(0) += v;
        }
        m.retain(|_, v| *v > 0);
        GradedDims(m)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn get(&self, k: &K) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }
}

impl Serialize for GradedDims<i64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[i64; 2]> = self.0.iter().map(|(k, d)| [*k, *d as i64]).collect();
        v.serialize(s)
    }
}

impl Serialize for GradedDims<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            index: QStr,
            dim: usize,
        }
        let v: Vec<Entry> = self.0.iter().map(|(k, d)| Entry { index: QStr(k.clone()), dim: *d }).collect();
        v.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decreasing_lookup_and_grading() {
        // Fil^0 = full, Fil^1 = e1, Fil^2 = 0
        let f = IndexedFiltration::from_steps(
            2,
            Orientation::Decreasing,
            [(0, Subspace::full(2)), (1, Subspace::coordinate(2, [0]))],
        )
        .unwrap();
        assert!(f.step(-5).is_full());
        assert_eq!(f.step(1).dim(), 1);
        assert!(f.step(2).is_zero());
        assert_eq!(f.graded_dims().0, BTreeMap::from([(0, 1), (1, 1)]));
        assert!(f.is_exhaustive());
    }

    #[test]
    fn redundant_keys_are_dropped() {
        let a = IndexedFiltration::from_steps(
            2,
            Orientation::Decreasing,
            [(0, Subspace::full(2)), (1, Subspace::full(2)), (2, Subspace::full(2)), (3, Subspace::zero(2))],
        )
        .unwrap();
        assert_eq!(a, IndexedFiltration::single_jump(2, Orientation::Decreasing, 2));
        assert_eq!(a.graded_dims().0, BTreeMap::from([(2, 2)]));
    }

    #[test]
    fn increasing_lookup() {
        let f = IndexedFiltration::from_steps(
            2,
            Orientation::Increasing,
            [(-1, Subspace::coordinate(2, [0])), (1, Subspace::full(2))],
        )
        .unwrap();
        assert!(f.step(-2).is_zero());
        assert_eq!(f.step(0).dim(), 1);
        assert!(f.step(7).is_full());
        assert_eq!(f.jumps(), vec![-1, 1]);
    }

    #[test]
    fn non_nested_rejected() {
        let r = IndexedFiltration::from_steps(
            2,
            Orientation::Decreasing,
            [(0, Subspace::coordinate(2, [0])), (1, Subspace::coordinate(2, [1]))],
        );
        assert!(matches!(r, Err(Error::Invariant(InvariantViolation::Filtration(_)))));
    }
}
