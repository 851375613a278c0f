//! Subspaces of ℚ^n stored in canonical reduced row-echelon form.
//!
//! Two subspaces are equal exactly when their representations are equal,
//! so `Subspace` can be compared, hashed and ordered structurally.

use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Subspace {
    ambient: usize,
    /// `dim × ambient`, RREF, no zero rows.
    basis: QMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: QMatrix::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: QMatrix::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// Row space of `m`.
    pub fn row_space(m: &QMatrix) -> Self {
        let (r, pivots) = m.rref();
        let rows = r.row_vecs().into_iter().take(pivots.len()).collect();
        let basis = QMatrix::from_rows(rows, m.cols()).expect("rows of equal length");
        Subspace { ambient: m.cols(), basis, pivots }
    }

    pub fn span<I>(ambient: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Rational>>,
    {
        let rows: Vec<_> = vectors.into_iter().collect();
        for v in &rows {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: v.len() });
            }
        }
        Ok(Self::row_space(&QMatrix::from_rows(rows, ambient)?))
    }

    /// Span of standard basis vectors `e_i` for `i` in `indices`.
    pub fn coordinate(ambient: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let vecs = indices.into_iter().map(|i| {
            let mut v = vec![Rational::zero(); ambient];
            v[i] = Rational::one();
            v
        });
        Self::span(ambient, vecs).expect("coordinate vectors have ambient length")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        Ok(())
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(v.len(), self.ambient);
        let coords: Vec<Rational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, row) in coords.iter().zip(0..self.dim()) {
            if c.is_zero() {
                continue;
            }
            for (r, b) in residual.iter_mut().zip(self.basis.row(row)) {
                *r -= c * b;
            }
        }
        residual.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && (0..self.dim()).all(|i| other.contains(self.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Self::row_space(&self.basis.vstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.is_full() || other.is_zero() {
            return Ok(other.clone());
        }
        if other.is_full() || self.is_zero() {
            return Ok(self.clone());
        }
        // a ∩ b = ann(ann(a) + ann(b))
        let ann = self.annihilator().sum(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    /// `{x : <x, v> = 0 for all v in self}` with the standard pairing.
    pub fn annihilator(&self) -> Subspace {
        kernel(&self.basis)
    }

    /// Image of the subspace under the matrix `m` (acting on columns).
    pub fn image_under(&self, m: &QMatrix) -> Result<Subspace> {
        if m.cols() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: m.cols() });
        }
        let vecs: Vec<_> = (0..self.dim()).map(|i| m.apply(self.basis.row(i))).collect();
        Subspace::span(m.rows(), vecs)
    }

    /// `{v : m v ∈ self}`.
    pub fn preimage_under(&self, m: &QMatrix) -> Result<Subspace> {
        if m.rows() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: m.rows() });
        }
        let ann = self.annihilator();
        if ann.is_zero() {
            return Ok(Subspace::full(m.cols()));
        }
        Ok(kernel(&(ann.basis() * m)))
    }

    pub fn is_stable_under(&self, m: &QMatrix) -> bool {
        (0..self.dim()).all(|i| self.contains(&m.apply(self.basis.row(i))))
    }

    /// Matrix of `m` restricted to this (m-stable) subspace, in the canonical
    /// basis; acts on coordinate columns.
    pub fn restrict(&self, m: &QMatrix) -> Result<QMatrix> {
        let k = self.dim();
        let mut out = QMatrix::zeros(k, k);
        for j in 0..k {
            let img = m.apply(self.basis.row(j));
            let c = self
                .coordinates(&img)
                .ok_or_else(|| Error::Inconsistent("subspace is not stable under the map".into()))?;
            for (i, x) in c.into_iter().enumerate() {
                out.set(i, j, x);
            }
        }
        Ok(out)
    }

    /// Standard basis vectors at the non-pivot positions; together with the
    /// basis they span the ambient space.
    pub fn complement_indices(&self) -> Vec<usize> {
        (0..self.ambient).filter(|i| !self.pivots.contains(i)).collect()
    }

    /// Smallest subspace containing `self` that is stable under all `maps`.
    pub fn closure_under(&self, maps: &[&QMatrix]) -> Subspace {
        let mut cur = self.clone();
        loop {
            let mut next = cur.clone();
            for m in maps {
                next = next.sum(&cur.image_under(m).expect("square map")).expect("same ambient");
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Largest subspace of `self` that is stable under all `maps`.
    pub fn interior_under(&self, maps: &[&QMatrix]) -> Subspace {
        let mut cur = self.clone();
        loop {
            let mut next = cur.clone();
            for m in maps {
                next = next.intersect(&cur.preimage_under(m).expect("square map")).expect("same ambient");
            }
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.basis_vectors().iter().map(|r| r.iter().map(crate::rational::format_rational).collect()).collect();
        let mut st = s.serialize_struct("Subspace", 2)?;
        st.serialize_field("basis", &rows)?;
        st.serialize_field("dim", &self.dim())?;
        st.end()
    }
}

/// `{v : m v = 0}`.
pub fn kernel(m: &QMatrix) -> Subspace {
    let n = m.cols();
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let vecs = free.iter().map(|&f| {
        let mut v = vec![Rational::zero(); n];
        v[f] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(row, f).clone();
        }
        v
    });
    Subspace::span(n, vecs).expect("kernel vectors have ambient length")
}

/// Column span of `m`.
pub fn image(m: &QMatrix) -> Subspace {
    Subspace::row_space(&m.transpose())
}
