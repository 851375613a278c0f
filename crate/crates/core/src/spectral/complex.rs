//! Cochain complexes over ℚ, filtrations on them, and the pages of the
//! associated spectral sequence.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, InvariantViolation, Result};
use crate::filtration::{IndexedFiltration, Orientation};
use crate::matrix::QMatrix;
use crate::rational::Rational;
use crate::subspace::{image, kernel, Subspace};

/// Complex `C^lo → C^{lo+1} → …` with `diffs[k] : C^{lo+k} → C^{lo+k+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    lo: i64,
    dims: Vec<usize>,
    diffs: Vec<QMatrix>,
}

impl GradedComplex {
    pub fn new(lo: i64, dims: Vec<usize>, diffs: Vec<QMatrix>) -> Result<Self> {
        if diffs.len() + 1 != dims.len().max(1) {
            return Err(Error::DimensionMismatch { expected: dims.len().saturating_sub(1), found: diffs.len() });
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.cols() != dims[k] || d.rows() != dims[k + 1] {
                return Err(Error::Inconsistent(format!(
                    "differential out of degree {} is {}x{}, expected {}x{}",
                    lo + k as i64,
                    d.rows(),
                    d.cols(),
                    dims[k + 1],
                    dims[k]
                )));
            }
        }
        for k in 1..diffs.len() {
            if !(&diffs[k] * &diffs[k - 1]).is_zero() {
                return Err(Error::Inconsistent(format!("d∘d ≠ 0 at degree {}", lo + k as i64 - 1)));
            }
        }
        Ok(GradedComplex { lo, dims, diffs })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn dim(&self, n: i64) -> usize {
        self.index(n).map_or(0, |k| self.dims[k])
    }

    fn index(&self, n: i64) -> Option<usize> {
        (n >= self.lo && n <= self.hi()).then(|| (n - self.lo) as usize)
    }

    /// `d : C^n → C^{n+1}`, zero outside the stored range.
    pub fn diff(&self, n: i64) -> QMatrix {
        match self.index(n) {
            Some(k) if k < self.diffs.len() => self.diffs[k].clone(),
            _ => QMatrix::zeros(self.dim(n + 1), self.dim(n)),
        }
    }

    pub fn cocycles(&self, n: i64) -> Subspace {
        kernel(&self.diff(n))
    }

    pub fn coboundaries(&self, n: i64) -> Subspace {
        image(&self.diff(n - 1))
    }

    pub fn cohomology(&self, n: i64) -> Subquotient {
        Subquotient::new(self.cocycles(n), self.coboundaries(n))
    }

    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        self.degrees().map(|n| (n, self.cohomology(n).dim())).collect()
    }

    /// Subcomplex on the given basis coordinates of each degree (must be closed under `d`).
    fn restrict_coordinates(&self, keep: &[Vec<usize>]) -> Result<GradedComplex> {
        let dims = keep.iter().map(Vec::len).collect();
        let diffs = (0..self.diffs.len())
            .map(|k| {
                let d = &self.diffs[k];
                let rows = keep[k + 1].iter().map(|&i| keep[k].iter().map(|&j| d.get(i, j).clone()).collect()).collect();
                QMatrix::from_rows(rows, keep[k].len())
            })
            .collect::<Result<Vec<_>>>()?;
        GradedComplex::new(self.lo, dims, diffs)
    }
}

/// A quotient `num / den` of subspaces of a common ambient space, with a
/// fixed basis of representatives.
#[derive(Clone, Debug)]
pub struct Subquotient {
    num: Subspace,
    den: Subspace,
    reps: Vec<Vec<Rational>>,
    /// Inverse of the change of basis from `[den basis; reps]` to the
    /// canonical basis of `num`.
    to_adapted: QMatrix,
}

impl Subquotient {
    pub fn new(num: Subspace, den: Subspace) -> Self {
        debug_assert!(den.is_subspace_of(&num));
        let mut reps = Vec::new();
        let mut cur = den.clone();
        for v in num.basis_vectors() {
            if !cur.contains(&v) {
                cur = cur.sum(&Subspace::span(num.ambient_dim(), [v.clone()]).expect("ambient")).expect("ambient");
                reps.push(v);
            }
        }
        let mut rows = den.basis_vectors();
        rows.extend(reps.iter().cloned());
        let pivots = num.pivots();
        let t = QMatrix::from_rows(
            rows.iter().map(|r| pivots.iter().map(|&p| r[p].clone()).collect()).collect(),
            pivots.len(),
        )
        .expect("square");
        let to_adapted = t.inverse().expect("adapted basis is a basis");
        Subquotient { num, den, reps, to_adapted }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn numerator(&self) -> &Subspace {
        &self.num
    }

    pub fn denominator(&self) -> &Subspace {
        &self.den
    }

    pub fn representatives(&self) -> &[Vec<Rational>] {
        &self.reps
    }

    /// Class of `v ∈ num` in the representative basis.
    pub fn coords(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if !self.num.contains(v) {
            return Err(Error::Inconsistent("vector outside the numerator of a subquotient".into()));
        }
        let a: Vec<Rational> = self.num.pivots().iter().map(|&p| v[p].clone()).collect();
        let k = self.den.dim();
        let n = a.len();
        Ok((k..n)
            .map(|j| (0..n).fold(Rational::zero(), |acc, i| acc + &a[i] * self.to_adapted.get(i, j)))
            .collect())
    }

    /// Matrix of the map induced by `m` into `target` (columns = images of representatives).
    pub fn induced(&self, m: &QMatrix, target: &Subquotient) -> Result<QMatrix> {
        let mut out = QMatrix::zeros(target.dim(), self.dim());
        for (j, r) in self.reps.iter().enumerate() {
            for (i, c) in target.coords(&m.apply(r))?.into_iter().enumerate() {
                out.set(i, j, c);
            }
        }
        Ok(out)
    }
}

/// A complex with a decreasing filtration in every degree and optional
/// weight labels on basis vectors.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    complex: GradedComplex,
    filtrations: Vec<IndexedFiltration>,
    labels: Option<Vec<Vec<i64>>>,
}

impl FilteredComplex {
    pub fn new(complex: GradedComplex, filtrations: Vec<IndexedFiltration>) -> Result<Self> {
        if filtrations.len() != complex.dims.len() {
            return Err(Error::DimensionMismatch { expected: complex.dims.len(), found: filtrations.len() });
        }
        for (k, f) in filtrations.iter().enumerate() {
            if f.ambient_dim() != complex.dims[k] || f.orientation() != Orientation::Decreasing {
                return Err(InvariantViolation::Filtration(format!("bad filtration in degree {}", complex.lo + k as i64)).into());
            }
            if !f.is_exhaustive() {
                return Err(InvariantViolation::Filtration(format!("filtration in degree {} not exhaustive", complex.lo + k as i64)).into());
            }
        }
        let fc = FilteredComplex { complex, filtrations, labels: None };
        let (lo, hi) = fc.level_range();
        for n in fc.complex.degrees() {
            let d = fc.complex.diff(n);
            for p in lo..=hi {
                let img = fc.step(n, p).image_under(&d)?;
                if !img.is_subspace_of(&fc.step(n + 1, p)) {
                    return Err(Error::Inconsistent(format!("d does not preserve filtration level {p} in degree {n}")));
                }
            }
        }
        Ok(fc)
    }

    /// Filtration given by a level for every basis vector: `F^p` is spanned by
    /// the basis vectors of level `≥ p`.
    pub fn from_levels(complex: GradedComplex, levels: &[Vec<i64>]) -> Result<Self> {
        if levels.len() != complex.dims.len() {
            return Err(Error::DimensionMismatch { expected: complex.dims.len(), found: levels.len() });
        }
        let fils = levels
            .iter()
            .zip(&complex.dims)
            .map(|(lv, &dim)| {
                if lv.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: lv.len() });
                }
                let distinct: BTreeSet<i64> = lv.iter().copied().collect();
                let steps = distinct
                    .iter()
                    .map(|&p| (p, Subspace::coordinate(dim, (0..dim).filter(|&i| lv[i] >= p))))
                    .collect();
                IndexedFiltration::new(dim, Orientation::Decreasing, steps)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(complex, fils)
    }

    /// Attaches weight labels; `d` must map each label's span into itself and
    /// every filtration step must split along labels.
    pub fn with_labels(mut self, labels: Vec<Vec<i64>>) -> Result<Self> {
        if labels.len() != self.complex.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.complex.dims.len(), found: labels.len() });
        }
        for (k, lv) in labels.iter().enumerate() {
            if lv.len() != self.complex.dims[k] {
                return Err(Error::DimensionMismatch { expected: self.complex.dims[k], found: lv.len() });
            }
        }
        for (k, d) in self.complex.diffs.iter().enumerate() {
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    if !d.get(i, j).is_zero() && labels[k + 1][i] != labels[k][j] {
                        return Err(Error::Inconsistent(format!(
                            "differential out of degree {} joins labels {} and {}",
                            self.complex.lo + k as i64,
                            labels[k][j],
                            labels[k + 1][i]
                        )));
                    }
                }
            }
        }
        for (k, f) in self.filtrations.iter().enumerate() {
            let distinct: BTreeSet<i64> = labels[k].iter().copied().collect();
            for step in f.steps().values() {
                let mut split = Subspace::zero(step.ambient_dim());
                for &l in &distinct {
                    let part = Subspace::coordinate(step.ambient_dim(), (0..labels[k].len()).filter(|&i| labels[k][i] == l));
                    split = split.sum(&step.intersect(&part)?)?;
                }
                if &split != step {
                    return Err(Error::Inconsistent(format!("filtration in degree {} does not split along labels", self.complex.lo + k as i64)));
                }
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn complex(&self) -> &GradedComplex {
        &self.complex
    }

    pub fn labels(&self) -> Option<&[Vec<i64>]> {
        self.labels.as_deref()
    }

    pub fn filtration(&self, n: i64) -> Option<&IndexedFiltration> {
        self.complex.index(n).map(|k| &self.filtrations[k])
    }

    /// `F^p C^n`.
    pub fn step(&self, n: i64, p: i64) -> Subspace {
        match self.complex.index(n) {
            Some(k) => self.filtrations[k].step(p),
            None => Subspace::zero(0),
        }
    }

    /// Smallest and largest filtration keys over all degrees.
    pub fn level_range(&self) -> (i64, i64) {
        let keys: Vec<i64> = self.filtrations.iter().flat_map(|f| f.steps().keys().copied()).collect();
        (keys.iter().min().copied().unwrap_or(0), keys.iter().max().copied().unwrap_or(0))
    }

    /// Page index after which all differentials vanish.
    pub fn stable_page(&self) -> usize {
        let (lo, hi) = self.level_range();
        (hi - lo) as usize + 1
    }

    /// `Z_r^{p,n} = F^p C^n ∩ d^{-1}(F^{p+r} C^{n+1})`.
    fn z(&self, n: i64, p: i64, r: i64) -> Result<Subspace> {
        let fp = self.step(n, p);
        let d = self.complex.diff(n);
        let target = self.step(n + 1, p + r);
        if self.complex.dim(n + 1) == 0 {
            return Ok(fp);
        }
        fp.intersect(&target.preimage_under(&d)?)
    }

    /// `E_r^{p,n-p} = Z_r^p / (Z_{r-1}^{p+1} + F^p ∩ d F^{p-r+1})`.
    fn e_term(&self, n: i64, p: i64, r: i64) -> Result<Subquotient> {
        let num = self.z(n, p, r)?;
        let mut den = self.z(n, p + 1, r - 1)?;
        if self.complex.dim(n - 1) > 0 {
            let bd = self.step(n - 1, p - r + 1).image_under(&self.complex.diff(n - 1))?;
            den = den.sum(&bd.intersect(&self.step(n, p))?)?;
        }
        Ok(Subquotient::new(num, den))
    }

    pub fn e_page(&self, r: usize) -> Result<Page> {
        let r = r as i64;
        let (lo, hi) = self.level_range();
        let mut terms: BTreeMap<(i64, i64), Subquotient> = BTreeMap::new();
        for n in self.complex.degrees() {
            for p in lo..=hi {
                let e = self.e_term(n, p, r)?;
                if e.dim() > 0 {
                    terms.insert((p, n), e);
                }
            }
        }
        let mut entries = BTreeMap::new();
        let mut differentials = BTreeMap::new();
        for (&(p, n), e) in &terms {
            entries.insert((p, n - p), e.dim());
            if let Some(t) = terms.get(&(p + r, n + 1)) {
                let m = e.induced(&self.complex.diff(n), t)?;
                differentials.insert((p, n - p), m);
            }
        }
        Ok(Page { r: r as usize, entries, differentials })
    }

    /// Smallest `r ≥ 1` such that `d_s = 0` for all `r ≤ s ≤ bound`.
    pub fn degeneration_page(&self, bound: usize) -> Result<Degeneration> {
        if bound == 0 {
            return Err(Error::Range("degeneration bound must be at least 1".into()));
        }
        for s in (1..=bound).rev() {
            if !self.e_page(s)?.differentials_vanish() {
                return Ok(if s == bound { Degeneration::Censored { bound } } else { Degeneration::Page(s + 1) });
            }
        }
        Ok(Degeneration::Page(1))
    }

    /// Filtration on `H^n` induced by `F^p`, in the representative basis of
    /// [`GradedComplex::cohomology`].
    pub fn abutment_filtration(&self, n: i64) -> Result<IndexedFiltration> {
        let h = self.complex.cohomology(n);
        let (lo, hi) = self.level_range();
        let z = self.complex.cocycles(n);
        let mut steps = BTreeMap::new();
        for p in lo..=hi {
            let cyc = self.step(n, p).intersect(&z)?;
            let vecs = cyc.basis_vectors().iter().map(|v| h.coords(v)).collect::<Result<Vec<_>>>()?;
            steps.insert(p, Subspace::span(h.dim(), vecs)?);
        }
        IndexedFiltration::new(h.dim(), Orientation::Decreasing, steps)
    }

    /// The sub-filtered-complex spanned by basis vectors with label `l`.
    pub fn label_part(&self, l: i64) -> Result<FilteredComplex> {
        let labels = self.labels.as_ref().ok_or_else(|| Error::Inconsistent("complex carries no labels".into()))?;
        let keep: Vec<Vec<usize>> = labels.iter().map(|lv| (0..lv.len()).filter(|&i| lv[i] == l).collect()).collect();
        let complex = self.complex.restrict_coordinates(&keep)?;
        let fils = self
            .filtrations
            .iter()
            .zip(&keep)
            .map(|(f, idx)| {
                let steps = f
                    .steps()
                    .iter()
                    .map(|(p, s)| {
                        let part = s.intersect(&Subspace::coordinate(s.ambient_dim(), idx.iter().copied()))?;
                        let proj = part.basis_vectors().into_iter().map(|v| idx.iter().map(|&i| v[i].clone()).collect::<Vec<_>>());
                        Ok((*p, Subspace::span(idx.len(), proj)?))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                IndexedFiltration::new(idx.len(), Orientation::Decreasing, steps)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut fc = FilteredComplex::new(complex, fils)?;
        fc.labels = Some(keep.iter().map(|k| vec![l; k.len()]).collect());
        Ok(fc)
    }

    pub fn distinct_labels(&self) -> BTreeSet<i64> {
        self.labels.iter().flatten().flatten().copied().collect()
    }

    /// Graded dimensions of the abutment filtration on `H^n`, split by label:
    /// `(p, label) → dim gr^p H^n`.
    pub fn abutment_label_dims(&self, n: i64) -> Result<BTreeMap<(i64, i64), usize>> {
        let mut out = BTreeMap::new();
        for l in self.distinct_labels() {
            let part = self.label_part(l)?;
            for (p, k) in part.abutment_filtration(n)?.graded_dims().0 {
                out.insert((p, l), k);
            }
        }
        Ok(out)
    }

    /// Decides whether every `d_r`, `r ≥ 2`, is forced to vanish because its
    /// source and target carry different labels.
    pub fn equivariant_degeneration_check(&self) -> Result<EquivariantReport> {
        if self.labels.is_none() {
            return Err(Error::Inconsistent("equivariant check needs weight labels".into()));
        }
        let top = self.stable_page();
        let mut conflicts = Vec::new();
        for l in self.distinct_labels() {
            let part = self.label_part(l)?;
            for r in 2..=top.max(2) {
                let page = part.e_page(r)?;
                for (&(p, q), _) in &page.entries {
                    if page.entries.contains_key(&(p + r as i64, q - r as i64 + 1)) {
                        let nonzero = page.differentials.get(&(p, q)).is_some_and(|m| !m.is_zero());
                        conflicts.push(LabelConflict { r, p, q, label: l, nonzero });
                    }
                }
            }
        }
        Ok(EquivariantReport { holds: conflicts.is_empty(), conflicts })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelConflict {
    pub r: usize,
    pub p: i64,
    pub q: i64,
    pub label: i64,
    /// The differential between the two equally labelled terms is nonzero.
    pub nonzero: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivariantReport {
    pub holds: bool,
    pub conflicts: Vec<LabelConflict>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneration {
    Page(usize),
    /// Some `d_bound` is nonzero.
    Censored { bound: usize },
}

/// `E_r`: nonzero terms keyed by `(p, q)` and the differentials
/// `d_r : E_r^{p,q} → E_r^{p+r,q-r+1}` between nonzero terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub r: usize,
    pub entries: BTreeMap<(i64, i64), usize>,
    pub differentials: BTreeMap<(i64, i64), QMatrix>,
}

impl Page {
    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.entries.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn differentials_vanish(&self) -> bool {
        self.differentials.values().all(QMatrix::is_zero)
    }

    /// `Σ (−1)^{p+q} dim E^{p,q}`.
    pub fn euler_characteristic(&self) -> i64 {
        self.entries.iter().map(|(&(p, q), &k)| if (p + q) % 2 == 0 { k as i64 } else { -(k as i64) }).sum()
    }

    /// Total dimension on the antidiagonal `p + q = n`.
    pub fn diagonal_dim(&self, n: i64) -> usize {
        self.entries.iter().filter(|(&(p, q), _)| p + q == n).map(|(_, &k)| k).sum()
    }

    /// Dimensions of the cohomology of `(E_r, d_r)` at every `(p, q)`.
    pub fn homology_dims(&self) -> BTreeMap<(i64, i64), usize> {
        let r = self.r as i64;
        let mut out = BTreeMap::new();
        for (&(p, q), &k) in &self.entries {
            let out_rank = self.differentials.get(&(p, q)).map_or(0, QMatrix::rank);
            let in_rank = self.differentials.get(&(p - r, q + r - 1)).map_or(0, QMatrix::rank);
            let h = k - out_rank - in_rank;
            if h > 0 {
                out.insert((p, q), h);
            }
        }
        out
    }
}

impl Serialize for Page {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            p: i64,
            q: i64,
            dim: usize,
        }
        #[derive(Serialize)]
        struct Diff {
            p: i64,
            q: i64,
            rank: usize,
        }
        #[derive(Serialize)]
        struct P {
            r: usize,
            entries: Vec<Entry>,
            differentials: Vec<Diff>,
        }
        P {
            r: self.r,
            entries: self.entries.iter().map(|(&(p, q), &dim)| Entry { p, q, dim }).collect(),
            differentials: self
                .differentials
                .iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|(&(p, q), m)| Diff { p, q, rank: m.rank() })
                .collect(),
        }
        .serialize(s)
    }
}
