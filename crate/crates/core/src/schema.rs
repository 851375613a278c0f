//! Versioned JSON input formats. Every document carries `"schema": 1` and
//! unknown keys are rejected. Rationals are strings `"a/b"` or integers;
//! matrices are lists of rows acting on column vectors.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::filtration::{IndexedFiltration, Orientation};
use crate::matrix::QMatrix;
use crate::phin::PhiNModule;
use crate::rational::QStr;
use crate::spectral::cech::{NerveDatum, Stratum};
use crate::spectral::complex::{FilteredComplex, GradedComplex};
use crate::spectral::steenbrink::SteenbrinkDatum;
use crate::subspace::Subspace;

pub const SCHEMA_VERSION: u32 = 1;

pub type Rows = Vec<Vec<QStr>>;

fn matrix(rows: &Rows, rows_expected: usize, cols_expected: usize, what: &str) -> Result<QMatrix> {
    if rows.len() != rows_expected || rows.iter().any(|r| r.len() != cols_expected) {
        return Err(Error::Parse(format!("{what} must be a {rows_expected}x{cols_expected} matrix")));
    }
    QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect(), cols_expected)
}

fn square(rows: &Rows, what: &str) -> Result<QMatrix> {
    matrix(rows, rows.len(), rows.len(), what)
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(Error::Parse(format!("unsupported schema version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

/// Parse a document, mapping every JSON error to [`Error::Parse`].
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationStep {
    pub index: i64,
    /// Spanning vectors of the step, possibly redundant.
    pub basis: Rows,
}

fn filtration(steps: &[FiltrationStep], dim: usize, orientation: Orientation, what: &str) -> Result<IndexedFiltration> {
    let mut map = BTreeMap::new();
    for st in steps {
        if st.basis.iter().any(|v| v.len() != dim) {
            return Err(Error::Parse(format!("{what} step {} has vectors of the wrong length", st.index)));
        }
        let sub = Subspace::span(dim, st.basis.iter().map(|v| v.iter().map(|x| x.0.clone()).collect()))?;
        if map.insert(st.index, sub).is_some() {
            return Err(Error::Parse(format!("{what} index {} given twice", st.index)));
        }
    }
    IndexedFiltration::new(dim, orientation, map)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiNInput {
    pub schema: u32,
    pub p: u64,
    #[serde(default = "one")]
    pub a: u32,
    pub d: u32,
    pub phi: Rows,
    pub n: Rows,
    /// Decreasing Hodge filtration.
    pub fil: Vec<FiltrationStep>,
    #[serde(default)]
    pub gamma_fil: Option<Vec<FiltrationStep>>,
}

fn one() -> u32 {
    1
}

impl PhiNInput {
    pub fn build(&self) -> Result<PhiNModule> {
        check_version(self.schema)?;
        let phi = square(&self.phi, "phi")?;
        let dim = phi.rows();
        let n = matrix(&self.n, dim, dim, "n")?;
        let fil = filtration(&self.fil, dim, Orientation::Decreasing, "fil")?;
        let m = PhiNModule::new(self.p, self.a, self.d, phi, n, fil)?;
        match &self.gamma_fil {
            Some(g) => m.with_gamma_fil(filtration(g, dim, Orientation::Decreasing, "gamma_fil")?),
            None => Ok(m),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexInput {
    pub schema: u32,
    #[serde(default)]
    pub lo: i64,
    pub dims: Vec<usize>,
    /// `diffs[k]` maps degree `lo + k` to `lo + k + 1`.
    pub diffs: Vec<Rows>,
    /// Filtration level of each basis vector, per degree.
    pub levels: Vec<Vec<i64>>,
    #[serde(default)]
    pub labels: Option<Vec<Vec<i64>>>,
}

impl ComplexInput {
    pub fn build(&self) -> Result<FilteredComplex> {
        check_version(self.schema)?;
        if self.diffs.len() + 1 != self.dims.len().max(1) {
            return Err(Error::Parse(format!("{} degrees need {} differentials", self.dims.len(), self.dims.len().saturating_sub(1))));
        }
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(k, m)| matrix(m, self.dims[k + 1], self.dims[k], &format!("differential {k}")))
            .collect::<Result<Vec<_>>>()?;
        let fc = FilteredComplex::from_levels(GradedComplex::new(self.lo, self.dims.clone(), diffs)?, &self.levels)?;
        match &self.labels {
            Some(l) => fc.with_labels(l.clone()),
            None => Ok(fc),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumInput {
    pub set: Vec<usize>,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub weights: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapInput {
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    /// One matrix per source degree.
    pub maps: Vec<Rows>,
}

fn dims_of<'a>(strata: &'a BTreeMap<Vec<usize>, Vec<usize>>, j: &[usize]) -> impl Fn(usize) -> usize + 'a {
    let d = strata.get(j).cloned().unwrap_or_default();
    move |s| d.get(s).copied().unwrap_or(0)
}

fn maps(
    input: &[MapInput],
    strata: &BTreeMap<Vec<usize>, Vec<usize>>,
    target_shift: usize,
    what: &str,
) -> Result<BTreeMap<(Vec<usize>, Vec<usize>), Vec<QMatrix>>> {
    let mut out = BTreeMap::new();
    for m in input {
        let (src, dst) = (dims_of(strata, &m.from), dims_of(strata, &m.to));
        let mats = m
            .maps
            .iter()
            .enumerate()
            .map(|(s, rows)| matrix(rows, dst(s + target_shift), src(s), &format!("{what} {:?} -> {:?} in degree {s}", m.from, m.to)))
            .collect::<Result<Vec<_>>>()?;
        if out.insert((m.from.clone(), m.to.clone()), mats).is_some() {
            return Err(Error::Parse(format!("{what} {:?} -> {:?} given twice", m.from, m.to)));
        }
    }
    Ok(out)
}

fn strata_dims(strata: &[StratumInput]) -> Result<BTreeMap<Vec<usize>, Vec<usize>>> {
    let mut out = BTreeMap::new();
    for s in strata {
        if out.insert(s.set.clone(), s.dims.clone()).is_some() {
            return Err(Error::Parse(format!("stratum {:?} given twice", s.set)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NerveInput {
    pub schema: u32,
    pub components: usize,
    pub strata: Vec<StratumInput>,
    #[serde(default)]
    pub restrictions: Vec<MapInput>,
}

impl NerveInput {
    pub fn build(&self) -> Result<NerveDatum> {
        check_version(self.schema)?;
        let dims = strata_dims(&self.strata)?;
        let strata = self.strata.iter().map(|s| (s.set.clone(), Stratum { dims: s.dims.clone(), weights: s.weights.clone() })).collect();
        NerveDatum::new(self.components, strata, maps(&self.restrictions, &dims, 0, "restriction")?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteenbrinkInput {
    pub schema: u32,
    pub components: usize,
    pub strata: Vec<StratumInput>,
    #[serde(default)]
    pub restrictions: Vec<MapInput>,
    #[serde(default)]
    pub gysins: Vec<MapInput>,
}

impl SteenbrinkInput {
    pub fn build(&self) -> Result<SteenbrinkDatum> {
        check_version(self.schema)?;
        if self.strata.iter().any(|s| s.weights.is_some()) {
            return Err(Error::Parse("strata of a degeneration carry no explicit weights".into()));
        }
        let dims = strata_dims(&self.strata)?;
        let res = maps(&self.restrictions, &dims, 0, "restriction")?;
        let gys = maps(&self.gysins, &dims, 2, "Gysin map")?;
        SteenbrinkDatum::new(self.components, dims, res, gys)
    }
}
