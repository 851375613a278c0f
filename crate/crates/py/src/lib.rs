//! Python bindings. Structured results cross the boundary as plain Python
//! objects decoded from their JSON serialisation; rationals stay strings.

use std::collections::BTreeMap;

use phin_core::drinfeld::{self, LatticeClass, SpaceSpec};
use phin_core::monodromy;
use phin_core::rational::parse_rational;
use phin_core::schema::{self, ComplexInput, NerveInput, PhiNInput, SteenbrinkInput};
use phin_core::spectral::{self, cech, FilteredComplex, SteenbrinkDatum};
use phin_core::{AdmissibilityOptions, ErrorKind, QMatrix};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;

fn err(e: phin_core::Error) -> PyErr {
    match e.kind() {
        ErrorKind::InvalidInput | ErrorKind::Precondition => PyValueError::new_err(e.to_string()),
        ErrorKind::CrossCheck => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts either a JSON string or a JSON-compatible Python object.
fn json_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_string());
    }
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn parse<T: serde::de::DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    schema::parse(&json_text(obj)?).map_err(err)
}

/// Entries may be Python ints or strings such as `"3/4"`.
fn matrix(rows: &Bound<'_, PyAny>) -> PyResult<QMatrix> {
    let rows: Vec<Vec<Bound<'_, PyAny>>> = rows.extract()?;
    let cols = rows.first().map_or(0, Vec::len);
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for x in row {
            let s: String = if x.cast::<PyString>().is_ok() { x.extract()? } else { x.str()?.to_string() };
            r.push(parse_rational(&s).map_err(err)?);
        }
        out.push(r);
    }
    QMatrix::from_rows(out, cols).map_err(err)
}

/// A filtered φ-module with monodromy.
#[pyclass(name = "PhiNModule", module = "phin")]
struct PyPhiNModule {
    inner: phin_core::PhiNModule,
}

#[pymethods]
impl PyPhiNModule {
    /// Builds a module from the same JSON document the `phin-analyze` command reads.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let input: PhiNInput = parse(spec)?;
        Ok(PyPhiNModule { inner: input.build().map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn q(&self) -> String {
        self.inner.q().to_string()
    }

    /// `(t_N, t_H)` of the whole module.
    fn t_numbers(&self) -> PyResult<(String, String)> {
        let (n, h) = self.inner.t_numbers().map_err(err)?;
        Ok((n.to_string(), h.to_string()))
    }

    fn hodge_numbers<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.hodge_numbers())
    }

    fn newton_numbers<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.newton_numbers().map_err(err)?)
    }

    fn monodromy_filtration<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.monodromy_filtration().map_err(err)?)
    }

    fn weight_filtration<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.weight_filtration().map_err(err)?)
    }

    #[pyo3(signature = (seed = 0, budget = None))]
    fn is_weakly_admissible<'py>(&self, py: Python<'py>, seed: u64, budget: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let mut opts = AdmissibilityOptions { seed, ..Default::default() };
        if let Some(b) = budget {
            opts.budget = b;
        }
        to_py(py, &self.inner.is_weakly_admissible(&opts).map_err(err)?)
    }

    #[pyo3(signature = (seed = 0))]
    fn is_ordinary<'py>(&self, py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let opts = AdmissibilityOptions { seed, ..Default::default() };
        to_py(py, &self.inner.is_ordinary(&opts).map_err(err)?)
    }

    fn monodromy_weight_check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.monodromy_weight_check().map_err(err)?)
    }

    fn gamma_quotient_check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &phin_core::gamma_quotient::gamma_quotient_check(&self.inner).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("PhiNModule(dim={}, q={})", self.inner.dim(), self.inner.q())
    }
}

/// A cochain complex with a decreasing filtration and its spectral sequence.
#[pyclass(name = "FilteredComplex", module = "phin")]
struct PyFilteredComplex {
    inner: FilteredComplex,
}

#[pymethods]
impl PyFilteredComplex {
    /// Builds from the `ss-pages` JSON document.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let input: ComplexInput = parse(spec)?;
        Ok(PyFilteredComplex { inner: input.build().map_err(err)? })
    }

    /// Čech complex of a nerve given as the `ss-cech` JSON document.
    #[staticmethod]
    fn from_nerve(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let input: NerveInput = parse(spec)?;
        let nd = input.build().map_err(err)?;
        Ok(PyFilteredComplex { inner: cech::cech_complex(&nd).map_err(err)? })
    }

    fn cohomology(&self) -> BTreeMap<i64, usize> {
        self.inner.complex().cohomology_dims()
    }

    /// Nonzero entries of `E_r` keyed by `(p, q)`.
    fn e_page(&self, r: usize) -> PyResult<BTreeMap<(i64, i64), usize>> {
        Ok(self.inner.e_page(r).map_err(err)?.entries)
    }

    fn stable_page(&self) -> usize {
        self.inner.stable_page()
    }

    /// First page from which all differentials vanish, or `None` past `bound`.
    #[pyo3(signature = (bound = None))]
    fn degeneration_page(&self, bound: Option<usize>) -> PyResult<Option<usize>> {
        match self.inner.degeneration_page(bound.unwrap_or_else(|| self.inner.stable_page())).map_err(err)? {
            spectral::Degeneration::Page(r) => Ok(Some(r)),
            spectral::Degeneration::Censored { .. } => Ok(None),
        }
    }

    fn equivariant_degeneration_check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.equivariant_degeneration_check().map_err(err)?)
    }
}

/// Graded dimensions `{r: dim gr_r}` of the monodromy filtration of `n`, with `n^{d+1} = 0`.
#[pyfunction]
fn monodromy_filtration_dims(n: &Bound<'_, PyAny>, d: u32) -> PyResult<BTreeMap<i64, usize>> {
    let m = monodromy::monodromy_filtration(&matrix(n)?, d).map_err(err)?;
    Ok(m.graded_dims().0)
}

#[pyfunction]
fn kernel_image_check<'py>(py: Python<'py>, n: &Bound<'py, PyAny>, d: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &monodromy::kernel_image_check(&matrix(n)?, d).map_err(err)?)
}

/// Characteristic polynomial coefficients, constant term first, as strings.
#[pyfunction]
fn char_poly(m: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
    let p = phin_core::char_poly(&matrix(m)?).map_err(err)?;
    Ok((0..=p.degree().unwrap_or(0)).map(|k| p.coeff(k).to_string()).collect())
}

/// Steenbrink report for a cycle of `n` projective lines, or for a JSON datum.
#[pyfunction]
#[pyo3(signature = (cycle = None, spec = None))]
fn steenbrink<'py>(py: Python<'py>, cycle: Option<usize>, spec: Option<&Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
    let sd = match (cycle, spec) {
        (Some(n), None) => SteenbrinkDatum::cycle(n).map_err(err)?,
        (None, Some(s)) => parse::<SteenbrinkInput>(s)?.build().map_err(err)?,
        _ => return Err(PyValueError::new_err("pass exactly one of cycle= or spec=")),
    };
    to_py(py, &spectral::monodromy_endomorphism(&sd).map_err(err)?)
}

#[pyfunction]
fn gaussian_binomial(n: u32, k: u32, q: u64) -> PyResult<u128> {
    drinfeld::gaussian_binomial(n, k, q).map_err(err)
}

/// Number of vertices of the building of `PGL_{d+1}(Q_p)` within distance `n` of the origin.
#[pyfunction]
#[pyo3(signature = (d, p, n, budget = 100_000))]
fn ball_layers(d: usize, p: u32, n: usize, budget: usize) -> PyResult<Vec<usize>> {
    let b = drinfeld::ball(&LatticeClass::standard(d), n, p, budget).map_err(err)?;
    Ok(b.layer_sizes())
}

/// Betti numbers of the complement of the `F_q`-rational hyperplanes in `P^r`.
#[pyfunction]
fn arrangement_poincare(r: usize, q: u64) -> PyResult<Vec<u64>> {
    Ok(drinfeld::rational_arrangement_poincare(r, q).map_err(err)?.0)
}

/// Betti numbers of the iterated blow-up of `P^r` along all rational linear subspaces.
#[pyfunction]
fn blowup_poincare(r: usize, q: u64) -> PyResult<Vec<u64>> {
    Ok(drinfeld::blowup_poincare(r, q).map_err(err)?.0)
}

/// Point count over `F_{q^s}`; `kind` is `"arrangement"` or `"blowup"`.
#[pyfunction]
fn point_count(kind: &str, r: usize, q: u64, s: u32) -> PyResult<num_bigint::BigUint> {
    let spec = match kind {
        "arrangement" => SpaceSpec::ArrangementComplement(r),
        "blowup" => SpaceSpec::IteratedBlowup(r),
        _ => return Err(PyValueError::new_err(format!("unknown space kind {kind:?}"))),
    };
    drinfeld::point_count_oracle(spec, q, s).map_err(err)
}

#[pymodule]
fn phin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhiNModule>()?;
    m.add_class::<PyFilteredComplex>()?;
    m.add_function(wrap_pyfunction!(monodromy_filtration_dims, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_image_check, m)?)?;
    m.add_function(wrap_pyfunction!(char_poly, m)?)?;
    m.add_function(wrap_pyfunction!(steenbrink, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(ball_layers, m)?)?;
    m.add_function(wrap_pyfunction!(arrangement_poincare, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_poincare, m)?)?;
    m.add_function(wrap_pyfunction!(point_count, m)?)?;
    Ok(())
}
