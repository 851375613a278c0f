//! The quotient by the φ-stable complement `C` inside `ker N`, and the
//! comparison of the quotient's Γ-filtration with the kernel and image
//! filtrations of the induced monodromy.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::filtration::{IndexedFiltration, StepDiff};
use crate::matrix::QMatrix;
use crate::monodromy::PowerSpaces;
use crate::phin::{check_opposite, PhiNModule};
use crate::rational::{rpow, Rational};
use crate::subspace::{kernel, Subspace};

#[derive(Clone, Debug)]
pub struct CbarQuotient {
    pub c: Subspace,
    pub dbar: PhiNModule,
    /// Quotient map `D → D/C` in coordinates of the non-pivot positions of `C`.
    pub projection: QMatrix,
}

/// Projection onto the coordinates not used as pivots by `c`, killing `c`.
fn quotient_maps(c: &Subspace) -> (QMatrix, QMatrix) {
    let n = c.ambient_dim();
    let free = c.complement_indices();
    let mut proj = QMatrix::zeros(free.len(), n);
    let mut sect = QMatrix::zeros(n, free.len());
    for (row, &f) in free.iter().enumerate() {
        proj.set(row, f, Rational::one());
        sect.set(f, row, Rational::one());
    }
    for (j, &p) in c.pivots().iter().enumerate() {
        for (row, &f) in free.iter().enumerate() {
            proj.set(row, p, -c.basis().get(j, f).clone());
        }
    }
    (proj, sect)
}

/// `C = 0` for odd `d`; for even `d`, the sum of the nonzero-slope parts of
/// `ker N`. Returns `C` together with `D/C` carrying the induced operators
/// and the images of both filtrations.
pub fn cbar_quotient(m: &PhiNModule) -> Result<CbarQuotient> {
    let n = m.dim();
    let gamma = m.gamma_filtration()?;
    let mut c = Subspace::zero(n);
    if m.d % 2 == 0 {
        let ker_n = kernel(&m.n);
        for comp in m.slope_decomposition()? {
            if !comp.slope.is_zero() {
                c = c.sum(&ker_n.intersect(&comp.space)?)?;
            }
        }
    }
    let (proj, sect) = quotient_maps(&c);
    let phi = &(&proj * &m.phi) * &sect;
    let nbar = &(&proj * &m.n) * &sect;
    let dbar = PhiNModule::new(m.p, m.a, m.d, phi, nbar, m.fil.image_under(&proj)?)?
        .with_gamma_fil(gamma.image_under(&proj)?)?;
    Ok(CbarQuotient { c, dbar, projection: proj })
}

#[derive(Clone, Debug, Serialize)]
pub struct Clause {
    pub id: String,
    pub statement: String,
    pub pass: bool,
}

impl Clause {
    pub fn new(id: &str, statement: &str, pass: bool) -> Self {
        Clause { id: id.into(), statement: statement.into(), pass }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaQuotientReport {
    pub dim_c: usize,
    pub c: Subspace,
    pub gamma_bar: IndexedFiltration,
    pub hodge_bar: IndexedFiltration,
    /// Indices `r` where the quotient Γ-step differs from `ker(N̄^{d+1-r})` or `im(N̄^r)`.
    pub kernel_diff: Vec<StepDiff>,
    pub image_diff: Vec<StepDiff>,
    pub clauses: Vec<Clause>,
}

impl GammaQuotientReport {
    pub fn clause(&self, id: &str) -> Option<bool> {
        self.clauses.iter().find(|c| c.id == id).map(|c| c.pass)
    }
}

pub fn gamma_quotient_check(m: &PhiNModule) -> Result<GammaQuotientReport> {
    let d = m.d as i64;
    let gamma = m.gamma_filtration()?;
    let cq = cbar_quotient(m)?;
    let dbar = &cq.dbar;
    let gbar = dbar.gamma_filtration()?;
    let q = dbar.q();

    let opposite = check_opposite(&dbar.fil, &gbar, d)?;

    let (lo, hi) = gbar.key_window().unwrap_or((0, 0));
    let (lo, hi) = (lo.min(0) - 1, hi.max(d) + 1);
    let mut stable = true;
    let mut eigen = true;
    for r in lo..=hi {
        let step = gbar.step(r);
        stable &= step.is_stable_under(&dbar.phi);
        let shifted = &dbar.phi - &QMatrix::identity(dbar.dim()).scale(&rpow(&q, d - r));
        eigen &= step.image_under(&shifted)?.is_subspace_of(&gbar.step(r + 1));
    }

    let ps = PowerSpaces::new(&dbar.n);
    let mut kernel_diff = Vec::new();
    let mut image_diff = Vec::new();
    for r in 0..=d + 1 {
        let f = gbar.step(r);
        let k = ps.ker((d + 1 - r) as usize);
        let i = ps.im(r);
        if &f != k {
            kernel_diff.push(StepDiff { index: r, left_dim: f.dim(), right_dim: k.dim() });
        }
        if &f != i {
            image_diff.push(StepDiff { index: r, left_dim: f.dim(), right_dim: i.dim() });
        }
    }

    let ker_n = kernel(&m.n);
    let full_ps = PowerSpaces::new(&m.n);
    let top_is_ker_im = gamma.step(d) == ker_n.intersect(full_ps.im(1))?;
    let c_avoids_upper = m.d % 2 == 1 || cq.c.intersect(&gamma.step(d / 2 + 1))?.is_zero();
    let ker_projects = ker_n.image_under(&cq.projection)? == kernel(&dbar.n);

    let clauses = vec![
        Clause::new("a", "quotient Hodge and Gamma filtrations are opposite", opposite),
        Clause::new("b.stable", "quotient Gamma filtration is stable under phi", stable),
        Clause::new("b.eigen", "phi acts as q^(d-r) on the r-th Gamma graded piece", eigen && stable),
        Clause::new("c", "quotient Gamma filtration equals the kernel and image filtrations of N", kernel_diff.is_empty() && image_diff.is_empty()),
        Clause::new("c.avoid", "C meets Gamma step d/2+1 trivially", c_avoids_upper),
        Clause::new("top", "Gamma step d equals ker N intersect im N", top_is_ker_im),
        Clause::new("kernel", "ker N maps onto the kernel of the quotient N", ker_projects),
    ];
    Ok(GammaQuotientReport {
        dim_c: cq.c.dim(),
        c: cq.c,
        gamma_bar: gbar,
        hodge_bar: dbar.fil.clone(),
        kernel_diff,
        image_diff,
        clauses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::Orientation;
    use crate::rational::int;

    fn dec(n: usize, steps: Vec<(i64, Subspace)>) -> IndexedFiltration {
        IndexedFiltration::from_steps(n, Orientation::Decreasing, steps).unwrap()
    }

    /// φ = diag(1,q,q,q²), N e4 = e2, N e2 = e1, N e3 = 0.
    fn synthetic(p: u64) -> PhiNModule {
        let q = p as i64;
        let phi = QMatrix::diag(&[int(1), int(q), int(q), int(q * q)]);
        let n = QMatrix::from_i64(&[&[0, 1, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let fil = dec(
            4,
            vec![(0, Subspace::full(4)), (1, Subspace::coordinate(4, [1, 2, 3])), (2, Subspace::coordinate(4, [3]))],
        );
        PhiNModule::new(p, 1, 2, phi, n, fil).unwrap()
    }

    #[test]
    fn quotient_in_odd_degree_is_trivial() {
        let phi = QMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        let n = QMatrix::from_i64(&[&[0, 1], &[0, 0]]);
        let m = PhiNModule::new(2, 1, 1, phi, n, dec(2, vec![(0, Subspace::full(2)), (1, Subspace::coordinate(2, [1]))])).unwrap();
        let cq = cbar_quotient(&m).unwrap();
        assert!(cq.c.is_zero());
        assert_eq!(cq.dbar.phi, m.phi);
        let r = gamma_quotient_check(&m).unwrap();
        assert!(r.clauses.iter().all(|c| c.pass), "{:?}", r.clauses);
    }

    #[test]
    fn quotient_in_even_degree() {
        // φ = diag(1,q,q²), N e3 = e2: ker N = span(e1, e2), C = span(e2)
        let phi = QMatrix::diag(&[int(1), int(3), int(9)]);
        let n = QMatrix::from_i64(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]);
        let m = PhiNModule::new(3, 1, 2, phi, n, dec(3, vec![(0, Subspace::full(3))])).unwrap();
        let cq = cbar_quotient(&m).unwrap();
        assert_eq!(cq.c, Subspace::coordinate(3, [1]));
        assert_eq!(cq.dbar.dim(), 2);
        let unit = PhiNModule::new(3, 1, 2, QMatrix::identity(2), QMatrix::zeros(2, 2), dec(2, vec![(0, Subspace::full(2))])).unwrap();
        assert!(cbar_quotient(&unit).unwrap().c.is_zero());
    }

    #[test]
    fn synthetic_even_module() {
        let m = synthetic(2);
        assert_eq!(m.gamma_filtration().unwrap().graded_dims().0, std::collections::BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        let r = gamma_quotient_check(&m).unwrap();
        assert_eq!(r.dim_c, 1);
        assert!(r.clauses.iter().all(|c| c.pass), "{:?}", r.clauses);
    }

    #[test]
    fn failure_reported_without_monodromy() {
        let phi = QMatrix::from_i64(&[&[1, 0], &[0, 2]]);
        let m = PhiNModule::new(2, 1, 1, phi, QMatrix::zeros(2, 2), dec(2, vec![(0, Subspace::full(2)), (1, Subspace::coordinate(2, [1]))])).unwrap();
        let r = gamma_quotient_check(&m).unwrap();
        assert_eq!(r.clause("c"), Some(false));
        assert!(!r.kernel_diff.is_empty());
    }
}
