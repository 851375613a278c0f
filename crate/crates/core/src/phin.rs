//! Filtered (φ,N)-modules over ℚ with `q = p^a`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, InvariantViolation, Result};
use crate::filtration::{GradedDims, IndexedFiltration, Orientation, StepDiff};
use crate::matrix::QMatrix;
use crate::monodromy::{self, PowerSpaces};
use crate::poly::{char_poly, factor, newton_polygon};
use crate::rational::{ceil_i64, floor_i64, int, pow_int, q_valuation, ser_q, ser_q_opt, big, Rational};
use crate::subspace::{kernel, Subspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiNModule {
    pub p: u64,
    pub a: u32,
    /// Cohomological degree around which weights are centred.
    pub d: u32,
    pub phi: QMatrix,
    pub n: QMatrix,
    /// Decreasing Hodge filtration.
    pub fil: IndexedFiltration,
    /// Decreasing filtration indexed so that `φ = q^{d-r}` on its graded pieces;
    /// derived from the slope decomposition when absent.
    pub gamma_fil: Option<IndexedFiltration>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

/// One slope of φ together with the sum of the generalised eigenspaces of that slope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeComponent {
    #[serde(serialize_with = "ser_q")]
    pub slope: Rational,
    pub space: Subspace,
}

impl PhiNModule {
    pub fn new(p: u64, a: u32, d: u32, phi: QMatrix, n: QMatrix, fil: IndexedFiltration) -> Result<Self> {
        let m = PhiNModule { p, a, d, phi, n, fil, gamma_fil: None };
        m.validate()?;
        Ok(m)
    }

    pub fn with_gamma_fil(mut self, g: IndexedFiltration) -> Result<Self> {
        self.gamma_fil = Some(g);
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.phi.rows()
    }

    pub fn q(&self) -> Rational {
        big(&pow_int(self.p, self.a))
    }

    /// Checks shapes, then invertibility of φ, nilpotence of N, `Nφ = qφN`
    /// and the filtration axioms, reporting the first failure.
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Range(format!("p = {} is not prime", self.p)));
        }
        if self.a == 0 {
            return Err(Error::Range("a must be positive".into()));
        }
        let n = self.phi.rows();
        for m in [&self.phi, &self.n] {
            if !m.is_square() {
                return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
            }
            if m.rows() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.rows() });
            }
        }
        if self.phi.det()?.is_zero() {
            return Err(InvariantViolation::NonInvertiblePhi.into());
        }
        if !self.n.pow(n).is_zero() {
            return Err(InvariantViolation::NonNilpotentN.into());
        }
        let lhs = &self.n * &self.phi;
        let rhs = (&self.phi * &self.n).scale(&self.q());
        if lhs != rhs {
            return Err(InvariantViolation::Commutation.into());
        }
        for (name, f) in [("fil", Some(&self.fil)), ("gamma_fil", self.gamma_fil.as_ref())] {
            let Some(f) = f else { continue };
            if f.ambient_dim() != n {
                return Err(InvariantViolation::Filtration(format!("{name} has ambient dimension {}", f.ambient_dim())).into());
            }
            if f.orientation() != Orientation::Decreasing {
                return Err(InvariantViolation::Filtration(format!("{name} must be decreasing")).into());
            }
            if !f.is_exhaustive() {
                return Err(InvariantViolation::Filtration(format!("{name} is not exhaustive")).into());
            }
        }
        Ok(())
    }

    pub fn kernel_filtration(&self) -> IndexedFiltration {
        monodromy::kernel_filtration(&self.n)
    }

    pub fn image_filtration(&self) -> IndexedFiltration {
        monodromy::image_filtration(&self.n)
    }

    pub fn monodromy_filtration(&self) -> Result<IndexedFiltration> {
        monodromy::monodromy_filtration(&self.n, self.d)
    }

    pub fn hodge_numbers(&self) -> GradedDims<i64> {
        self.fil.graded_dims()
    }

    /// Horizontal lengths of the q-adic Newton polygon of the characteristic polynomial of φ.
    pub fn newton_numbers(&self) -> Result<GradedDims<Rational>> {
        let np = newton_polygon(&char_poly(&self.phi)?, self.p, self.a)?;
        Ok(GradedDims::from_pairs(np.segments))
    }

    /// `(t_N, t_H)` of the whole module.
    pub fn t_numbers(&self) -> Result<(Rational, Rational)> {
        let full = Subspace::full(self.dim());
        Ok((self.t_newton(&full)?, self.t_hodge(&full)?))
    }

    /// `t_N` of a φ-stable subspace: the q-valuation of the determinant of φ on it.
    pub fn t_newton(&self, sub: &Subspace) -> Result<Rational> {
        if sub.is_zero() {
            return Ok(Rational::zero());
        }
        let det = sub.restrict(&self.phi)?.det()?;
        Ok(q_valuation(&det, self.p, self.a))
    }

    /// `t_H` of a subspace with the induced filtration.
    pub fn t_hodge(&self, sub: &Subspace) -> Result<Rational> {
        let induced = self.fil.intersect_with(sub)?;
        Ok(induced.graded_dims().0.iter().map(|(i, k)| int(i * *k as i64)).sum())
    }

    /// Decomposition of the space into φ-stable pieces of pure slope, sorted by slope.
    pub fn slope_decomposition(&self) -> Result<Vec<SlopeComponent>> {
        let n = self.dim();
        let mut by_slope: BTreeMap<Rational, Subspace> = BTreeMap::new();
        for (g, mult) in factor(&char_poly(&self.phi)?)? {
            let np = newton_polygon(&g, self.p, self.a)?;
            let slope = np.pure_slope().ok_or_else(|| Error::MixedSlopeFactor(g.to_string()))?;
            let comp = kernel(&g.pow(mult).eval_matrix(&self.phi));
            let entry = by_slope.entry(slope).or_insert_with(|| Subspace::zero(n));
            *entry = entry.sum(&comp)?;
        }
        Ok(by_slope.into_iter().map(|(slope, space)| SlopeComponent { slope, space }).collect())
    }

    /// Increasing filtration by slope: cumulative sums of slope components.
    pub fn slope_filtration(&self) -> Result<Vec<SlopeComponent>> {
        let mut acc = Subspace::zero(self.dim());
        let mut out = Vec::new();
        for c in self.slope_decomposition()? {
            acc = acc.sum(&c.space)?;
            out.push(SlopeComponent { slope: c.slope, space: acc.clone() });
        }
        Ok(out)
    }

    /// `P_r` = sum of the slope components of weight `2s ≤ d + r`.
    pub fn weight_filtration(&self) -> Result<IndexedFiltration> {
        let d = int(self.d as i64);
        let mut grouped: BTreeMap<i64, Subspace> = BTreeMap::new();
        for c in self.slope_decomposition()? {
            let r = ceil_i64(&(int(2) * &c.slope - &d));
            let e = grouped.entry(r).or_insert_with(|| Subspace::zero(self.dim()));
            *e = e.sum(&c.space)?;
        }
        let mut acc = Subspace::zero(self.dim());
        let mut steps = BTreeMap::new();
        for (r, s) in grouped {
            acc = acc.sum(&s)?;
            steps.insert(r, acc.clone());
        }
        IndexedFiltration::new(self.dim(), Orientation::Increasing, steps)
    }

    /// `F_Γ^r` = sum of the slope components with slope `≤ d - r`, unless
    /// supplied explicitly.
    pub fn gamma_filtration(&self) -> Result<IndexedFiltration> {
        if let Some(g) = &self.gamma_fil {
            return Ok(g.clone());
        }
        let d = int(self.d as i64);
        let mut grouped: BTreeMap<i64, Subspace> = BTreeMap::new();
        for c in self.slope_decomposition()? {
            let r = floor_i64(&(&d - &c.slope));
            let e = grouped.entry(r).or_insert_with(|| Subspace::zero(self.dim()));
            *e = e.sum(&c.space)?;
        }
        let mut acc = Subspace::zero(self.dim());
        let mut steps = BTreeMap::new();
        for (r, s) in grouped.into_iter().rev() {
            acc = acc.sum(&s)?;
            steps.insert(r, acc.clone());
        }
        IndexedFiltration::new(self.dim(), Orientation::Decreasing, steps)
    }

    pub fn is_weakly_admissible(&self, opts: &AdmissibilityOptions) -> Result<AdmissibilityReport> {
        admissibility(self, opts)
    }

    pub fn is_ordinary(&self, opts: &AdmissibilityOptions) -> Result<OrdinaryReport> {
        let newton = self.newton_numbers()?;
        let hodge = self.hodge_numbers();
        let integral_slopes = newton.0.keys().all(|s| s.is_integer());
        let newton_int: BTreeMap<i64, usize> =
            newton.0.iter().filter(|(s, _)| s.is_integer()).map(|(s, k)| (floor_i64(s), *k)).collect();
        let numbers_match = integral_slopes && newton_int == hodge.0;
        let adm = self.is_weakly_admissible(opts)?;
        let verdict = if !integral_slopes || !numbers_match {
            OrdinaryVerdict::NotOrdinary
        } else {
            match adm.verdict {
                Verdict::Admissible => OrdinaryVerdict::Ordinary,
                Verdict::NotAdmissible => OrdinaryVerdict::NotOrdinary,
                Verdict::SampledInconclusive => OrdinaryVerdict::Inconclusive,
            }
        };
        Ok(OrdinaryReport { verdict, integral_slopes, numbers_match, admissibility: adm.verdict })
    }

    pub fn monodromy_weight_check(&self) -> Result<MonodromyWeightReport> {
        let m = self.monodromy_filtration()?;
        let w = self.weight_filtration()?;
        let (lo, hi) = m.joint_window(&w);
        let diff = m.diff(&w, lo, hi);
        Ok(MonodromyWeightReport { holds: diff.is_empty(), diff, monodromy: m, weight: w })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonodromyWeightReport {
    pub holds: bool,
    /// Indices where `M_r ≠ P_r`, with `left_dim = dim M_r` and `right_dim = dim P_r`.
    pub diff: Vec<StepDiff>,
    pub monodromy: IndexedFiltration,
    pub weight: IndexedFiltration,
}

/// `filA^r ⊕ filB^{d+1-r} = V` for every `r`.
pub fn check_opposite(fil_a: &IndexedFiltration, fil_b: &IndexedFiltration, d: i64) -> Result<bool> {
    let n = fil_a.ambient_dim();
    if fil_b.ambient_dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: fil_b.ambient_dim() });
    }
    let (a_lo, a_hi) = fil_a.key_window().unwrap_or((0, 0));
    let (b_lo, b_hi) = fil_b.key_window().unwrap_or((0, 0));
    let lo = a_lo.min(d + 1 - b_hi) - 1;
    let hi = a_hi.max(d + 1 - b_lo) + 1;
    for r in lo..=hi {
        let x = fil_a.step(r);
        let y = fil_b.step(d + 1 - r);
        if x.dim() + y.dim() != n || !x.intersect(&y)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Admissible,
    NotAdmissible,
    SampledInconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrdinaryVerdict {
    Ordinary,
    NotOrdinary,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrdinaryReport {
    pub verdict: OrdinaryVerdict,
    pub integral_slopes: bool,
    pub numbers_match: bool,
    pub admissibility: Verdict,
}

/// How the stable subspaces were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Enumeration {
    /// φ is cyclic: stable subspaces are sums of powers of primary kernels.
    CyclicPhi,
    /// N has a one-dimensional kernel: stable subspaces are the `ker(N^j)`.
    RegularN,
    /// Neither applies; a finite family of candidates was sampled.
    Sampled,
}

#[derive(Clone, Debug)]
pub struct AdmissibilityOptions {
    pub seed: u64,
    /// Random closure candidates generated in the sampled fallback.
    pub samples: usize,
    /// Upper bound on exactly enumerated candidate subspaces.
    pub budget: usize,
}

impl Default for AdmissibilityOptions {
    fn default() -> Self {
        AdmissibilityOptions { seed: 0, samples: 64, budget: 1 << 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    #[serde(serialize_with = "ser_q")]
    pub t_n: Rational,
    #[serde(serialize_with = "ser_q")]
    pub t_h: Rational,
    pub verdict: Verdict,
    pub certified: bool,
    pub enumeration: Enumeration,
    pub subspaces_checked: usize,
    pub witness: Option<Subspace>,
    #[serde(serialize_with = "ser_q_opt")]
    pub witness_t_n: Option<Rational>,
    #[serde(serialize_with = "ser_q_opt")]
    pub witness_t_h: Option<Rational>,
}

fn exact_stable_subspaces(m: &PhiNModule, budget: usize) -> Result<Option<(Vec<Subspace>, Enumeration)>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Some((vec![Subspace::zero(0)], Enumeration::CyclicPhi)));
    }
    let ps = PowerSpaces::new(&m.n);
    if ps.ker(1).dim() == 1 {
        let subs = (0..=n).map(|j| ps.ker(j).clone()).filter(|s| s.is_stable_under(&m.phi)).collect();
        return Ok(Some((subs, Enumeration::RegularN)));
    }
    let factors = factor(&char_poly(&m.phi)?)?;
    let mut chains: Vec<Vec<Subspace>> = Vec::new();
    for (g, e) in &factors {
        let g_phi = g.eval_matrix(&m.phi);
        if kernel(&g_phi).dim() != g.degree().unwrap_or(0) {
            return Ok(None);
        }
        let mut chain = vec![Subspace::zero(n)];
        let mut pow = QMatrix::identity(n);
        for _ in 0..*e {
            pow = &pow * &g_phi;
            chain.push(kernel(&pow));
        }
        chains.push(chain);
    }
    let total: usize = chains.iter().map(Vec::len).try_fold(1usize, |acc, l| acc.checked_mul(l)).unwrap_or(usize::MAX);
    if total > budget {
        return Ok(None);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; chains.len()];
    loop {
        let mut s = Subspace::zero(n);
        for (c, &i) in chains.iter().zip(&idx) {
            s = s.sum(&c[i])?;
        }
        if s.is_stable_under(&m.n) {
            out.push(s);
        }
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(Some((out, Enumeration::CyclicPhi)));
            }
            idx[pos] += 1;
            if idx[pos] < chains[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Stable candidates when the stable-subspace lattice may be infinite.
fn sampled_stable_subspaces(m: &PhiNModule, opts: &AdmissibilityOptions) -> Result<Vec<Subspace>> {
    let n = m.dim();
    let maps = [&m.phi, &m.n];
    let mut cands: BTreeSet<Subspace> = BTreeSet::new();
    cands.insert(Subspace::zero(n));
    cands.insert(Subspace::full(n));
    let ps = PowerSpaces::new(&m.n);
    for j in 0..=n {
        cands.insert(ps.ker(j).clone());
        cands.insert(ps.im(j as i64).clone());
    }
    for step in m.fil.steps().values() {
        cands.insert(step.interior_under(&maps));
    }
    let factors = factor(&char_poly(&m.phi)?)?;
    let mut primaries = Vec::new();
    for (g, e) in &factors {
        let g_phi = g.eval_matrix(&m.phi);
        let prim = kernel(&g.pow(*e).eval_matrix(&m.phi));
        primaries.push(prim.closure_under(&maps));
        // single vectors of each eigenspace and of each primary component
        for sp in [kernel(&g_phi), prim] {
            for v in sp.basis_vectors() {
                cands.insert(Subspace::span(n, [v])?.closure_under(&maps));
            }
        }
    }
    if primaries.len() <= 12 {
        for mask in 0u32..(1 << primaries.len()) {
            let mut s = Subspace::zero(n);
            for (k, p) in primaries.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    s = s.sum(p)?;
                }
            }
            cands.insert(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let k = rng.random_range(1..=2usize.min(n.max(1)));
        let vecs: Vec<Vec<Rational>> =
            (0..k).map(|_| (0..n).map(|_| int(rng.random_range(-3..=3))).collect()).collect();
        cands.insert(Subspace::span(n, vecs)?.closure_under(&maps));
    }
    let base: Vec<Subspace> = cands.iter().take(256).cloned().collect();
    for (i, a) in base.iter().enumerate() {
        for b in &base[i + 1..] {
            cands.insert(a.sum(b)?);
            cands.insert(a.intersect(b)?);
        }
        if cands.len() > opts.budget {
            break;
        }
    }
    Ok(cands.into_iter().filter(|s| s.is_stable_under(&m.phi) && s.is_stable_under(&m.n)).collect())
}

fn admissibility(m: &PhiNModule, opts: &AdmissibilityOptions) -> Result<AdmissibilityReport> {
    let (t_n, t_h) = m.t_numbers()?;
    let (subs, enumeration) = match exact_stable_subspaces(m, opts.budget)? {
        Some(x) => x,
        None => (sampled_stable_subspaces(m, opts)?, Enumeration::Sampled),
    };
    // worst violation first, then smallest dimension, then canonical order
    let mut worst: Option<(Rational, Subspace, Rational, Rational)> = None;
    for s in &subs {
        let tn = m.t_newton(s)?;
        let th = m.t_hodge(s)?;
        let excess = &th - &tn;
        if !excess.is_positive() {
            continue;
        }
        let better = match &worst {
            None => true,
            Some((e, w, _, _)) => excess > *e || (excess == *e && (s.dim(), s) < (w.dim(), w)),
        };
        if better {
            worst = Some((excess, s.clone(), tn, th));
        }
    }
    let global_ok = t_n == t_h;
    let (verdict, certified) = if worst.is_some() || !global_ok {
        (Verdict::NotAdmissible, true)
    } else if enumeration == Enumeration::Sampled {
        (Verdict::SampledInconclusive, false)
    } else {
        (Verdict::Admissible, true)
    };
    let (witness, witness_t_n, witness_t_h) = match worst {
        Some((_, w, tn, th)) => (Some(w), Some(tn), Some(th)),
        None => (None, None, None),
    };
    Ok(AdmissibilityReport {
        t_n,
        t_h,
        verdict,
        certified,
        enumeration,
        subspaces_checked: subs.len(),
        witness,
        witness_t_n,
        witness_t_h,
    })
}
