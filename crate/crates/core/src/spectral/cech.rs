//! Čech complexes of a finite closed covering given combinatorially: the
//! cohomology of every nonempty intersection `M_J` together with the
//! restriction maps between them.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::{int, Rational};
use crate::spectral::complex::{FilteredComplex, GradedComplex};

/// Sorted set of component indices.
pub type Face = Vec<usize>;

/// Nonempty subsets of `0..n`, by size and then lexicographically.
pub fn nonempty_subsets(n: usize) -> Vec<Face> {
    let mut out: Vec<Face> = (1u32..(1 << n)).map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect()).collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

fn is_sorted_face(j: &[usize], n: usize) -> bool {
    !j.is_empty() && j.windows(2).all(|w| w[0] < w[1]) && j.iter().all(|&x| x < n)
}

/// Position at which `x ∉ j` is inserted into `j`.
pub(crate) fn insert_pos(j: &[usize], x: usize) -> usize {
    j.iter().take_while(|&&y| y < x).count()
}

fn with(j: &[usize], x: usize) -> Face {
    let mut k = j.to_vec();
    k.insert(insert_pos(j, x), x);
    k
}

/// `Λ_m`: strictly increasing flags `J_0 ⊊ … ⊊ J_m` of nonempty subsets of `0..n`.
pub fn lambda_flags(n: usize, m: usize) -> Vec<Vec<Face>> {
    let subsets = nonempty_subsets(n);
    let mut flags: Vec<Vec<Face>> = subsets.iter().map(|s| vec![s.clone()]).collect();
    for _ in 0..m {
        let mut next = Vec::new();
        for f in &flags {
            let last = f.last().expect("nonempty flag");
            for s in &subsets {
                if s.len() > last.len() && last.iter().all(|x| s.contains(x)) {
                    let mut g = f.clone();
                    g.push(s.clone());
                    next.push(g);
                }
            }
        }
        flags = next;
    }
    flags.sort();
    flags
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// `dims[s] = dim H^s(M_J)`.
    pub dims: Vec<usize>,
    /// Frobenius weight of `H^s(M_J)`; defaults to `s`.
    pub weights: Option<Vec<i64>>,
}

/// Cohomology of the strata of a closed covering indexed by nonempty subsets
/// of the components, with functorial restriction maps. Missing strata are zero.
#[derive(Clone, Debug)]
pub struct NerveDatum {
    components: usize,
    strata: BTreeMap<Face, Stratum>,
    /// Restriction along `J ⊂ J ∪ {x}`, one matrix per degree.
    covering: BTreeMap<(Face, Face), Vec<QMatrix>>,
    max_degree: usize,
}

impl NerveDatum {
    /// `restrictions` may contain any pairs `J ⊊ K`; pairs differing by one
    /// element are required whenever both strata are nonzero in some degree,
    /// and all supplied maps must agree with composites of those.
    pub fn new(
        components: usize,
        strata: BTreeMap<Face, Stratum>,
        restrictions: BTreeMap<(Face, Face), Vec<QMatrix>>,
    ) -> Result<Self> {
        if components == 0 {
            return Err(Error::Range("a nerve needs at least one component".into()));
        }
        for (j, st) in &strata {
            if !is_sorted_face(j, components) {
                return Err(Error::Inconsistent(format!("invalid stratum index set {j:?}")));
            }
            if st.weights.as_ref().is_some_and(|w| w.len() != st.dims.len()) {
                return Err(Error::Inconsistent(format!("weights of stratum {j:?} do not match its degrees")));
            }
        }
        let max_degree = strata.values().map(|s| s.dims.len()).max().unwrap_or(0);
        let mut nd = NerveDatum { components, strata, covering: BTreeMap::new(), max_degree };
        for ((from, to), maps) in &restrictions {
            if !is_sorted_face(from, components) || !is_sorted_face(to, components) || from.len() >= to.len() || !from.iter().all(|x| to.contains(x)) {
                return Err(Error::Inconsistent(format!("restriction {from:?} -> {to:?} is not along an inclusion")));
            }
            if maps.len() > max_degree.max(1) {
                return Err(Error::Inconsistent(format!("restriction {from:?} -> {to:?} has too many degrees")));
            }
            for (s, m) in maps.iter().enumerate() {
                if m.rows() != nd.dim(to, s) || m.cols() != nd.dim(from, s) {
                    return Err(Error::Inconsistent(format!("restriction {from:?} -> {to:?} in degree {s} has wrong shape")));
                }
            }
        }
        for j in nonempty_subsets(components) {
            for x in (0..components).filter(|x| !j.contains(x)) {
                let k = with(&j, x);
                let maps = (0..max_degree)
                    .map(|s| match restrictions.get(&(j.clone(), k.clone())).and_then(|v| v.get(s)) {
                        Some(m) => Ok(m.clone()),
                        None if nd.dim(&j, s) == 0 || nd.dim(&k, s) == 0 => Ok(QMatrix::zeros(nd.dim(&k, s), nd.dim(&j, s))),
                        None => Err(Error::Inconsistent(format!("missing restriction {j:?} -> {k:?} in degree {s}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                nd.covering.insert((j.clone(), k), maps);
            }
        }
        for j in nonempty_subsets(components) {
            let outside: Vec<usize> = (0..components).filter(|x| !j.contains(x)).collect();
            for (ai, &a) in outside.iter().enumerate() {
                for &b in &outside[ai + 1..] {
                    let k = with(&with(&j, a), b);
                    for s in 0..max_degree {
                        let via_a = &nd.covering[&(with(&j, a), k.clone())][s] * &nd.covering[&(j.clone(), with(&j, a))][s];
                        let via_b = &nd.covering[&(with(&j, b), k.clone())][s] * &nd.covering[&(j.clone(), with(&j, b))][s];
                        if via_a != via_b {
                            return Err(Error::Inconsistent(format!("restrictions from {j:?} to {k:?} in degree {s} do not commute")));
                        }
                    }
                }
            }
        }
        for ((from, to), maps) in &restrictions {
            for (s, m) in maps.iter().enumerate() {
                if *m != nd.restriction(from, to, s) {
                    return Err(Error::Inconsistent(format!("restriction {from:?} -> {to:?} is not the composite of covering maps")));
                }
            }
        }
        Ok(nd)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn strata(&self) -> &BTreeMap<Face, Stratum> {
        &self.strata
    }

    pub fn dim(&self, j: &[usize], s: usize) -> usize {
        self.strata.get(j).and_then(|st| st.dims.get(s)).copied().unwrap_or(0)
    }

    pub fn weight(&self, j: &[usize], s: usize) -> i64 {
        self.strata.get(j).and_then(|st| st.weights.as_ref()).and_then(|w| w.get(s)).copied().unwrap_or(s as i64)
    }

    /// Restriction `H^s(M_J) → H^s(M_K)` for `J ⊆ K`, composed along the
    /// chain adding the elements of `K ∖ J` in increasing order.
    pub fn restriction(&self, j: &[usize], k: &[usize], s: usize) -> QMatrix {
        let mut cur = j.to_vec();
        let mut acc = QMatrix::identity(self.dim(j, s));
        for &x in k.iter().filter(|x| !j.contains(x)) {
            let next = with(&cur, x);
            acc = &self.covering[&(cur.clone(), next.clone())][s] * &acc;
            cur = next;
        }
        acc
    }

    /// Covering of `n` components whose strata all have `H^0 = ℚ`
    /// (`present` lists the nonempty intersections) and identity restrictions.
    pub fn constant(n: usize, present: &[Face]) -> Result<Self> {
        let strata: BTreeMap<Face, Stratum> =
            present.iter().map(|j| (j.clone(), Stratum { dims: vec![1], weights: None })).collect();
        let mut restrictions = BTreeMap::new();
        for j in present {
            for k in present {
                if k.len() == j.len() + 1 && j.iter().all(|x| k.contains(x)) {
                    restrictions.insert((j.clone(), k.clone()), vec![QMatrix::identity(1)]);
                }
            }
        }
        NerveDatum::new(n, strata, restrictions)
    }
}

/// Basis index of `(stratum, degree, vector)` triples in one total degree.
struct BlockIndex {
    offsets: HashMap<(Face, usize), usize>,
}

/// The Čech double complex `C^{r,s} = ⊕_{|J|=r+1} H^s(M_J)` as a filtered total
/// complex with filtration by `r` and labels given by the weights.
pub fn cech_complex(nd: &NerveDatum) -> Result<FilteredComplex> {
    let faces = nonempty_subsets(nd.components);
    let top = (nd.components - 1 + nd.max_degree.max(1) - 1) as i64;
    let mut dims = Vec::new();
    let mut levels = Vec::new();
    let mut labels = Vec::new();
    let mut index = Vec::new();
    for n in 0..=top {
        let mut offsets = HashMap::new();
        let (mut lv, mut lb) = (Vec::new(), Vec::new());
        for j in &faces {
            let r = j.len() as i64 - 1;
            let s = n - r;
            if s < 0 || s as usize >= nd.max_degree {
                continue;
            }
            let k = nd.dim(j, s as usize);
            if k == 0 {
                continue;
            }
            offsets.insert((j.clone(), s as usize), lv.len());
            lv.extend(std::iter::repeat_n(r, k));
            lb.extend(std::iter::repeat_n(nd.weight(j, s as usize), k));
        }
        dims.push(lv.len());
        levels.push(lv);
        labels.push(lb);
        index.push(BlockIndex { offsets });
    }
    let mut diffs = Vec::new();
    for n in 0..top as usize {
        let mut d = QMatrix::zeros(dims[n + 1], dims[n]);
        for ((j, s), &off) in &index[n].offsets {
            for x in (0..nd.components).filter(|x| !j.contains(x)) {
                let k = with(j, x);
                let Some(&toff) = index[n + 1].offsets.get(&(k.clone(), *s)) else { continue };
                let sign = if insert_pos(j, x) % 2 == 0 { int(1) } else { int(-1) };
                let rho = nd.restriction(j, &k, *s);
                for a in 0..rho.rows() {
                    for b in 0..rho.cols() {
                        let v: Rational = rho.get(a, b) * &sign;
                        d.set(toff + a, off + b, v);
                    }
                }
            }
        }
        diffs.push(d);
    }
    let complex = GradedComplex::new(0, dims, diffs)?;
    FilteredComplex::from_levels(complex, &levels)?.with_labels(labels)
}

/// Complex indexed by flags: degree `m + s` carries `⊕_{λ ∈ Λ_m} H^s(M_{J_m(λ)})`,
/// with differential `Σ_t (−1)^t` over the faces forgetting `J_t`.
pub fn flag_complex(nd: &NerveDatum) -> Result<GradedComplex> {
    let n = nd.components;
    let maxdeg = nd.max_degree.max(1);
    let flags: Vec<Vec<Vec<Face>>> = (0..n).map(|m| lambda_flags(n, m)).collect();
    let top = n - 1 + maxdeg - 1;
    let mut dims = Vec::new();
    let mut offsets: Vec<HashMap<(usize, usize, usize), usize>> = Vec::new();
    for total in 0..=top {
        let mut off = HashMap::new();
        let mut count = 0;
        for (m, fl) in flags.iter().enumerate() {
            if m > total || total - m >= maxdeg {
                continue;
            }
            let s = total - m;
            for (fi, f) in fl.iter().enumerate() {
                let k = nd.dim(f.last().expect("nonempty"), s);
                if k > 0 {
                    off.insert((m, fi, s), count);
                    count += k;
                }
            }
        }
        dims.push(count);
        offsets.push(off);
    }
    let positions: Vec<HashMap<&Vec<Face>, usize>> =
        flags.iter().map(|fl| fl.iter().enumerate().map(|(i, f)| (f, i)).collect()).collect();
    let mut diffs = Vec::new();
    for total in 0..top {
        let mut d = QMatrix::zeros(dims[total + 1], dims[total]);
        for m in 0..n.saturating_sub(1) {
            if m > total || total - m >= maxdeg {
                continue;
            }
            let s = total - m;
            for (ti, target) in flags[m + 1].iter().enumerate() {
                let Some(&toff) = offsets[total + 1].get(&(m + 1, ti, s)) else { continue };
                for t in 0..=m + 1 {
                    let mut face = target.clone();
                    face.remove(t);
                    let fi = positions[m][&face];
                    let Some(&soff) = offsets[total].get(&(m, fi, s)) else { continue };
                    let map = if t == m + 1 {
                        nd.restriction(&face[m], &target[m + 1], s)
                    } else {
                        QMatrix::identity(nd.dim(&target[m + 1], s))
                    };
                    let sign = if t % 2 == 0 { int(1) } else { int(-1) };
                    for a in 0..map.rows() {
                        for b in 0..map.cols() {
                            let cur = d.get(toff + a, soff + b).clone();
                            d.set(toff + a, soff + b, cur + map.get(a, b) * &sign);
                        }
                    }
                }
            }
        }
        diffs.push(d);
    }
    GradedComplex::new(0, dims, diffs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CechComparison {
    pub cech: BTreeMap<i64, usize>,
    pub flags: BTreeMap<i64, usize>,
    pub equal: bool,
}

/// Compares the cohomology of the standard Čech complex with that of the
/// flag-indexed complex.
pub fn cech_vs_total_check(nd: &NerveDatum) -> Result<CechComparison> {
    let strip = |m: BTreeMap<i64, usize>| m.into_iter().filter(|(_, k)| *k > 0).collect::<BTreeMap<_, _>>();
    let cech = strip(cech_complex(nd)?.complex().cohomology_dims());
    let flags = strip(flag_complex(nd)?.cohomology_dims());
    Ok(CechComparison { equal: cech == flags, cech, flags })
}

/// Invertible integer matrix with determinant ±1, as a product of elementary moves.
fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let mut g = QMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.random_bool(0.5) {
            g.set(0, 0, int(-1));
        }
        return g;
    }
    for _ in 0..2 * n {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a == b {
            continue;
        }
        let c = int(rng.random_range(-2..=2));
        for col in 0..n {
            let v = g.get(a, col) + g.get(b, col) * &c;
            g.set(a, col, v);
        }
    }
    g
}

/// Random consistent covering datum: in each degree, coordinate `i` of a
/// fixed space survives on `M_J` iff `J ⊆ A_i` for a random set `A_i`;
/// restrictions are coordinate projections conjugated by random changes of basis.
pub fn random_nerve<R: Rng>(rng: &mut R, components: usize, degrees: usize, max_coords: usize) -> Result<NerveDatum> {
    let faces = nonempty_subsets(components);
    let mut support: Vec<Vec<u32>> = Vec::new();
    for _ in 0..degrees {
        let k = rng.random_range(0..=max_coords);
        support.push((0..k).map(|_| rng.random_range(1u32..(1 << components))).collect());
    }
    let mask = |j: &Face| j.iter().fold(0u32, |m, &x| m | (1 << x));
    let kept = |j: &Face, s: usize| -> Vec<usize> {
        (0..support[s].len()).filter(|&i| mask(j) & !support[s][i] == 0).collect()
    };
    let mut strata = BTreeMap::new();
    let mut basis: BTreeMap<(Face, usize), (QMatrix, QMatrix)> = BTreeMap::new();
    for j in &faces {
        let dims: Vec<usize> = (0..degrees).map(|s| kept(j, s).len()).collect();
        if dims.iter().all(|&k| k == 0) {
            continue;
        }
        for (s, &k) in dims.iter().enumerate() {
            let g = random_unimodular(rng, k);
            let gi = g.inverse().expect("unimodular");
            basis.insert((j.clone(), s), (g, gi));
        }
        strata.insert(j.clone(), Stratum { dims, weights: None });
    }
    let mut restrictions = BTreeMap::new();
    for j in strata.keys() {
        for x in (0..components).filter(|x| !j.contains(x)) {
            let k = with(j, x);
            if !strata.contains_key(&k) {
                continue;
            }
            let maps = (0..degrees)
                .map(|s| {
                    let (src, dst) = (kept(j, s), kept(&k, s));
                    let mut proj = QMatrix::zeros(dst.len(), src.len());
                    for (a, i) in dst.iter().enumerate() {
                        let b = src.iter().position(|y| y == i).expect("supports shrink");
                        proj.set(a, b, int(1));
                    }
                    let (gk, _) = &basis[&(k.clone(), s)];
                    let (_, gj_inv) = &basis[&(j.clone(), s)];
                    &(gk * &proj) * gj_inv
                })
                .collect();
            restrictions.insert((j.clone(), k), maps);
        }
    }
    NerveDatum::new(components, strata, restrictions)
}
