//! The weight double complex of a strictly semistable degeneration, built
//! from the cohomology of the strata of the special fibre, and its
//! monodromy operator.
//!
//! With `Y^{(m)}` the disjoint union of the `m`-fold intersections, the
//! double complex is `A^{ij} = ⊕_{m ≥ j+1} H^{i+j+1-m}(Y^{(m)})` for
//! `i, j ≥ 0`. The horizontal differential is `(−1)^j` times the alternating
//! Gysin map, the vertical one the alternating restriction map; the summand
//! indexed by `(j, m)` sits in weight level `k = m − 2j − 1`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{IndexedFiltration, Orientation};
use crate::matrix::QMatrix;
use crate::monodromy::monodromy_filtration;
use crate::rational::int;
use crate::spectral::cech::{insert_pos, nonempty_subsets, Face};
use crate::spectral::complex::{FilteredComplex, GradedComplex};

/// Strata cohomology with restriction maps `H^s(M_J) → H^s(M_{J∪x})` and
/// Gysin maps `H^s(M_{J∪x}) → H^{s+2}(M_J)`.
#[derive(Clone, Debug)]
pub struct SteenbrinkDatum {
    components: usize,
    strata: BTreeMap<Face, Vec<usize>>,
    restrictions: BTreeMap<(Face, Face), Vec<QMatrix>>,
    gysins: BTreeMap<(Face, Face), Vec<QMatrix>>,
}

fn without(j: &[usize], t: usize) -> Face {
    let mut k = j.to_vec();
    k.remove(t);
    k
}

impl SteenbrinkDatum {
    /// `restrictions` are keyed `(J, J ∪ x)`, `gysins` `(J ∪ x, J)`, each with
    /// one matrix per source degree. Maps between nonzero spaces must be given.
    pub fn new(
        components: usize,
        strata: BTreeMap<Face, Vec<usize>>,
        restrictions: BTreeMap<(Face, Face), Vec<QMatrix>>,
        gysins: BTreeMap<(Face, Face), Vec<QMatrix>>,
    ) -> Result<Self> {
        if components == 0 {
            return Err(Error::Range("at least one component is required".into()));
        }
        for j in strata.keys() {
            if j.is_empty() || !j.windows(2).all(|w| w[0] < w[1]) || j.iter().any(|&x| x >= components) {
                return Err(Error::Inconsistent(format!("invalid stratum index set {j:?}")));
            }
        }
        let max_degree = strata.values().map(Vec::len).max().unwrap_or(0);
        let sd = SteenbrinkDatum { components, strata, restrictions, gysins };
        for (from, to) in sd.restrictions.keys().chain(sd.gysins.keys()) {
            let (small, big) = if from.len() < to.len() { (from, to) } else { (to, from) };
            if big.len() != small.len() + 1 || !small.iter().all(|x| big.contains(x)) {
                return Err(Error::Inconsistent(format!("map {from:?} -> {to:?} is not between adjacent strata")));
            }
        }
        for ((from, to), maps) in &sd.restrictions {
            for (s, m) in maps.iter().enumerate() {
                if m.rows() != sd.dim(to, s) || m.cols() != sd.dim(from, s) {
                    return Err(Error::Inconsistent(format!("restriction {from:?} -> {to:?} in degree {s} has wrong shape")));
                }
            }
        }
        for ((from, to), maps) in &sd.gysins {
            for (s, m) in maps.iter().enumerate() {
                if m.rows() != sd.dim(to, s + 2) || m.cols() != sd.dim(from, s) {
                    return Err(Error::Inconsistent(format!("Gysin map {from:?} -> {to:?} in degree {s} has wrong shape")));
                }
            }
        }
        for j in nonempty_subsets(components) {
            for x in (0..components).filter(|x| !j.contains(x)) {
                let mut k = j.clone();
                k.insert(insert_pos(&j, x), x);
                for s in 0..max_degree {
                    sd.restriction(&j, &k, s)?;
                    sd.gysin(&k, &j, s)?;
                }
            }
        }
        Ok(sd)
    }

    /// A cycle of `n ≥ 2` projective lines, each meeting its two neighbours in
    /// one point (for `n = 2` the two lines meet in two points).
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Range("a cycle needs at least two components".into()));
        }
        let mut strata = BTreeMap::new();
        let mut res = BTreeMap::new();
        let mut gys = BTreeMap::new();
        for i in 0..n {
            strata.insert(vec![i], vec![1, 0, 1]);
        }
        if n == 2 {
            strata.insert(vec![0, 1], vec![2]);
            for i in 0..2 {
                res.insert((vec![i], vec![0, 1]), vec![QMatrix::from_i64(&[&[1], &[1]])]);
                gys.insert((vec![0, 1], vec![i]), vec![QMatrix::from_i64(&[&[1, 1]])]);
            }
        } else {
            for i in 0..n {
                let mut e = vec![i, (i + 1) % n];
                e.sort();
                strata.insert(e.clone(), vec![1]);
                for &c in &e {
                    res.insert((vec![c], e.clone()), vec![QMatrix::identity(1)]);
                    gys.insert((e.clone(), vec![c]), vec![QMatrix::identity(1)]);
                }
            }
        }
        SteenbrinkDatum::new(n, strata, res, gys)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn strata(&self) -> &BTreeMap<Face, Vec<usize>> {
        &self.strata
    }

    pub fn dim(&self, j: &[usize], s: usize) -> usize {
        self.strata.get(j).and_then(|d| d.get(s)).copied().unwrap_or(0)
    }

    /// Largest `m` with a nonzero `m`-fold intersection.
    pub fn depth(&self) -> usize {
        self.strata.iter().filter(|(_, d)| d.iter().any(|&k| k > 0)).map(|(j, _)| j.len()).max().unwrap_or(0)
    }

    fn lookup(&self, map: &BTreeMap<(Face, Face), Vec<QMatrix>>, from: &[usize], to: &[usize], s: usize, t: usize, kind: &str) -> Result<QMatrix> {
        let (rows, cols) = (self.dim(to, t), self.dim(from, s));
        match map.get(&(from.to_vec(), to.to_vec())).and_then(|v| v.get(s)) {
            Some(m) => Ok(m.clone()),
            None if rows == 0 || cols == 0 => Ok(QMatrix::zeros(rows, cols)),
            None => Err(Error::Inconsistent(format!("missing {kind} map {from:?} -> {to:?} in degree {s}"))),
        }
    }

    pub fn restriction(&self, j: &[usize], k: &[usize], s: usize) -> Result<QMatrix> {
        self.lookup(&self.restrictions, j, k, s, s, "restriction")
    }

    pub fn gysin(&self, k: &[usize], j: &[usize], s: usize) -> Result<QMatrix> {
        self.lookup(&self.gysins, k, j, s, s + 2, "Gysin")
    }
}

/// Basis bookkeeping for the total complex: `(j, J, s)` blocks per total degree.
struct Layout {
    offsets: Vec<HashMap<(usize, Face, usize), usize>>,
    dims: Vec<usize>,
    levels: Vec<Vec<i64>>,
}

fn layout(sd: &SteenbrinkDatum) -> Layout {
    let faces = nonempty_subsets(sd.components);
    let top = sd
        .strata
        .iter()
        .flat_map(|(j, d)| d.iter().enumerate().filter(|(_, &k)| k > 0).map(move |(s, _)| s + j.len() - 1))
        .max()
        .unwrap_or(0);
    let mut offsets = Vec::new();
    let mut dims = Vec::new();
    let mut levels = Vec::new();
    for n in 0..=top {
        let mut off = HashMap::new();
        let mut lv = Vec::new();
        for j in 0..=n {
            for face in &faces {
                let m = face.len();
                if m < j + 1 || n + 1 < m {
                    continue;
                }
                let s = n + 1 - m;
                let k = sd.dim(face, s);
                if k == 0 {
                    continue;
                }
                off.insert((j, face.clone(), s), lv.len());
                let level = 2 * j as i64 + 1 - m as i64;
                lv.extend(std::iter::repeat_n(level, k));
            }
        }
        dims.push(lv.len());
        offsets.push(off);
        levels.push(lv);
    }
    Layout { offsets, dims, levels }
}

fn add_block(target: &mut QMatrix, row: usize, col: usize, block: &QMatrix, sign: i64) {
    let sign = int(sign);
    for a in 0..block.rows() {
        for b in 0..block.cols() {
            let v = target.get(row + a, col + b) + block.get(a, b) * &sign;
            target.set(row + a, col + b, v);
        }
    }
}

/// Total complex of the double complex with the weight filtration
/// `F^p = ⊕_{2j+1−m ≥ p}`, so that `P_k = F^{−k}`.
pub fn steenbrink_double_complex(sd: &SteenbrinkDatum) -> Result<FilteredComplex> {
    let lay = layout(sd);
    let mut diffs = Vec::new();
    for n in 0..lay.dims.len().saturating_sub(1) {
        let mut d = QMatrix::zeros(lay.dims[n + 1], lay.dims[n]);
        for ((j, face, s), &off) in &lay.offsets[n] {
            let (j, s, m) = (*j, *s, face.len());
            // (−1)^j Gysin into A^{i+1, j}
            if m >= j + 2 {
                for t in 0..m {
                    let smaller = without(face, t);
                    if let Some(&toff) = lay.offsets[n + 1].get(&(j, smaller.clone(), s + 2)) {
                        let g = sd.gysin(face, &smaller, s)?;
                        let sign = if (j + t) % 2 == 0 { 1 } else { -1 };
                        add_block(&mut d, toff, off, &g, sign);
                    }
                }
            }
            // restriction into A^{i, j+1}
            for x in (0..sd.components).filter(|x| !face.contains(x)) {
                let pos = insert_pos(face, x);
                let mut bigger = face.clone();
                bigger.insert(pos, x);
                if let Some(&toff) = lay.offsets[n + 1].get(&(j + 1, bigger.clone(), s)) {
                    let r = sd.restriction(face, &bigger, s)?;
                    add_block(&mut d, toff, off, &r, if pos % 2 == 0 { 1 } else { -1 });
                }
            }
        }
        diffs.push(d);
    }
    let complex = GradedComplex::new(0, lay.dims.clone(), diffs)?;
    FilteredComplex::from_levels(complex, &lay.levels)
}

/// The chain map `A^{ij} → A^{i−1,j+1}`, identity (times `(−1)^i`) on the
/// summands present in both, zero elsewhere; one matrix per total degree.
fn shift_map(sd: &SteenbrinkDatum) -> Vec<QMatrix> {
    let lay = layout(sd);
    (0..lay.dims.len())
        .map(|n| {
            let mut nu = QMatrix::zeros(lay.dims[n], lay.dims[n]);
            for ((j, face, s), &off) in &lay.offsets[n] {
                let (j, m) = (*j, face.len());
                if m < j + 2 {
                    continue;
                }
                if let Some(&toff) = lay.offsets[n].get(&(j + 1, face.clone(), *s)) {
                    let i = n - j;
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    add_block(&mut nu, toff, off, &QMatrix::identity(sd.dim(face, *s)), sign);
                }
            }
            nu
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SteenbrinkDegree {
    pub degree: i64,
    pub dim: usize,
    /// Increasing filtration `P_k` on `H^n`; `gr_k` has weight `n + k`.
    pub weight: IndexedFiltration,
    /// Monodromy on `H^n` in the basis of the cohomology representatives.
    pub monodromy: Vec<Vec<String>>,
    pub monodromy_rank: usize,
    /// Smallest `e` with `N^e = 0`.
    pub nilpotency: usize,
    /// `N(P_k) ⊆ P_{k−2}` for all `k`.
    pub lowers_weight: bool,
    /// Monodromy filtration of `N` equals `P`.
    pub monodromy_is_weight: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteenbrinkReport {
    pub depth: usize,
    pub degrees: Vec<SteenbrinkDegree>,
}

impl SteenbrinkReport {
    pub fn degree(&self, n: i64) -> Option<&SteenbrinkDegree> {
        self.degrees.iter().find(|d| d.degree == n)
    }
}

/// Cohomology of the total complex with its weight filtration and the
/// monodromy operator induced by the index shift.
pub fn monodromy_endomorphism(sd: &SteenbrinkDatum) -> Result<SteenbrinkReport> {
    let fc = steenbrink_double_complex(sd)?;
    let cx = fc.complex();
    let nus = shift_map(sd);
    for n in cx.degrees() {
        let k = (n - cx.lo()) as usize;
        if k + 1 < nus.len() {
            let d = cx.diff(n);
            if &d * &nus[k] != &nus[k + 1] * &d {
                return Err(Error::CrossCheck(format!("index shift is not a chain map in degree {n}")));
            }
        }
    }
    let mut degrees = Vec::new();
    for n in cx.degrees() {
        let h = cx.cohomology(n);
        let nu = &nus[(n - cx.lo()) as usize];
        let mat = h.induced(nu, &h)?;
        let dec = fc.abutment_filtration(n)?;
        let (lo, hi) = fc.level_range();
        let steps: BTreeMap<i64, _> = (lo..=hi).map(|p| (-p, dec.step(p))).collect();
        let weight = IndexedFiltration::new(h.dim(), Orientation::Increasing, steps)?;
        let mut lowers = true;
        for k in -hi..=-lo {
            lowers &= weight.step(k).image_under(&mat)?.is_subspace_of(&weight.step(k - 2));
        }
        let mut nilpotency = 0;
        let mut pow = QMatrix::identity(h.dim());
        while !pow.is_zero() {
            pow = &mat * &pow;
            nilpotency += 1;
            if nilpotency > h.dim() {
                return Err(Error::CrossCheck("monodromy on cohomology is not nilpotent".into()));
            }
        }
        let m = monodromy_filtration(&mat, h.dim() as u32)?;
        degrees.push(SteenbrinkDegree {
            degree: n,
            dim: h.dim(),
            monodromy_rank: mat.rank(),
            monodromy: (0..mat.rows()).map(|i| mat.row(i).iter().map(|x| x.to_string()).collect()).collect(),
            nilpotency,
            lowers_weight: lowers,
            monodromy_is_weight: m == weight,
            weight,
        });
    }
    Ok(SteenbrinkReport { depth: sd.depth(), degrees })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_component() {
        let sd = SteenbrinkDatum::new(1, BTreeMap::from([(vec![0], vec![1, 0, 1])]), BTreeMap::new(), BTreeMap::new()).unwrap();
        let fc = steenbrink_double_complex(&sd).unwrap();
        let e1 = fc.e_page(1).unwrap();
        assert!(e1.entries.keys().all(|&(p, _)| p == 0));
        assert_eq!(e1.entries, BTreeMap::from([((0, 0), 1), ((0, 2), 1)]));
        let r = monodromy_endomorphism(&sd).unwrap();
        assert!(r.degrees.iter().all(|d| d.monodromy_rank == 0));
    }

    #[test]
    fn two_lines_in_one_point() {
        let strata = BTreeMap::from([(vec![0], vec![1, 0, 1]), (vec![1], vec![1, 0, 1]), (vec![0, 1], vec![1])]);
        let res = BTreeMap::from([
            ((vec![0], vec![0, 1]), vec![QMatrix::identity(1)]),
            ((vec![1], vec![0, 1]), vec![QMatrix::identity(1)]),
        ]);
        let gys = BTreeMap::from([
            ((vec![0, 1], vec![0]), vec![QMatrix::identity(1)]),
            ((vec![0, 1], vec![1]), vec![QMatrix::identity(1)]),
        ]);
        let sd = SteenbrinkDatum::new(2, strata, res, gys).unwrap();
        let fc = steenbrink_double_complex(&sd).unwrap();
        assert_eq!(fc.complex().cohomology_dims(), BTreeMap::from([(0, 1), (1, 0), (2, 1)]));
    }

    #[test]
    fn cycles() {
        for n in 2..=4 {
            let r = monodromy_endomorphism(&SteenbrinkDatum::cycle(n).unwrap()).unwrap();
            let h1 = r.degree(1).unwrap();
            assert_eq!(h1.dim, 2);
            assert_eq!(h1.weight.graded_dims().0, BTreeMap::from([(-1, 1), (1, 1)]));
            assert_eq!(h1.monodromy_rank, 1);
            assert_eq!(h1.nilpotency, 2);
            assert!(h1.monodromy_is_weight && h1.lowers_weight);
        }
    }

    #[test]
    fn disjoint_strata_have_no_monodromy() {
        let strata = BTreeMap::from([(vec![0], vec![1, 0, 1]), (vec![1], vec![1, 0, 1])]);
        let sd = SteenbrinkDatum::new(2, strata, BTreeMap::new(), BTreeMap::new()).unwrap();
        let r = monodromy_endomorphism(&sd).unwrap();
        assert!(r.degrees.iter().all(|d| d.monodromy_rank == 0));
    }
}
