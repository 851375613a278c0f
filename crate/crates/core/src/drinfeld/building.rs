//! Vertices of the Bruhat–Tits building of `PGL_{d+1}(Q_p)` as homothety
//! classes of `Z_p`-lattices in `Q_p^{d+1}`.
//!
//! A class is stored as the Hermite normal form of its unique representative
//! `L ⊆ Z_p^{d+1}` with `L ⊄ p Z_p^{d+1}`: an upper triangular integer matrix
//! whose rows span `L`, with diagonal entries `p^{e_i}` and every entry above a
//! diagonal entry reduced modulo it.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::drinfeld::gf::{is_prime, Gf};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeClass {
    hnf: Vec<Vec<i64>>,
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let (mut r0, mut r1, mut s0, mut s1) = (a.rem_euclid(m), m, 1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(m)
}

fn valuation(mut x: i128, p: i128) -> u32 {
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

impl LatticeClass {
    /// The standard lattice `Z_p^{d+1}`.
    pub fn standard(d: usize) -> Self {
        let n = d + 1;
        LatticeClass { hnf: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect() }
    }

    /// Class of the lattice spanned by `rows`, which must have full rank and
    /// contain `p^exp Z_p^{d+1}`.
    pub fn from_generators(rows: &[Vec<i64>], p: u32, exp: u32) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Inconsistent("lattice generators must be nonempty rows of equal length".into()));
        }
        let pp = p as i128;
        let modulus = pp.checked_pow(exp).filter(|&m| m <= i64::MAX as i128).ok_or(Error::Overflow("lattice modulus"))?;
        // entries are reduced modulo p^exp, the vectors p^exp e_c lying in L
        let mut gens: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| (x as i128).rem_euclid(modulus)).collect()).collect();
        let mut hnf: Vec<Vec<i128>> = Vec::with_capacity(n);
        for c in 0..n {
            let best = gens.iter().enumerate().filter(|(_, r)| r[c] != 0).min_by_key(|(_, r)| valuation(r[c], pp)).map(|(i, _)| i);
            let mut pivot = match best {
                Some(i) if valuation(gens[i][c], pp) < exp => gens.swap_remove(i),
                _ => {
                    let mut e = vec![0; n];
                    e[c] = modulus;
                    e
                }
            };
            let v = valuation(pivot[c], pp);
            let pv = pp.pow(v);
            if pivot[c] != modulus {
                let unit = mod_inverse(pivot[c] / pv, modulus);
                for x in pivot.iter_mut() {
                    *x = (*x * unit).rem_euclid(modulus);
                }
            }
            for r in gens.iter_mut() {
                if r[c] != 0 {
                    let f = r[c] / pv;
                    for k in 0..n {
                        r[k] = (r[k] - f * pivot[k]).rem_euclid(modulus);
                    }
                }
            }
            gens.retain(|r| r.iter().any(|&x| x != 0));
            hnf.push(pivot);
        }
        for c in 0..n {
            let pc = hnf[c][c];
            for r in 0..c {
                let f = hnf[r][c].div_euclid(pc);
                if f != 0 {
                    for k in c..n {
                        hnf[r][k] -= f * hnf[c][k];
                    }
                }
            }
        }
        while hnf.iter().flatten().all(|&x| x % pp == 0) {
            for x in hnf.iter_mut().flatten() {
                *x /= pp;
            }
        }
        Ok(LatticeClass { hnf: hnf.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect() })
    }

    pub fn rank(&self) -> usize {
        self.hnf.len()
    }

    pub fn hnf(&self) -> &[Vec<i64>] {
        &self.hnf
    }

    /// Exponent `m` of the index `[Z_p^{d+1} : L] = p^m`.
    pub fn det_exponent(&self, p: u32) -> u32 {
        self.hnf.iter().enumerate().map(|(i, r)| valuation(r[i] as i128, p as i128)).sum()
    }

    fn is_standard(&self) -> bool {
        *self == LatticeClass::standard(self.rank() - 1)
    }
}

/// Row-reduced bases of all `k`-dimensional subspaces of `F_p^n`.
pub fn subspaces(f: &Gf, n: usize, k: usize) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    let q = f.order() as usize;
    for pivots in combinations(n, k) {
        let free: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &pc)| (pc + 1..n).filter(|c| !pivots.contains(c)).map(move |c| (i, c)))
            .collect();
        for code in 0..q.pow(free.len() as u32) {
            let mut rows = vec![vec![0u8; n]; k];
            for (i, &pc) in pivots.iter().enumerate() {
                rows[i][pc] = 1;
            }
            let mut c = code;
            for &(i, col) in &free {
                rows[i][col] = (c % q) as u8;
                c /= q;
            }
            out.push(rows);
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn check_prime(p: u32) -> Result<Gf> {
    if !is_prime(p) {
        return Err(Error::Range(format!("lattice enumeration needs a prime residue field size, got {p}")));
    }
    Gf::new(p)
}

/// Neighbors `L'` with `pL ⊊ L' ⊊ L`, each paired with `dim_{F_p} L'/pL`.
pub fn typed_neighbors(v: &LatticeClass, p: u32) -> Result<Vec<(LatticeClass, usize)>> {
    let f = check_prime(p)?;
    let n = v.rank();
    let exp = v.det_exponent(p) + 1;
    let pi = p as i64;
    let scaled: Vec<Vec<i64>> = v.hnf.iter().map(|r| r.iter().map(|&x| x * pi).collect()).collect();
    let mut out = Vec::new();
    for k in 1..n {
        for w in subspaces(&f, n, k) {
            let mut gens = scaled.clone();
            for row in &w {
                let mut g = vec![0i64; n];
                for (j, &c) in row.iter().enumerate() {
                    if c != 0 {
                        for (t, x) in v.hnf[j].iter().enumerate() {
                            g[t] += c as i64 * x;
                        }
                    }
                }
                gens.push(g);
            }
            out.push((LatticeClass::from_generators(&gens, p, exp)?, k));
        }
    }
    out.sort();
    Ok(out)
}

pub fn vertex_neighbors(v: &LatticeClass, p: u32) -> Result<Vec<LatticeClass>> {
    let mut out: Vec<LatticeClass> = typed_neighbors(v, p)?.into_iter().map(|(c, _)| c).collect();
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildingBall {
    pub p: u32,
    pub d: usize,
    pub center: LatticeClass,
    pub radius: usize,
    /// Sorted by representative.
    pub vertices: Vec<LatticeClass>,
    pub distances: Vec<usize>,
    /// Index pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl BuildingBall {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &LatticeClass) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn distance(&self, v: &LatticeClass) -> Option<usize> {
        self.index_of(v).map(|i| self.distances[i])
    }

    /// Vertices at distance at most `k` from the center.
    pub fn within(&self, k: usize) -> Vec<LatticeClass> {
        self.vertices.iter().zip(&self.distances).filter(|(_, &dist)| dist <= k).map(|(v, _)| v.clone()).collect()
    }

    /// Vertices at distance exactly `k`.
    pub fn sphere(&self, k: usize) -> Vec<LatticeClass> {
        self.vertices.iter().zip(&self.distances).filter(|(_, &dist)| dist == k).map(|(v, _)| v.clone()).collect()
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        (0..=self.radius).map(|k| self.distances.iter().filter(|&&d| d == k).count()).collect()
    }
}

/// Breadth-first enumeration of all classes within graph distance `n` of
/// `center`, failing once more than `budget` vertices are produced.
pub fn ball(center: &LatticeClass, n: usize, p: u32, budget: usize) -> Result<BuildingBall> {
    check_prime(p)?;
    let d = center.rank() - 1;
    let mut dist: HashMap<LatticeClass, usize> = HashMap::from([(center.clone(), 0)]);
    let mut nbrs: HashMap<LatticeClass, Vec<LatticeClass>> = HashMap::new();
    let mut queue = VecDeque::from([center.clone()]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        let list = vertex_neighbors(&v, p)?;
        if dv < n {
            for w in &list {
                if !dist.contains_key(w) {
                    dist.insert(w.clone(), dv + 1);
                    if dist.len() > budget {
                        return Err(Error::Budget(budget));
                    }
                    queue.push_back(w.clone());
                }
            }
        }
        nbrs.insert(v, list);
    }
    let mut vertices: Vec<LatticeClass> = dist.keys().cloned().collect();
    vertices.sort();
    let index: HashMap<&LatticeClass, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges = BTreeSet::new();
    for (v, list) in &nbrs {
        let i = index[v];
        for w in list {
            if let Some(&j) = index.get(w) {
                edges.insert((i.min(j), i.max(j)));
            }
        }
    }
    let distances = vertices.iter().map(|v| dist[v]).collect();
    Ok(BuildingBall { p, d, center: center.clone(), radius: n, vertices, distances, edges: edges.into_iter().collect() })
}

/// `V_n` together with the vertices at distance `n+1` adjacent to some
/// `w ∈ V_n` through a neighbor of type at most `m`, i.e. through a linear
/// subspace of projective dimension at most `m − 1`.
pub fn v_n_m(ball: &BuildingBall, n: usize, m: usize) -> Result<Vec<LatticeClass>> {
    if ball.radius < n + 1 {
        return Err(Error::Range(format!("ball of radius {} cannot resolve V_{n}^{m}", ball.radius)));
    }
    if m == 0 || m > ball.d {
        return Err(Error::Range(format!("m must lie in 1..={}", ball.d)));
    }
    let mut out: BTreeSet<LatticeClass> = ball.within(n).into_iter().collect();
    for w in ball.sphere(n) {
        for (v, k) in typed_neighbors(&w, ball.p)? {
            if k <= m && ball.distance(&v) == Some(n + 1) {
                out.insert(v);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Whether `v` is the class of the standard lattice.
pub fn is_origin(v: &LatticeClass) -> bool {
    v.is_standard()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let a = LatticeClass::from_generators(&[vec![2, 0], vec![0, 1]], 2, 2).unwrap();
        let b = LatticeClass::from_generators(&[vec![6, 4], vec![0, 3], vec![4, 4]], 2, 2).unwrap();
        assert_eq!(a, b);
        let scaled = LatticeClass::from_generators(&[vec![4, 0], vec![0, 2]], 2, 3).unwrap();
        assert_eq!(scaled, a);
        let unit = LatticeClass::from_generators(&[vec![2, 0], vec![2, 2]], 2, 2).unwrap();
        assert!(is_origin(&unit));
        assert_eq!(a.det_exponent(2), 1);
    }

    #[test]
    fn neighbor_counts() {
        assert_eq!(vertex_neighbors(&LatticeClass::standard(1), 2).unwrap().len(), 3);
        assert_eq!(vertex_neighbors(&LatticeClass::standard(1), 3).unwrap().len(), 4);
        let n = vertex_neighbors(&LatticeClass::standard(2), 2).unwrap();
        assert_eq!(n.len(), 14);
        assert_eq!(n.iter().collect::<BTreeSet<_>>().len(), 14);
    }

    #[test]
    fn tree_balls() {
        let b = ball(&LatticeClass::standard(1), 2, 2, 1000).unwrap();
        assert_eq!(b.layer_sizes(), vec![1, 3, 6]);
        assert_eq!(b.edges.len(), 9);
        let b = ball(&LatticeClass::standard(1), 2, 3, 1000).unwrap();
        assert_eq!(b.len(), 17);
        assert!(matches!(ball(&LatticeClass::standard(1), 5, 2, 10), Err(Error::Budget(10))));
    }

    #[test]
    fn partial_layers() {
        let b = ball(&LatticeClass::standard(2), 1, 2, 1000).unwrap();
        assert_eq!(v_n_m(&b, 0, 1).unwrap().len(), 8);
        assert_eq!(v_n_m(&b, 0, 2).unwrap(), b.within(1));
        assert!(v_n_m(&b, 1, 1).is_err());
    }
}
