//! Subspace and flag counts over `F_q`, stratum types of the semistable
//! model, and cohomology of rational hyperplane complements and of iterated
//! blow-ups of projective space along rational linear subspaces.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::drinfeld::gf::{prime_power, Gf};
use crate::error::{Error, Result};

/// Upper bound on the number of recursion nodes and lattice elements the
/// explicit arrangement computations may visit.
pub const ARRANGEMENT_BUDGET: usize = 1 << 22;

fn check_q(q: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::Range(format!("residue field size must be at least 2, got {q}")));
    }
    Ok(())
}

/// Number of `k`-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> Result<u128> {
    check_q(q)?;
    if k > n {
        return Err(Error::Range(format!("k = {k} exceeds n = {n}")));
    }
    // [n, k] = [n-1, k-1] + q^k [n-1, k]
    let mut row = vec![1u128];
    for m in 1..=n as usize {
        let mut next = vec![1u128; m + 1];
        for j in 1..m {
            let qj = (q as u128).checked_pow(j as u32).ok_or(Error::Overflow("gaussian binomial"))?;
            next[j] = qj.checked_mul(row[j]).and_then(|x| x.checked_add(row[j - 1])).ok_or(Error::Overflow("gaussian binomial"))?;
        }
        row = next;
    }
    Ok(row[k as usize])
}

fn chains(d: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in start..=d {
            cur.push(x);
            go(x + 1, d, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, d, len, &mut Vec::new(), &mut out);
    out
}

/// Flags of subspaces of `F_q^{d+1}` with the given strictly increasing dimensions.
pub fn flags_with_signature(d: usize, q: u64, sig: &[usize]) -> Result<u128> {
    let mut dims = vec![0];
    dims.extend_from_slice(sig);
    dims.push(d + 1);
    let mut total = 1u128;
    for w in dims.windows(2) {
        let g = gaussian_binomial(w[1] as u32, w[0] as u32, q)?;
        total = total.checked_mul(g).ok_or(Error::Overflow("flag count"))?;
    }
    Ok(total)
}

/// Number of `(i−1)`-simplices containing a fixed vertex of the building:
/// flags of length `i − 1` of nonzero proper subspaces of `F_q^{d+1}`.
pub fn simplices_through_vertex(d: usize, q: u64, i: usize) -> Result<u128> {
    check_q(q)?;
    if i == 0 || i > d + 1 {
        return Err(Error::Range(format!("i must lie in 1..={}", d + 1)));
    }
    let mut total = 0u128;
    for sig in chains(d, i - 1) {
        total = total.checked_add(flags_with_signature(d, q, &sig)?).ok_or(Error::Overflow("simplex count"))?;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplexType {
    pub flag_signature: Vec<usize>,
}

impl SimplexType {
    pub fn new(flag_signature: Vec<usize>, d: usize) -> Result<Self> {
        if !flag_signature.windows(2).all(|w| w[0] < w[1]) || flag_signature.iter().any(|&x| x == 0 || x > d) {
            return Err(Error::Range(format!("flag signature {flag_signature:?} is not strictly increasing in 1..={d}")));
        }
        Ok(SimplexType { flag_signature })
    }

    /// All signatures of simplices with `i` vertices.
    pub fn all(d: usize, i: usize) -> Vec<SimplexType> {
        if i == 0 || i > d + 1 {
            return Vec::new();
        }
        chains(d, i - 1).into_iter().map(|flag_signature| SimplexType { flag_signature }).collect()
    }
}

/// Dimensions `r` of the factors: the stratum is a product of full rational
/// blow-ups of `P^r`, one per gap of the signature.
pub fn stratum_type(sig: &SimplexType, d: usize) -> Result<Vec<usize>> {
    let sig = SimplexType::new(sig.flag_signature.clone(), d)?;
    let mut dims = vec![0];
    dims.extend(sig.flag_signature);
    dims.push(d + 1);
    Ok(dims.windows(2).map(|w| w[1] - w[0] - 1).collect())
}

/// Betti numbers indexed by cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PoincarePoly(pub Vec<u64>);

impl PoincarePoly {
    pub fn coefficients(&self) -> &[u64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn total(&self) -> u128 {
        self.0.iter().map(|&c| c as u128).sum()
    }

    fn trimmed(mut v: Vec<u64>) -> Self {
        while v.len() > 1 && v.last() == Some(&0) {
            v.pop();
        }
        PoincarePoly(v)
    }

    pub fn mul(&self, other: &PoincarePoly) -> Result<PoincarePoly> {
        let mut out = vec![0u64; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = a.checked_mul(b).and_then(|x| x.checked_add(out[i + j])).ok_or(Error::Overflow("Poincare product"))?;
            }
        }
        Ok(PoincarePoly::trimmed(out))
    }
}

fn to_u64(x: u128, what: &'static str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Overflow(what))
}

fn field(q: u64) -> Result<Gf> {
    let q32 = u32::try_from(q).map_err(|_| Error::Range(format!("field order {q} too large")))?;
    Gf::new(q32)
}

type Eqs = Vec<Vec<u8>>;

struct Gysin<'a> {
    f: &'a Gf,
    nodes: usize,
}

impl Gysin<'_> {
    fn join(&self, a: &Eqs, b: &Eqs) -> Eqs {
        self.f.rref(a.iter().chain(b).cloned().collect())
    }

    /// Poincaré polynomial of the affine space `x \ inf` minus the hyperplanes in `arr`.
    fn poincare(&mut self, inf: &Eqs, arr: &[Eqs], out: &mut Vec<u64>, shift: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > ARRANGEMENT_BUDGET {
            return Err(Error::Budget(ARRANGEMENT_BUDGET));
        }
        if out.len() <= shift {
            out.resize(shift + 1, 0);
        }
        out[shift] += 1;
        for (k, h) in arr.iter().enumerate() {
            let h_inf = self.join(h, inf);
            let mut seen = HashSet::new();
            let mut restricted = Vec::new();
            for g in &arr[..k] {
                let y = self.join(h, g);
                if y != h_inf && seen.insert(y.clone()) {
                    restricted.push(y);
                }
            }
            self.poincare(&h_inf, &restricted, out, shift + 1)?;
        }
        Ok(())
    }
}

/// Betti numbers of `P^r` minus all `F_q`-rational hyperplanes, by the split
/// Gysin (deletion–restriction) recursion on the explicit arrangement with
/// one hyperplane moved to infinity.
pub fn arrangement_poincare_gysin(r: usize, q: u64) -> Result<PoincarePoly> {
    let f = field(q)?;
    let points = f.projective_points(r + 1);
    let inf = vec![points[0].clone()];
    let arr: Vec<Eqs> = points[1..].iter().map(|h| vec![h.clone()]).collect();
    let mut g = Gysin { f: &f, nodes: 0 };
    let mut out = Vec::new();
    g.poincare(&inf, &arr, &mut out, 0)?;
    Ok(PoincarePoly::trimmed(out))
}

/// Betti numbers of the same complement from the Möbius function of the
/// intersection lattice of the central arrangement in `F_q^{r+1}`.
pub fn arrangement_poincare_mobius(r: usize, q: u64) -> Result<PoincarePoly> {
    let f = field(q)?;
    let n = r + 1;
    let hyperplanes: Vec<Eqs> = f.projective_points(n).into_iter().map(|h| vec![h]).collect();
    let mut levels: Vec<Vec<Eqs>> = vec![vec![Vec::new()]];
    for rank in 1..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for x in &levels[rank - 1] {
            for h in &hyperplanes {
                let y = f.rref(x.iter().chain(h).cloned().collect());
                if y.len() == rank && seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if levels.iter().map(Vec::len).sum::<usize>() + next.len() > ARRANGEMENT_BUDGET {
            return Err(Error::Budget(ARRANGEMENT_BUDGET));
        }
        levels.push(next);
    }
    // μ(V, X) = −Σ_{V ≤ Y < X} μ(V, Y), with Y < X meaning Y ⊋ X as subspaces
    let mut mu: Vec<Vec<i128>> = vec![vec![1]];
    for rank in 1..=n {
        let mut row = Vec::with_capacity(levels[rank].len());
        for x in &levels[rank] {
            let mut s = 0i128;
            for (lower, ys) in levels[..rank].iter().enumerate() {
                for (iy, y) in ys.iter().enumerate() {
                    if f.rref(x.iter().chain(y).cloned().collect()).len() == rank {
                        s += mu[lower][iy];
                    }
                }
            }
            row.push(-s);
        }
        mu.push(row);
    }
    // central Poincaré polynomial Σ μ(X)(−t)^{rank X}, divided by (1 + t)
    let central: Vec<i128> = mu.iter().enumerate().map(|(k, row)| row.iter().sum::<i128>() * if k % 2 == 0 { 1 } else { -1 }).collect();
    let mut quotient = vec![0i128; n];
    let mut rem = central.clone();
    for k in (1..=n).rev() {
        quotient[k - 1] = rem[k];
        rem[k - 1] -= rem[k];
        rem[k] = 0;
    }
    if rem[0] != 0 || quotient.iter().any(|&c| c < 0) {
        return Err(Error::CrossCheck(format!("central Poincare polynomial {central:?} is not divisible by 1 + t")));
    }
    Ok(PoincarePoly::trimmed(quotient.into_iter().map(|c| c as u64).collect()))
}

/// `∏_{i=1}^{r} (1 + q^i t)`.
pub fn arrangement_closed_form(r: usize, q: u64) -> Result<PoincarePoly> {
    check_q(q)?;
    let mut acc = PoincarePoly(vec![1]);
    for i in 1..=r as u32 {
        let qi = q.checked_pow(i).ok_or(Error::Overflow("closed form"))?;
        acc = acc.mul(&PoincarePoly(vec![1, qi]))?;
    }
    Ok(acc)
}

/// Betti numbers of `P^r` minus all rational hyperplanes; Frobenius acts by
/// `q^m` in degree `m`. The Gysin recursion and the Möbius computation must
/// agree, as must the point counts over `F_{q^s}` for `s = 1, 2, 3`.
pub fn rational_arrangement_poincare(r: usize, q: u64) -> Result<PoincarePoly> {
    if r == 0 {
        return Err(Error::Range("r must be at least 1".into()));
    }
    let gysin = arrangement_poincare_gysin(r, q)?;
    let mobius = arrangement_poincare_mobius(r, q)?;
    if gysin != mobius {
        return Err(Error::CrossCheck(format!("Gysin recursion gives {:?}, Mobius function gives {:?}", gysin.0, mobius.0)));
    }
    for s in 1..=3 {
        let lhs = arrangement_count_from_betti(&gysin, r, q, s);
        let rhs = BigInt::from(point_count_oracle(SpaceSpec::ArrangementComplement(r), q, s)?);
        if lhs != rhs {
            return Err(Error::CrossCheck(format!("Lefschetz count {lhs} differs from {rhs} points over F_(q^{s})")));
        }
    }
    Ok(gysin)
}

/// `Σ_m (−1)^m b_m Q^{r−m}` with `Q = q^s`.
pub fn arrangement_count_from_betti(p: &PoincarePoly, r: usize, q: u64, s: u32) -> BigInt {
    let big_q = BigInt::from(q).pow(s);
    p.0.iter()
        .enumerate()
        .map(|(m, &b)| {
            let term = BigInt::from(b) * big_q.pow((r - m) as u32);
            if m % 2 == 0 { term } else { -term }
        })
        .sum()
}

/// `Σ_k c_{2k} Q^k` with `Q = q^s`.
pub fn blowup_count_from_betti(p: &PoincarePoly, q: u64, s: u32) -> BigUint {
    let big_q = BigUint::from(q).pow(s);
    p.0.iter().enumerate().filter(|(m, _)| m % 2 == 0).map(|(m, &c)| BigUint::from(c) * big_q.pow((m / 2) as u32)).sum()
}

fn blowup_raw(r: usize, q: u64) -> Result<Vec<u64>> {
    let mut memo: Vec<Vec<u64>> = Vec::new();
    for rr in 0..=r {
        let mut c = vec![0u64; 2 * rr + 1];
        for k in 0..=rr {
            c[2 * k] = 1;
        }
        for k in 0..rr.saturating_sub(1) {
            // centers: strict transforms of the rational k-planes, each an
            // iterated blow-up of P^k, of codimension rr − k
            let count = to_u64(gaussian_binomial(rr as u32 + 1, k as u32 + 1, q)?, "blow-up centers")?;
            for (deg, &b) in memo[k].iter().enumerate() {
                for e in 1..rr - k {
                    let slot = &mut c[deg + 2 * e];
                    *slot = count.checked_mul(b).and_then(|x| x.checked_add(*slot)).ok_or(Error::Overflow("blow-up Betti numbers"))?;
                }
            }
        }
        memo.push(c);
    }
    Ok(memo.pop().unwrap())
}

/// Betti numbers of `P^r` blown up successively along the strict transforms
/// of all rational points, lines, …, `(r−2)`-planes. Checked against
/// [`point_count_oracle`] over `F_{q^s}` for `s = 1, 2, 3`.
pub fn blowup_poincare(r: usize, q: u64) -> Result<PoincarePoly> {
    check_q(q)?;
    let p = PoincarePoly(blowup_raw(r, q)?);
    for s in 1..=3 {
        let lhs = blowup_count_from_betti(&p, q, s);
        let rhs = point_count_oracle(SpaceSpec::IteratedBlowup(r), q, s)?;
        if lhs != rhs {
            return Err(Error::CrossCheck(format!("Betti numbers predict {lhs} points over F_(q^{s}), direct count gives {rhs}")));
        }
    }
    Ok(p)
}

/// Poincaré polynomial of the stratum with the given signature: the product
/// over its factors of [`blowup_poincare`].
pub fn stratum_poincare(sig: &SimplexType, d: usize, q: u64) -> Result<PoincarePoly> {
    let mut acc = PoincarePoly(vec![1]);
    for r in stratum_type(sig, d)? {
        acc = acc.mul(&blowup_poincare(r, q)?)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceSpec {
    ArrangementComplement(usize),
    IteratedBlowup(usize),
}

/// Number of `F_{q^s}`-points, counted without reference to cohomology.
///
/// A point of `P^r` avoids every rational hyperplane iff its coordinates are
/// `F_q`-linearly independent. A point of the blow-up lies over a point of
/// `P^r` whose smallest rational linear envelope has some dimension `k`; the
/// fibre is the iterated blow-up of the projectivized normal space `P^{r−k−1}`
/// (a point when `k ≥ r − 1`).
pub fn point_count_oracle(space: SpaceSpec, q: u64, s: u32) -> Result<BigUint> {
    check_q(q)?;
    if s == 0 {
        return Err(Error::Range("s must be at least 1".into()));
    }
    let big_q = BigInt::from(q).pow(s);
    let generic = |k: usize| -> BigInt { (1..=k as u32).map(|j| &big_q - BigInt::from(q).pow(j)).product() };
    let to_nat = |x: BigInt| x.to_biguint().ok_or_else(|| Error::CrossCheck("negative point count".into()));
    match space {
        SpaceSpec::ArrangementComplement(r) => to_nat(generic(r)),
        SpaceSpec::IteratedBlowup(r) => {
            // x[m + 1] holds the count for the blow-up of P^m, x[0] the empty fibre convention
            let mut x: Vec<BigInt> = vec![BigInt::one()];
            for m in 0..=r {
                let mut total = BigInt::zero();
                for k in 0..=m {
                    let planes = BigInt::from(gaussian_binomial(m as u32 + 1, k as u32 + 1, q)?);
                    total += planes * generic(k) * &x[m - k];
                }
                x.push(total);
            }
            to_nat(x.pop().unwrap())
        }
    }
}

/// Whether `q` is a prime power.
pub fn is_prime_power(q: u64) -> bool {
    u32::try_from(q).ok().and_then(prime_power).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_binomial(5, 0, 3).unwrap(), 1);
        assert_eq!(gaussian_binomial(2, 1, 2).unwrap(), 3);
        assert_eq!(gaussian_binomial(3, 1, 2).unwrap(), 7);
        assert_eq!(gaussian_binomial(4, 2, 2).unwrap(), 35);
        assert!(gaussian_binomial(2, 3, 2).is_err());
        assert!(gaussian_binomial(2, 1, 1).is_err());
    }

    #[test]
    fn simplex_counts() {
        assert_eq!(simplices_through_vertex(2, 2, 1).unwrap(), 1);
        assert_eq!(simplices_through_vertex(2, 2, 2).unwrap(), 14);
        assert_eq!(simplices_through_vertex(2, 2, 3).unwrap(), 21);
        assert!(simplices_through_vertex(2, 2, 4).is_err());
    }

    #[test]
    fn stratum_types() {
        let t = |sig: Vec<usize>| stratum_type(&SimplexType { flag_signature: sig }, 2).unwrap();
        assert_eq!(t(vec![]), vec![2]);
        assert_eq!(t(vec![1, 2]), vec![0, 0, 0]);
        assert_eq!(t(vec![1]), vec![0, 1]);
        assert!(SimplexType::new(vec![2, 1], 2).is_err());
    }

    #[test]
    fn arrangements() {
        assert_eq!(rational_arrangement_poincare(1, 2).unwrap().0, vec![1, 2]);
        assert_eq!(rational_arrangement_poincare(1, 3).unwrap().0, vec![1, 3]);
        assert_eq!(rational_arrangement_poincare(2, 2).unwrap().0, vec![1, 6, 8]);
        assert_eq!(arrangement_closed_form(2, 3).unwrap().0, vec![1, 12, 27]);
    }

    #[test]
    fn blowups() {
        assert_eq!(blowup_poincare(0, 2).unwrap().0, vec![1]);
        assert_eq!(blowup_poincare(1, 2).unwrap().0, vec![1, 0, 1]);
        assert_eq!(blowup_poincare(2, 2).unwrap().0, vec![1, 0, 8, 0, 1]);
        assert_eq!(blowup_poincare(2, 3).unwrap().0, vec![1, 0, 14, 0, 1]);
        assert!(blowup_poincare(3, 2).is_ok());
    }

    #[test]
    fn point_counts() {
        let c = |s, q, k| point_count_oracle(s, q, k).unwrap();
        assert_eq!(c(SpaceSpec::ArrangementComplement(1), 2, 1), BigUint::from(0u32));
        assert_eq!(c(SpaceSpec::ArrangementComplement(1), 2, 2), BigUint::from(2u32));
        assert_eq!(c(SpaceSpec::IteratedBlowup(2), 2, 1), BigUint::from(21u32));
        assert_eq!(c(SpaceSpec::IteratedBlowup(1), 3, 2), BigUint::from(10u32));
    }
}
