//! Univariate polynomials over ℚ: characteristic polynomials, Newton polygons
//! and factorisation into irreducibles.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::rational::{big, int, valuation, QStr, Rational};

/// Coefficients lowest degree first; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial { coeffs: vec![Rational::one()] }
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `x - r`
    pub fn linear(r: Rational) -> Self {
        Polynomial { coeffs: vec![-r, Rational::one()] }
    }

    pub fn from_roots(roots: &[Rational]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| &acc * &Self::linear(r.clone()))
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        Polynomial::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.rows();
        let mut acc = QMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &QMatrix::identity(n).scale(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lc = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Polynomial::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow(&self, k: usize) -> Polynomial {
        (0..k).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    /// Primitive integer polynomial with positive leading coefficient, same roots.
    fn primitive_integer(&self) -> Vec<BigInt> {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * big(&lcm)).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if self.leading().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }
}

impl<'a> std::ops::Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl<'a> std::ops::Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `det(xI - m)` by the Faddeev–LeVerrier recursion.
pub fn char_poly(m: &QMatrix) -> Result<Polynomial> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = QMatrix::zeros(n, n);
    for k in 1..=n {
        mk = &(m * &mk) + &QMatrix::identity(n).scale(&coeffs[n - k + 1]);
        let am = m * &mk;
        coeffs[n - k] = -am.trace() / int(k as i64);
    }
    Ok(Polynomial::new(coeffs))
}

/// Slopes are valuations of the roots in units where `v(q) = 1`, `q = p^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<(Rational, usize)>,
}

impl NewtonPolygon {
    pub fn total_length(&self) -> usize {
        self.segments.iter().map(|(_, l)| l).sum()
    }

    /// Single slope of the polygon, if there is exactly one.
    pub fn pure_slope(&self) -> Option<Rational> {
        match self.segments.as_slice() {
            [(s, _)] => Some(s.clone()),
            _ => None,
        }
    }

    pub fn to_map(&self) -> BTreeMap<Rational, usize> {
        self.segments.iter().cloned().collect()
    }
}

impl Serialize for NewtonPolygon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Seg {
            slope: QStr,
            length: usize,
        }
        let segs: Vec<Seg> =
            self.segments.iter().map(|(sl, l)| Seg { slope: QStr(sl.clone()), length: *l }).collect();
        segs.serialize(s)
    }
}

pub fn newton_polygon(poly: &Polynomial, p: u64, a: u32) -> Result<NewtonPolygon> {
    if poly.is_zero() {
        return Err(Error::Range("Newton polygon of the zero polynomial".into()));
    }
    if poly.coeff(0).is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let pts: Vec<(i64, i64)> = poly
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, valuation(c, p)))
        .collect();
    // lower convex hull, monotone chain
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (o, a1) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a1.0 - o.0) as i128 * (pt.1 - o.1) as i128 - (a1.1 - o.1) as i128 * (pt.0 - o.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut segments: Vec<(Rational, usize)> = hull
        .windows(2)
        .map(|w| {
            let len = (w[1].0 - w[0].0) as usize;
            let slope = -Rational::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(len as i64 * a as i64));
            (slope, len)
        })
        .collect();
    segments.reverse();
    Ok(NewtonPolygon { segments })
}

/// Square-free decomposition `f = c * prod a_i^i` (Yun), monic non-constant parts.
pub fn squarefree_decomposition(f: &Polynomial) -> Vec<(Polynomial, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = f.monic();
    let fd = f.derivative();
    let a0 = f.gcd(&fd);
    let mut b = f.div_rem(&a0).0;
    let c = fd.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let nb = b.div_rem(&a).0;
        let nc = d.div_rem(&a).0;
        d = &nc - &nb.derivative();
        b = nb;
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.monic(), i));
        }
        i += 1;
    }
    out
}

/// Factorisation over ℚ into monic irreducibles with multiplicities, sorted.
pub fn factor(f: &Polynomial) -> Result<Vec<(Polynomial, usize)>> {
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(f) {
        for g in factor_squarefree(&part)? {
            out.push((g, mult));
        }
    }
    out.sort();
    Ok(out)
}

fn factor_squarefree(f: &Polynomial) -> Result<Vec<Polynomial>> {
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return Ok(vec![f.monic()]);
    }
    for k in 1..=n / 2 {
        if let Some(h) = kronecker_factor(f, k)? {
            let rest = f.div_rem(&h).0;
            let mut out = factor_squarefree(&h)?;
            out.extend(factor_squarefree(&rest)?);
            return Ok(out);
        }
    }
    Ok(vec![f.monic()])
}

fn small_int(n: &BigInt) -> Result<u64> {
    n.abs().to_u64().ok_or_else(|| Error::Range("polynomial values too large to factor".into()))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Lagrange interpolation through integer nodes.
fn interpolate(xs: &[i64], ys: &[i64]) -> Polynomial {
    let mut acc = Polynomial::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut term = Polynomial::one().scale(&int(yi));
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                term = &term * &Polynomial::linear(int(xj));
                term = term.scale(&(Rational::one() / int(xi - xj)));
            }
        }
        acc = Polynomial::new((0..acc.coeffs.len().max(term.coeffs.len())).map(|t| acc.coeff(t) + term.coeff(t)).collect());
    }
    acc
}

/// Searches for a factor of degree `k` of the square-free `f` (Kronecker's method).
fn kronecker_factor(f: &Polynomial, k: usize) -> Result<Option<Polynomial>> {
    let g = Polynomial::new(f.primitive_integer().iter().map(big).collect());
    let mut nodes: Vec<(i64, u64)> = Vec::new();
    for t in 0..(4 * k as i64 + 12) {
        let x = if t % 2 == 0 { t / 2 } else { -(t + 1) / 2 };
        let val = g.eval(&int(x)).to_integer();
        if val.is_zero() {
            return Ok(Some(Polynomial::linear(int(x))));
        }
        if let Ok(v) = small_int(&val) {
            nodes.push((x, v));
        }
    }
    if nodes.len() < k + 1 {
        return Err(Error::Range("polynomial values too large to factor".into()));
    }
    nodes.sort_by_key(|&(x, v)| (divisors(v).len(), x.abs(), x));
    nodes.truncate(k + 1);
    let xs: Vec<i64> = nodes.iter().map(|n| n.0).collect();
    let divs: Vec<Vec<i64>> = nodes
        .iter()
        .enumerate()
        .map(|(i, &(_, v))| {
            let pos = divisors(v).into_iter().map(|d| d as i64);
            if i == 0 {
                pos.collect()
            } else {
                pos.flat_map(|d| [d, -d]).collect()
            }
        })
        .collect();
    let mut idx = vec![0usize; k + 1];
    loop {
        let ys: Vec<i64> = idx.iter().zip(&divs).map(|(&i, d)| d[i]).collect();
        let h = interpolate(&xs, &ys);
        if h.degree() == Some(k) {
            let (_, r) = g.div_rem(&h);
            if r.is_zero() {
                return Ok(Some(h.monic()));
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(None);
            }
            idx[pos] += 1;
            if idx[pos] < divs[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&QMatrix::identity(2)).unwrap(), Polynomial::from_i64(&[1, -2, 1]));
        let q = 5;
        let d = QMatrix::from_i64(&[&[1, 0], &[0, q]]);
        assert_eq!(char_poly(&d).unwrap(), Polynomial::from_roots(&[int(1), int(q)]));
        // companion of x^2 - 3x + 2
        let c = QMatrix::from_i64(&[&[0, -2], &[1, 3]]);
        assert_eq!(char_poly(&c).unwrap(), Polynomial::from_i64(&[2, -3, 1]));
        assert!(char_poly(&QMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn newton_polygon_examples() {
        let f = Polynomial::from_roots(&[int(1), int(2)]);
        assert_eq!(newton_polygon(&f, 2, 1).unwrap().segments, vec![(int(0), 1), (int(1), 1)]);
        let u = Polynomial::from_roots(&vec![int(1); 4]);
        assert_eq!(newton_polygon(&u, 3, 1).unwrap().segments, vec![(int(0), 4)]);
        let g = Polynomial::from_roots(&[int(9), int(3)]);
        assert_eq!(newton_polygon(&g, 3, 1).unwrap().segments, vec![(int(1), 1), (int(2), 1)]);
        // x^2 - 2 has slope 1/2
        let h = Polynomial::from_i64(&[-2, 0, 1]);
        assert_eq!(newton_polygon(&h, 2, 1).unwrap().segments, vec![(frac(1, 2), 2)]);
        // q = 4: valuations halve
        assert_eq!(newton_polygon(&f, 2, 2).unwrap().segments, vec![(int(0), 1), (frac(1, 2), 1)]);
        assert_eq!(newton_polygon(&Polynomial::x(), 2, 1), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn factorisation() {
        let f = &Polynomial::from_roots(&[int(1), int(1), int(3)]) * &Polynomial::from_i64(&[-2, 0, 1]);
        let fs = factor(&f).unwrap();
        assert_eq!(fs.len(), 3);
        assert!(fs.contains(&(Polynomial::linear(int(1)), 2)));
        assert!(fs.contains(&(Polynomial::linear(int(3)), 1)));
        assert!(fs.contains(&(Polynomial::from_i64(&[-2, 0, 1]), 1)));
        // (x^2+1)(x^2+x+2) has no rational roots but splits into quadratics
        let g = &Polynomial::from_i64(&[1, 0, 1]) * &Polynomial::from_i64(&[2, 1, 1]);
        let gs = factor(&g).unwrap();
        assert_eq!(gs.len(), 2);
        assert!(gs.iter().all(|(p, m)| p.degree() == Some(2) && *m == 1));
        // rational root 1/2
        let r = Polynomial::from_i64(&[-1, 2]);
        assert_eq!(factor(&r).unwrap(), vec![(Polynomial::linear(frac(1, 2)), 1)]);
    }
}
