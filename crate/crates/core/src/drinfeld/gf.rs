//! Small finite fields `F_q` by lookup tables, and row reduction over them.
//!
//! Elements are encoded as integers `0..q` whose base-`p` digits are the
//! coefficients of a polynomial in a fixed generator.

use crate::error::{Error, Result};

/// Largest field order accepted.
pub const MAX_ORDER: u32 = 256;

pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut r, mut e) = (q, 0);
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

pub fn is_prime(p: u32) -> bool {
    matches!(prime_power(p), Some((_, 1)))
}

#[derive(Clone, Debug)]
pub struct Gf {
    q: u32,
    p: u32,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn digits(x: u32, p: u32, e: u32) -> Vec<u32> {
    (0..e).scan(x, |r, _| {
        let d = *r % p;
        *r /= p;
        Some(d)
    })
    .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two polynomials over `F_p` reduced by the monic `modulus`
/// (given by its lower coefficients).
fn polymul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len();
    let mut prod = vec![0; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (e..2 * e).rev() {
        let c = prod[k];
        if c != 0 {
            prod[k] = 0;
            for (i, &m) in modulus.iter().enumerate() {
                prod[k - e + i] = (prod[k - e + i] + (p - m) * c) % p;
            }
        }
    }
    prod.truncate(e);
    prod
}

impl Gf {
    pub fn new(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::Range(format!("{q} is not a prime power")))?;
        if q > MAX_ORDER {
            return Err(Error::Range(format!("field order {q} exceeds {MAX_ORDER}")));
        }
        let qs = q as usize;
        // the first monic modulus without zero divisors is irreducible
        'modulus: for m in 0..q {
            let modulus = digits(m, p, e);
            let mut mul = vec![0u8; qs * qs];
            for a in 0..q {
                for b in 0..q {
                    let c = undigits(&polymul_mod(&digits(a, p, e), &digits(b, p, e), &modulus, p), p);
                    if c == 0 && a != 0 && b != 0 {
                        continue 'modulus;
                    }
                    mul[a as usize * qs + b as usize] = c as u8;
                }
            }
            let mut add = vec![0u8; qs * qs];
            let mut neg = vec![0u8; qs];
            for a in 0..q {
                let da = digits(a, p, e);
                neg[a as usize] = undigits(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p) as u8;
                for b in 0..q {
                    let s: Vec<u32> = da.iter().zip(digits(b, p, e)).map(|(x, y)| (x + y) % p).collect();
                    add[a as usize * qs + b as usize] = undigits(&s, p) as u8;
                }
            }
            let mut inv = vec![0u8; qs];
            for a in 1..qs {
                inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u8;
            }
            return Ok(Gf { q, p, add, mul, neg, inv });
        }
        Err(Error::CrossCheck(format!("no irreducible modulus found for order {q}")))
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u8, k: u32) -> u8 {
        (0..k).fold(1, |acc, _| self.mul(acc, a))
    }

    /// Reduced row echelon form with zero rows removed.
    pub fn rref(&self, mut rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut r = 0;
        for c in 0..cols {
            let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, piv);
            let s = self.inv(rows[r][c]);
            for x in rows[r].iter_mut() {
                *x = self.mul(*x, s);
            }
            for i in 0..rows.len() {
                let f = rows[i][c];
                if i != r && f != 0 {
                    for k in 0..cols {
                        let t = self.mul(f, rows[r][k]);
                        rows[i][k] = self.sub(rows[i][k], t);
                    }
                }
            }
            r += 1;
        }
        rows.truncate(r);
        rows
    }

    /// All vectors of `F_q^n` whose first nonzero entry is 1, in lexicographic order.
    pub fn projective_points(&self, n: usize) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for lead in 0..n {
            let free = n - lead - 1;
            let total = (self.q as usize).pow(free as u32);
            for code in 0..total {
                let mut v = vec![0u8; n];
                v[lead] = 1;
                let mut c = code;
                for k in (lead + 1..n).rev() {
                    v[k] = (c % self.q as usize) as u8;
                    c /= self.q as usize;
                }
                out.push(v);
            }
        }
        out
    }
}
