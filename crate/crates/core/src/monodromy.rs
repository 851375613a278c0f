//! Kernel, image and monodromy filtrations of a nilpotent endomorphism.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filtration::{IndexedFiltration, Orientation};
use crate::matrix::QMatrix;
use crate::subspace::{image, kernel, Subspace};

/// Kernels and images of all powers of `n` up to the point where they stabilise.
pub(crate) struct PowerSpaces {
    kers: Vec<Subspace>,
    ims: Vec<Subspace>,
}

impl PowerSpaces {
    pub(crate) fn new(n: &QMatrix) -> Self {
        let dim = n.rows();
        let mut kers = Vec::with_capacity(dim + 1);
        let mut ims = Vec::with_capacity(dim + 1);
        let mut pow = QMatrix::identity(dim);
        for _ in 0..=dim {
            kers.push(kernel(&pow));
            ims.push(image(&pow));
            pow = n * &pow;
        }
        PowerSpaces { kers, ims }
    }

    /// `ker(N^k)`; full for `k` beyond the nilpotency index.
    pub(crate) fn ker(&self, k: usize) -> &Subspace {
        &self.kers[k.min(self.kers.len() - 1)]
    }

    /// `im(N^k)` with `N^k` the identity for `k ≤ 0`.
    pub(crate) fn im(&self, k: i64) -> &Subspace {
        let k = k.max(0) as usize;
        &self.ims[k.min(self.ims.len() - 1)]
    }

    /// `Σ_{i ≥ 0} ker(N^{i+1}) ∩ im(N^{i-r})`.
    pub(crate) fn convolution(&self, r: i64) -> Subspace {
        let dim = self.kers[0].ambient_dim();
        let mut acc = Subspace::zero(dim);
        let last = self.kers.len() as i64 + r.abs() + 1;
        for i in 0..=last {
            let piece = self.ker(i as usize + 1).intersect(self.im(i - r)).expect("same ambient");
            acc = acc.sum(&piece).expect("same ambient");
        }
        acc
    }
}

fn check_nilpotent_of_order(n: &QMatrix, d: u32) -> Result<()> {
    if !n.is_square() {
        return Err(Error::NotSquare { rows: n.rows(), cols: n.cols() });
    }
    if !n.pow(d as usize + 1).is_zero() {
        return Err(Error::NilpotencyOrder { d });
    }
    Ok(())
}

/// Increasing filtration `ker_i = ker(N^{i+1})`, `i ≥ 0`.
pub fn kernel_filtration(n: &QMatrix) -> IndexedFiltration {
    let ps = PowerSpaces::new(n);
    let steps: BTreeMap<i64, Subspace> = (0..n.rows()).map(|i| (i as i64, ps.ker(i + 1).clone())).collect();
    let mut steps = steps;
    steps.entry(n.rows() as i64).or_insert_with(|| Subspace::full(n.rows()));
    IndexedFiltration::new(n.rows(), Orientation::Increasing, steps).expect("kernels are nested")
}

/// Decreasing filtration `im_j = im(N^j)`, `j ≥ 0`.
pub fn image_filtration(n: &QMatrix) -> IndexedFiltration {
    let ps = PowerSpaces::new(n);
    let steps: BTreeMap<i64, Subspace> = (0..=n.rows()).map(|j| (j as i64, ps.im(j as i64).clone())).collect();
    IndexedFiltration::new(n.rows(), Orientation::Decreasing, steps).expect("images are nested")
}

/// `M_r = Σ_i ker(N^{i+1}) ∩ im(N^{i-r})`, requiring `N^{d+1} = 0`.
pub fn monodromy_filtration(n: &QMatrix, d: u32) -> Result<IndexedFiltration> {
    check_nilpotent_of_order(n, d)?;
    let ps = PowerSpaces::new(n);
    let d = d as i64;
    let steps: BTreeMap<i64, Subspace> = (-d - 1..=d).map(|r| (r, ps.convolution(r))).collect();
    IndexedFiltration::new(n.rows(), Orientation::Increasing, steps)
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelImageStep {
    pub j: u32,
    /// `dim Σ_i ker(N^{i+1}) ∩ im(N^{i-d+2j})`
    pub dim_even: usize,
    /// `dim Σ_i ker(N^{i+1}) ∩ im(N^{i-d+2j-1})`
    pub dim_odd: usize,
    pub dim_ker: usize,
    pub dim_im: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelImageReport {
    pub d: u32,
    /// The two convolution sums agree for every `j`.
    pub sums_agree: bool,
    /// `ker(N) = F^d`.
    pub kernel_is_top: bool,
    /// `ker(N^{d+1-j}) = im(N^j) = F^j` for all `j`; only evaluated when both
    /// hypotheses hold.
    pub conclusion: Option<bool>,
    pub steps: Vec<KernelImageStep>,
}

/// Evaluates the hypotheses of the kernel/image criterion for `N` and, when they
/// hold, verifies `ker(N^{d+1-j}) = im(N^j) = F^j` for `0 ≤ j ≤ d+1`.
///
/// A failure of the conclusion under the hypotheses is reported as a
/// cross-check error.
pub fn kernel_image_check(n: &QMatrix, d: u32) -> Result<KernelImageReport> {
    check_nilpotent_of_order(n, d)?;
    let ps = PowerSpaces::new(n);
    let di = d as i64;
    let mut steps = Vec::new();
    let mut agree = true;
    let mut fs = Vec::new();
    for j in 0..=di + 1 {
        let even = ps.convolution(di - 2 * j);
        let odd = ps.convolution(di - 2 * j + 1);
        agree &= even == odd;
        let ker = ps.ker((di + 1 - j) as usize).clone();
        let im = ps.im(j).clone();
        steps.push(KernelImageStep { j: j as u32, dim_even: even.dim(), dim_odd: odd.dim(), dim_ker: ker.dim(), dim_im: im.dim() });
        fs.push((even, ker, im));
    }
    let kernel_is_top = ps.ker(1) == &fs[d as usize].0;
    let conclusion = (agree && kernel_is_top).then(|| fs.iter().all(|(f, k, i)| f == k && k == i));
    if conclusion == Some(false) {
        return Err(Error::CrossCheck("kernel/image conclusion fails under its hypotheses".into()));
    }
    Ok(KernelImageReport { d, sums_agree: agree, kernel_is_top, conclusion, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    /// Nilpotent matrix with Jordan blocks of the given sizes; `N e_{k+1} = e_k` inside a block.
    fn jordan(blocks: &[usize]) -> QMatrix {
        let n: usize = blocks.iter().sum();
        let mut m = QMatrix::zeros(n, n);
        let mut start = 0;
        for &b in blocks {
            for k in 1..b {
                m.set(start + k - 1, start + k, int(1));
            }
            start += b;
        }
        m
    }

    fn dims(f: &IndexedFiltration, lo: i64, hi: i64) -> Vec<usize> {
        (lo..=hi).map(|i| f.step(i).dim()).collect()
    }

    #[test]
    fn kernel_and_image_filtrations() {
        let zero = QMatrix::zeros(2, 2);
        assert!(kernel_filtration(&zero).step(0).is_full());
        assert!(image_filtration(&zero).step(1).is_zero());
        let j3 = jordan(&[3]);
        assert_eq!(dims(&kernel_filtration(&j3), 0, 2), vec![1, 2, 3]);
        assert_eq!(dims(&image_filtration(&j3), 0, 2), vec![3, 2, 1]);
        let j21 = jordan(&[2, 1]);
        assert_eq!(dims(&kernel_filtration(&j21), 0, 1), vec![2, 3]);
        assert_eq!(dims(&image_filtration(&j21), 0, 2), vec![3, 1, 0]);
    }

    #[test]
    fn monodromy_examples() {
        let m = monodromy_filtration(&QMatrix::zeros(3, 3), 2).unwrap();
        assert_eq!(dims(&m, -3, 2), vec![0, 0, 0, 3, 3, 3]);
        let m = monodromy_filtration(&jordan(&[3]), 2).unwrap();
        assert_eq!(m.jumps(), vec![-2, 0, 2]);
        let m = monodromy_filtration(&jordan(&[2, 1]), 1).unwrap();
        assert_eq!(m.graded_dims().0, BTreeMap::from([(-1, 1), (0, 1), (1, 1)]));
        assert_eq!(monodromy_filtration(&jordan(&[3]), 1), Err(Error::NilpotencyOrder { d: 1 }));
    }

    #[test]
    fn kernel_image_examples() {
        let r = kernel_image_check(&jordan(&[4]), 3).unwrap();
        assert!(r.sums_agree && r.kernel_is_top);
        assert_eq!(r.conclusion, Some(true));
        let r = kernel_image_check(&QMatrix::zeros(1, 1), 0).unwrap();
        assert_eq!(r.conclusion, Some(true));
        let r = kernel_image_check(&jordan(&[2, 1]), 1).unwrap();
        assert!(!r.kernel_is_top);
        assert_eq!(r.conclusion, None);
    }
}
