use std::collections::BTreeMap;

use phin_core::drinfeld::{gaussian_binomial, LatticeClass};
use phin_core::monodromy::monodromy_filtration;
use phin_core::rational::int;
use phin_core::spectral::cech::{cech_complex, random_nerve};
use phin_core::spectral::{FilteredComplex, GradedComplex};
use phin_core::{char_poly, kernel, newton_polygon, Polynomial, QMatrix, Subspace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
        QMatrix::from_rows(v.chunks(cols.max(1)).take(rows).map(|r| r.iter().map(|&x| int(x)).collect()).collect(), cols).unwrap()
    })
}

fn sized_matrix() -> impl Strategy<Value = QMatrix> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| matrix(r, c))
}

fn subspace(n: usize) -> impl Strategy<Value = Subspace> {
    (0usize..=n).prop_flat_map(move |k| matrix(k.max(1), n).prop_map(move |m| if k == 0 { Subspace::zero(n) } else { Subspace::row_space(&m) }))
}

/// Nilpotent matrix with Jordan blocks of the given sizes (`N e_{k+1} = e_k`).
fn jordan(blocks: &[usize]) -> QMatrix {
    let n: usize = blocks.iter().sum();
    let mut m = QMatrix::zeros(n, n);
    let mut off = 0;
    for &b in blocks {
        for k in 0..b.saturating_sub(1) {
            m.set(off + k, off + k + 1, int(1));
        }
        off += b;
    }
    m
}

/// Upper unitriangular times lower unitriangular: invertible over ℤ.
fn unimodular(n: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-2i64..=2, n * n).prop_map(move |v| {
        let mut u = QMatrix::identity(n);
        let mut l = QMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i < j {
                    u.set(i, j, int(v[i * n + j]));
                } else if i > j {
                    l.set(i, j, int(v[i * n + j]));
                }
            }
        }
        &u * &l
    })
}

fn partition() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in sized_matrix()) {
        let k = kernel(&m);
        prop_assert_eq!(m.rank() + k.dim(), m.cols());
        for v in k.basis_vectors() {
            prop_assert!(m.apply(&v).iter().all(|x| *x == int(0)));
        }
        prop_assert_eq!(phin_core::image(&m).dim(), m.rank());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn dimension_formula(u in subspace(5), w in subspace(5)) {
        let s = u.sum(&w).unwrap();
        let i = u.intersect(&w).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), u.dim() + w.dim());
        prop_assert!(i.is_subspace_of(&u) && i.is_subspace_of(&w));
        prop_assert!(u.is_subspace_of(&s) && w.is_subspace_of(&s));
        prop_assert_eq!(u.annihilator().dim(), 5 - u.dim());
        prop_assert_eq!(u.annihilator().annihilator(), u.clone());
    }

    #[test]
    fn modular_law(u in subspace(4), v in subspace(4), w in subspace(4)) {
        // U ⊆ W implies U + (V ∩ W) = (U + V) ∩ W
        let u = u.intersect(&w).unwrap();
        let lhs = u.sum(&v.intersect(&w).unwrap()).unwrap();
        let rhs = u.sum(&v).unwrap().intersect(&w).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn monodromy_filtration_of_jordan_types((blocks, g) in partition().prop_flat_map(|b| { let n = b.iter().sum(); (Just(b), unimodular(n)) })) {
        let d = (*blocks.iter().max().unwrap() - 1) as u32;
        let gi = g.inverse().unwrap();
        let nil = jordan(&blocks).conjugate(&g, &gi);
        let m = monodromy_filtration(&nil, d).unwrap();
        // oracle: a block of size k contributes one dimension at -(k-1), -(k-3), ..., k-1
        let mut expected = BTreeMap::new();
        for &k in &blocks {
            for t in 0..k {
                *expected.entry(2 * t as i64 - (k as i64 - 1)).or_insert(0usize) += 1;
            }
        }
        prop_assert_eq!(&m.graded_dims().0, &expected);
        for r in -(d as i64) - 1..=d as i64 + 1 {
            prop_assert!(m.step(r).image_under(&nil).unwrap().is_subspace_of(&m.step(r - 2)));
            if r > 0 {
                // N^r : gr_r → gr_{-r} is an isomorphism
                let nr = nil.pow(r as usize);
                let img = m.step(r).image_under(&nr).unwrap().sum(&m.step(-r - 1)).unwrap();
                prop_assert_eq!(img, m.step(-r));
            }
        }
    }

    #[test]
    fn char_poly_conjugation_invariant(m in matrix(4, 4), g in unimodular(4)) {
        let gi = g.inverse().unwrap();
        prop_assert_eq!(char_poly(&m).unwrap(), char_poly(&m.conjugate(&g, &gi)).unwrap());
        prop_assert_eq!(char_poly(&m).unwrap().coeff(0), if m.rows() % 2 == 0 { m.det().unwrap() } else { -m.det().unwrap() });
    }

    #[test]
    fn newton_polygon_of_root_products(vals in prop::collection::vec(0u32..=3, 1..=4), units in prop::collection::vec(prop::sample::select(vec![1i64, -1, 5, -7]), 4)) {
        let roots: Vec<_> = vals.iter().zip(&units).map(|(&v, &u)| int(u * 3i64.pow(v))).collect();
        let np = newton_polygon(&Polynomial::from_roots(&roots), 3, 1).unwrap();
        let mut expected: BTreeMap<i64, usize> = BTreeMap::new();
        for &v in &vals {
            *expected.entry(v as i64).or_default() += 1;
        }
        let got: BTreeMap<i64, usize> = np.segments.iter().map(|(s, k)| (phin_core::rational::floor_i64(s), *k)).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn filtered_two_term_complexes(dims in (1usize..=4, 1usize..=4), levels_seed in any::<u64>(), entries in prop::collection::vec(-2i64..=2, 16)) {
        let (a, b) = dims;
        let mut rng = ChaCha8Rng::seed_from_u64(levels_seed);
        let la: Vec<i64> = (0..a).map(|_| rand::Rng::random_range(&mut rng, 0..3)).collect();
        let lb: Vec<i64> = (0..b).map(|_| rand::Rng::random_range(&mut rng, 0..4)).collect();
        // d may only raise filtration level
        let mut d = QMatrix::zeros(b, a);
        for i in 0..b {
            for j in 0..a {
                if lb[i] >= la[j] {
                    d.set(i, j, int(entries[i * 4 + j]));
                }
            }
        }
        let fc = FilteredComplex::from_levels(GradedComplex::new(0, vec![a, b], vec![d]).unwrap(), &[la, lb]).unwrap();
        check_pages(&fc)?;
    }

    #[test]
    fn gaussian_binomial_identities(n in 0u32..=7, k in 0u32..=7, q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])) {
        prop_assume!(k <= n);
        let g = gaussian_binomial(n, k, q).unwrap();
        prop_assert_eq!(g, gaussian_binomial(n, n - k, q).unwrap());
        // product formula
        let (mut num, mut den) = (1u128, 1u128);
        for i in 0..k {
            num *= (q as u128).pow(n - i) - 1;
            den *= (q as u128).pow(i + 1) - 1;
        }
        prop_assert_eq!(g, num / den);
        prop_assert_eq!(num % den, 0);
    }

    #[test]
    fn lattice_class_ignores_generators(g in unimodular(3), scale in 0u32..=2, diag in prop::collection::vec(0u32..=2, 3)) {
        let p = 3i64;
        let base: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| if i == j { p.pow(diag[i]) } else { 0 }).collect()).collect();
        let a = LatticeClass::from_generators(&base, 3, 6).unwrap();
        // change generators by an integer unimodular matrix and rescale the lattice
        let mut moved = vec![vec![0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0i64;
                for k in 0..3 {
                    s += i64::try_from(g.get(i, k).to_integer()).unwrap() * base[k][j];
                }
                moved[i][j] = s * p.pow(scale);
            }
        }
        let b = LatticeClass::from_generators(&moved, 3, 6 + scale).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn check_pages(fc: &FilteredComplex) -> Result<(), TestCaseError> {
    let cx = fc.complex();
    let chi: i64 = cx.degrees().map(|n| if n % 2 == 0 { cx.dim(n) as i64 } else { -(cx.dim(n) as i64) }).sum();
    let stable = fc.stable_page();
    let mut prev: Option<BTreeMap<(i64, i64), usize>> = None;
    for r in 1..=stable + 1 {
        let page = fc.e_page(r).unwrap();
        prop_assert_eq!(page.euler_characteristic(), chi);
        if let Some(h) = prev {
            // E_{r} is the cohomology of (E_{r-1}, d_{r-1})
            prop_assert_eq!(&page.entries, &h);
        }
        prev = Some(page.homology_dims());
    }
    let infinity = fc.e_page(stable).unwrap();
    for n in cx.degrees() {
        prop_assert_eq!(infinity.diagonal_dim(n), cx.cohomology(n).dim());
        prop_assert_eq!(fc.abutment_filtration(n).unwrap().graded_dims().total(), cx.cohomology(n).dim());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cech_pages_of_random_nerves(seed in any::<u64>(), components in 1usize..=3, degrees in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nd = random_nerve(&mut rng, components, degrees, 3).unwrap();
        check_pages(&cech_complex(&nd).unwrap())?;
    }
}
