//! The hand-written SVD and Hermitian eigensolver against nalgebra.

use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use vqc::qmat::{frobenius_norm, herm_eig, svd, ComplexMatrix, C64};

fn to_na(m: &ComplexMatrix) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn matrix(d: usize, entries: &[(f64, f64)]) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        let (re, im) = entries[i * d + j];
        C64::new(re, im)
    })
}

fn entries(d: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn singular_values_match_nalgebra((d, raw) in (1usize..9).prop_flat_map(|d| (Just(d), entries(d)))) {
        let a = matrix(d, &raw);
        let ours = svd(&a).unwrap();
        let mut theirs: Vec<f64> = to_na(&a).singular_values().iter().copied().collect();
        theirs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (s, t) in ours.sigma.iter().zip(&theirs) {
            prop_assert!((s - t).abs() < 1e-10, "{s} vs {t}");
        }
        prop_assert!(frobenius_norm(&ours.reconstruct().sub(&a)) < 1e-10);
        prop_assert!(ours.k1.unitary_residual() < 1e-10);
        prop_assert!(ours.k2dag.unitary_residual() < 1e-10);
    }

    #[test]
    fn eigenvalues_match_nalgebra(raw in entries(6)) {
        let a = matrix(6, &raw);
        let h = a.add(&a.adjoint()).scale(C64::new(0.5, 0.0));
        let ours = herm_eig(&h).unwrap();
        let mut theirs: Vec<f64> = to_na(&h).symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (s, t) in ours.values.iter().zip(&theirs) {
            prop_assert!((s - t).abs() < 1e-10, "{s} vs {t}");
        }
        let v = &ours.vectors;
        let diag = ComplexMatrix::diag(&ours.values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        prop_assert!(frobenius_norm(&v.matmul(&diag).matmul(&v.adjoint()).sub(&h)) < 1e-10);
    }
}

#[test]
fn rank_deficient_svd_matches_nalgebra() {
    let u = ComplexMatrix::from_fn(4, 1, |i, _| C64::new(i as f64 + 1.0, 0.5));
    let v = ComplexMatrix::from_fn(1, 4, |_, j| C64::new(1.0, -(j as f64)));
    let a = u.matmul(&v);
    let ours = svd(&a).unwrap();
    let theirs = to_na(&a).singular_values();
    assert!((ours.sigma[0] - theirs.max()).abs() < 1e-10);
    assert!(ours.sigma[1..].iter().all(|s| s.abs() < 1e-10));
    assert!(ours.k1.unitary_residual() < 1e-10);
    assert!(frobenius_norm(&ours.reconstruct().sub(&a)) < 1e-10);
}
