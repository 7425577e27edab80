use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use extreg::{
    in_span, kernel_basis, rank, rref, EchelonBasis, FieldSpec, Fp, Matrix, Rational, Scalar,
};

/// Random matrix, often rank-deficient: a product of two random factors.
fn random_matrix<S: Scalar>(rng: &mut StdRng, spec: FieldSpec) -> Matrix<S> {
    let rows = rng.gen_range(0..9);
    let cols = rng.gen_range(0..9);
    let inner = rng.gen_range(0..9);
    let entry = |rng: &mut StdRng| S::from_i64(&spec, rng.gen_range(-3..=3));
    let a = Matrix::from_rows(
        spec,
        inner,
        (0..rows)
            .map(|_| (0..inner).map(|_| entry(rng)).collect())
            .collect(),
    );
    let b = Matrix::from_rows(
        spec,
        cols,
        (0..inner)
            .map(|_| (0..cols).map(|_| entry(rng)).collect())
            .collect(),
    );
    a.mul(&b).unwrap()
}

fn check<S: Scalar>(seed: u64, spec: FieldSpec) -> Result<(), TestCaseError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let m = random_matrix::<S>(&mut rng, spec);
    let r = rank(&m);
    let ker = kernel_basis(&m);

    // rank–nullity, and the kernel really is a kernel of full dimension
    prop_assert_eq!(r + ker.len(), m.n_cols());
    for v in &ker {
        prop_assert!(m.mul_vec(v).unwrap().iter().all(Scalar::is_zero));
    }
    if !ker.is_empty() {
        let km = Matrix::from_columns(spec, m.n_cols(), &ker);
        prop_assert_eq!(rank(&km), ker.len());
    }

    // row rank equals column rank
    prop_assert_eq!(rank(&m.transpose()), r);
    let mut cols = EchelonBasis::new(spec, m.n_rows());
    for c in m.columns() {
        cols.insert(c);
    }
    prop_assert_eq!(cols.rank(), r);

    // rref is idempotent, has unit pivots and preserves the row space
    let red = rref(&m);
    prop_assert_eq!(red.rank, r);
    prop_assert_eq!(&rref(&red.matrix).matrix, &red.matrix);
    for (k, &c) in red.pivot_cols.iter().enumerate() {
        prop_assert!(red.matrix.get(k, c).is_one());
        for i in 0..m.n_rows() {
            if i != k {
                prop_assert!(red.matrix.get(i, c).is_zero());
            }
        }
    }
    let mut rows = EchelonBasis::new(spec, m.n_cols());
    for i in 0..m.n_rows() {
        rows.insert(m.row(i).to_vec());
    }
    for i in 0..m.n_rows() {
        prop_assert!(rows.contains(red.matrix.row(i)));
    }

    // images lie in the column space
    let x: Vec<S> = (0..m.n_cols())
        .map(|_| S::from_i64(&spec, rng.gen_range(-3..=3)))
        .collect();
    prop_assert!(in_span(&m, &m.mul_vec(&x).unwrap()).unwrap());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn linear_algebra_over_rationals(seed in any::<u64>()) {
        check::<Rational>(seed, FieldSpec::rationals())?;
    }

    #[test]
    fn linear_algebra_over_f2(seed in any::<u64>()) {
        check::<Fp>(seed, FieldSpec::prime_field(2).unwrap())?;
    }

    #[test]
    fn linear_algebra_over_f5(seed in any::<u64>()) {
        check::<Fp>(seed, FieldSpec::prime_field(5).unwrap())?;
    }
}

#[test]
fn large_matrices_take_the_parallel_path() {
    // enough rows to trigger row-parallel elimination; the answer must not change
    let spec = FieldSpec::prime_field(101).unwrap();
    let mut rng = StdRng::seed_from_u64(7);
    let inner = 40;
    let a = Matrix::<Fp>::from_rows(
        spec,
        inner,
        (0..300)
            .map(|_| {
                (0..inner)
                    .map(|_| Fp::from_i64(&spec, rng.gen_range(0..101)))
                    .collect()
            })
            .collect(),
    );
    let b = Matrix::<Fp>::from_rows(
        spec,
        60,
        (0..inner)
            .map(|_| {
                (0..60)
                    .map(|_| Fp::from_i64(&spec, rng.gen_range(0..101)))
                    .collect()
            })
            .collect(),
    );
    let m = a.mul(&b).unwrap();
    assert_eq!(rank(&m), 40);
    assert_eq!(kernel_basis(&m).len(), 20);
    assert_eq!(rank(&m.transpose()), 40);
}
