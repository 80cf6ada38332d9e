use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qsc::ensemble::sample_gse;
use qsc::quaternion::Complex2x2;
use qsc::rng::rng_from_seed;
use qsc::spectra::{embed, resolvent};
use qsc::structure::{
    classify, d_related, sample_type_two, schur_block_inverse, u_decompose, u_partner, u_related,
    BlockMatrix, StructureClass,
};
use qsc::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn block_from(seed: u64) -> Complex2x2 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = || Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    Complex2x2::new(c(), c(), c(), c())
}

/// Largest entry of `M·S − I`, the residual oracle for any claimed inverse.
fn inverse_residual(m: &BlockMatrix, s: &BlockMatrix) -> f64 {
    m.matmul(s).sub(&BlockMatrix::identity(m.n())).max_block_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_split_reconstructs(seed in any::<u64>()) {
        let p = block_from(seed);
        let (a, b) = u_decompose(&p).unwrap();
        prop_assert!(a.quaternion_residual() < 1e-14 && b.quaternion_residual() < 1e-14);
        prop_assert!((a + b.scale(I)).max_abs_diff(&p) < 1e-13);
    }

    #[test]
    fn relations_are_symmetric(seed in any::<u64>()) {
        let p = block_from(seed);
        // d-partner of the d-partner, u-partner of the u-partner.
        prop_assert!(d_related(&p.adjugate(), &p, 0.0));
        let q = u_partner(&p).unwrap();
        prop_assert!(u_related(&q, &p, 1e-13).unwrap());
    }

    #[test]
    fn type_two_inverse_is_type_one(seed in any::<u64>(), n in 1usize..=6) {
        let m = sample_type_two(n, &mut rng_from_seed(seed));
        prop_assert_eq!(classify(&m, 1e-12).classification, StructureClass::TypeII);
        let inv = m.inverse().unwrap();
        prop_assert!(inverse_residual(&m, &inv) < 1e-8);
        let rep = classify(&inv, 1e-8);
        prop_assert!(rep.satisfies(StructureClass::TypeI), "{:?}", rep);
    }

    #[test]
    fn schur_inverse_agrees_with_dense(seed in any::<u64>(), n in 2usize..=6, split_frac in 0.0..1.0f64) {
        let m = sample_type_two(n, &mut rng_from_seed(seed));
        let split = 1 + ((n - 1) as f64 * split_frac) as usize;
        let s = schur_block_inverse(&m, split).unwrap();
        let dense = m.inverse().unwrap();
        let scale = dense.max_block_norm().max(1.0);
        prop_assert!(inverse_residual(&m, &s) < 1e-8 * scale);
        prop_assert!(s.sub(&dense).max_block_norm() < 1e-8 * scale);
    }
}

#[test]
fn schur_rejects_bad_split() {
    let m = sample_type_two(3, &mut rng_from_seed(1));
    assert!(schur_block_inverse(&m, 0).is_err());
    assert!(schur_block_inverse(&m, 4).is_err());
}

#[test]
fn shifted_embedding_is_type_two_and_its_inverse_type_one() {
    let w = sample_gse(12, 5).unwrap();
    let e = embed(&w);
    // Quaternion blocks with Hermitian pairing satisfy both relations.
    let rep = classify(&e, 1e-12);
    assert!(rep.satisfies(StructureClass::TypeI) && rep.satisfies(StructureClass::TypeII));
    let z = Complex64::new(0.3, 0.7);
    let shifted = e.shift(z);
    assert!(classify(&shifted, 1e-12).satisfies(StructureClass::TypeII));
    let r = resolvent(&e, z).unwrap();
    assert!(inverse_residual(&shifted, &r) < 1e-10);
    let rep = classify(&r, 1e-8);
    assert!(rep.satisfies(StructureClass::TypeI), "{rep:?}");
    assert!(rep.diagonal_residual < 1e-12);
}

#[test]
fn perturbation_is_located_by_the_witness() {
    let m = sample_type_two(5, &mut rng_from_seed(11));
    let mut inv = m.inverse().unwrap();
    let (j, k) = (1, 3);
    let mut b = inv.block(k, j);
    b.0[0][1] += Complex64::new(0.05 * inv.max_block_norm(), 0.0);
    inv.set_block(k, j, &b);
    let rep = classify(&inv, 1e-8);
    assert!(!rep.satisfies(StructureClass::TypeI));
    let w = rep.witness.expect("a witness");
    assert_eq!((w.j, w.k), (j, k));
    assert!(w.residual > 1e-3);
}

#[test]
fn diagonal_only_and_unstructured() {
    let mut m = BlockMatrix::identity(2);
    m.set_block(0, 1, &block_from(3));
    m.set_block(1, 0, &block_from(4));
    assert_eq!(classify(&m, 1e-10).classification, StructureClass::TypeTDiagonalOnly);
    m.set_block(0, 0, &block_from(5));
    assert_eq!(classify(&m, 1e-10).classification, StructureClass::None);
}
