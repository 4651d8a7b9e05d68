use proptest::prelude::*;
use qrelay_core::entropy::{
    coherent_information, conditional_entropy, marginal_entropy, mutual_information, purity,
    von_neumann_entropy,
};
use qrelay_core::linalg::SubsystemShape;
use qrelay_core::random::{random_channel, random_density, random_pure_state, rng_from_seed};

const TOL: f64 = 1e-8;

fn shape(entries: &[(&str, usize)]) -> SubsystemShape {
    SubsystemShape::new(entries.iter().copied()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_within_bounds(seed in any::<u64>(), d in 2usize..=4, rank in 1usize..=4) {
        let rho = random_density(shape(&[("A", d)]), rank, &mut rng_from_seed(seed));
        let h = von_neumann_entropy(&rho);
        prop_assert!(h >= -1e-9);
        prop_assert!(h <= (d as f64).log2() + 1e-9);
        let p = purity(&rho);
        prop_assert!(p > 0.0 && p <= 1.0 + 1e-12);
    }

    #[test]
    fn entropy_is_additive(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(shape(&[("A", da)]), da, &mut rng);
        let sigma = random_density(shape(&[("B", db)]), db, &mut rng);
        let joint = von_neumann_entropy(&rho.tensor(&sigma).unwrap());
        prop_assert!((joint - von_neumann_entropy(&rho) - von_neumann_entropy(&sigma)).abs() < TOL);
    }

    #[test]
    fn schmidt_symmetry(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let psi = random_pure_state(shape(&[("A", da), ("B", db)]), &mut rng_from_seed(seed));
        let rho = psi.to_density();
        let ha = marginal_entropy(&rho, &["A"]).unwrap();
        let hb = marginal_entropy(&rho, &["B"]).unwrap();
        prop_assert!((ha - hb).abs() < TOL);
        prop_assert!(von_neumann_entropy(&rho).abs() < TOL);
    }

    #[test]
    fn conditional_entropy_duality(
        seed in any::<u64>(),
        d1 in 2usize..=4,
        da in 2usize..=4,
        dd in 2usize..=3,
    ) {
        // pure σ on A1 A D: H(A1|D) = I(A1⟩A)
        let sigma = random_pure_state(shape(&[("A1", d1), ("A", da), ("D", dd)]), &mut rng_from_seed(seed))
            .to_density();
        let lhs = conditional_entropy(&sigma, &["A1"], &["D"]).unwrap();
        let rhs = coherent_information(&sigma, &["A1"], &["A"]).unwrap();
        prop_assert!((lhs - rhs).abs() < TOL);
    }

    #[test]
    fn data_processing_for_coherent_information(
        seed in any::<u64>(),
        d1 in 2usize..=3,
        da in 2usize..=3,
        db in 2usize..=3,
        k in 1usize..=4,
    ) {
        let mut rng = rng_from_seed(seed);
        let sigma = random_pure_state(shape(&[("A1", d1), ("A", da)]), &mut rng).to_density();
        let kraus = k.max(da.div_ceil(db));
        let ch = random_channel(shape(&[("A", da)]), shape(&[("B", db)]), kraus, &mut rng).unwrap();
        let omega = ch.apply(&sigma, &["A"]).unwrap();
        let before = coherent_information(&sigma, &["A1"], &["A"]).unwrap();
        let after = coherent_information(&omega, &["A1"], &["B"]).unwrap();
        prop_assert!(before >= after - TOL, "{before} < {after}");
    }

    #[test]
    fn mutual_information_is_nonnegative(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let rho = random_density(shape(&[("A", da), ("B", db)]), 3, &mut rng_from_seed(seed));
        prop_assert!(mutual_information(&rho, &["A"], &["B"]).unwrap() >= 0.0);
    }

    #[test]
    fn purity_of_tensor_powers(seed in any::<u64>(), d in 2usize..=3, n in 1usize..=3) {
        let rho = random_density(shape(&[("A0", d)]), d, &mut rng_from_seed(seed));
        let mut power = rho.clone();
        for i in 1..n {
            power = power.tensor(&rho.relabel("A0", &format!("A{i}")).unwrap()).unwrap();
        }
        prop_assert!((purity(&power) - purity(&rho).powi(n as i32)).abs() < 1e-12);
    }
}

#[test]
fn tripartite_coherent_information_duality() {
    for seed in 0..50 {
        let psi = random_pure_state(shape(&[("A", 2), ("B", 3), ("C", 2)]), &mut rng_from_seed(seed));
        let rho = psi.to_density();
        let ab = coherent_information(&rho, &["A"], &["B"]).unwrap();
        let ac = coherent_information(&rho, &["A"], &["C"]).unwrap();
        assert!((ab + ac).abs() < TOL);
    }
}
