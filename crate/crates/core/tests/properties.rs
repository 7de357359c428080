use mbqc_fidelity::omega::{build_omega, build_omega_recursive, omega_spectrum};
use mbqc_fidelity::resource::{cluster_1d, cluster_2d, excited_state, graph_state, ResourceFile};
use mbqc_fidelity::sampler::exact_distribution;
use mbqc_fidelity::sim::{expectation, group_vector};
use mbqc_fidelity::{Dyadic, Letter, PauliWord, QubitSet, ResourceState};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

const LETTERS: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

fn word(n: usize) -> impl Strategy<Value = PauliWord> {
    (prop::collection::vec(0usize..4, n), 0u8..4)
        .prop_map(|(ls, p)| PauliWord::from_letters(&ls.iter().map(|&k| LETTERS[k]).collect::<Vec<_>>(), p))
}

fn triple() -> impl Strategy<Value = (PauliWord, PauliWord, PauliWord)> {
    (1usize..=5).prop_flat_map(|n| (word(n), word(n), word(n)))
}

fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
    (a - b).norm() < 1e-10
}

proptest! {
    #[test]
    fn product_matches_dense_and_is_associative((a, b, c) in triple()) {
        let ab = a.mul(&b).unwrap();
        prop_assert!(close(&ab.to_dense(12).unwrap(), &(a.to_dense(12).unwrap() * b.to_dense(12).unwrap())));
        prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn commutation_matches_dense((a, b, _) in triple()) {
        let (da, db) = (a.to_dense(12).unwrap(), b.to_dense(12).unwrap());
        prop_assert_eq!(a.commutes(&b).unwrap(), close(&(&da * &db), &(&db * &da)));
    }

    #[test]
    fn phases_and_hermiticity((a, _, _) in triple()) {
        let sq = a.mul(&a).unwrap();
        prop_assert!(sq.is_identity_letters());
        // P² = +I exactly when P is Hermitian
        prop_assert_eq!(sq.sign() == Some(1), a.is_hermitian());
        let u = a.unsigned();
        prop_assert_eq!(u.phase(), 0);
        prop_assert_eq!(u.to_string().parse::<PauliWord>().unwrap(), u.clone());
        prop_assert_eq!(a.to_string().parse::<PauliWord>().unwrap(), a);
    }

    #[test]
    fn weight_splits_over_a_partition((a, _, _) in triple(), mask in 0u32..32) {
        let n = a.n();
        let set = QubitSet::from_indices(n, (0..n).filter(|q| mask >> q & 1 == 1)).unwrap();
        prop_assert_eq!(a.weight_on(&set) + a.weight_on(&set.complement()), a.weight());
    }

    #[test]
    fn tensor_is_kronecker((a, b, _) in triple()) {
        let t = a.tensor(&b);
        let want = a.to_dense(12).unwrap().kronecker(&b.to_dense(12).unwrap());
        prop_assert!(close(&t.to_dense(12).unwrap(), &want));
    }
}

fn random_path_graph(n: usize, extra: &[(usize, usize)]) -> Option<ResourceState> {
    // A path 0-1-...-(n-1) plus extra edges between later qubits keeps a flow
    // in natural order with the last qubit as output.
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|k| (k, k + 1)).collect();
    for &(a, b) in extra {
        let (a, b) = (a % n, b % n);
        if a != b && !edges.contains(&(a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b)));
        }
    }
    graph_state(n, &edges, &[n - 1], (0..n - 1).collect()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn omega_invariants(n in 2usize..8, extra in prop::collection::vec((0usize..8, 0usize..8), 0..3)) {
        let Some(s) = random_path_graph(n, &extra) else { return Ok(()) };
        let omega = build_omega(&s, 24).unwrap();
        prop_assert_eq!(&build_omega_recursive(&s, 24).unwrap(), &omega);
        prop_assert_eq!(omega.abs_coefficient_sum(), Dyadic::ONE);
        prop_assert_eq!(omega.coeff(&PauliWord::identity(n)), Dyadic::half_pow(s.outputs().len() as u32));

        let spec = omega_spectrum(&s, 26).unwrap();
        let eig = spec.sorted_eigenvalues();
        prop_assert!((eig[0] - 1.0).abs() < 1e-12);
        prop_assert!(*eig.last().unwrap() > -1e-12);

        for k in s.outputs().iter() {
            let ex = group_vector(&excited_state(&s, k).unwrap().to_group(), 12).unwrap();
            prop_assert!(expectation(&ex.to_density(), &omega).unwrap().abs() < 1e-10);
        }
    }
}

#[test]
fn sampler_distribution_ignores_generator_order() {
    for s in [cluster_1d(6).unwrap(), cluster_2d(2, 3).unwrap()] {
        let want = exact_distribution(&s).unwrap();
        let mut file: ResourceFile = s.to_file();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            file.generators.shuffle(&mut rng);
            let t = ResourceState::from_file(&file).unwrap();
            assert_eq!(exact_distribution(&t).unwrap(), want);
        }
    }
}
