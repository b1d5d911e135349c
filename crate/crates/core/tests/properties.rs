use std::collections::BTreeMap;

use etensor::coeffs::{from_json, to_json};
use etensor::random::{haar_unitary, random_phases, random_product_state, random_state};
use etensor::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STRUCTURES: &[&[usize]] = &[
    &[2, 2],
    &[2, 3],
    &[3, 3],
    &[2, 2, 2],
    &[2, 3, 2],
    &[3, 2, 2, 2],
    &[2, 2, 2, 2],
];

fn scheme() -> NormalizationScheme {
    NormalizationScheme::default()
}

fn structure_and_rng() -> impl Strategy<Value = (PartyStructure, ChaCha8Rng)> {
    (0..STRUCTURES.len(), any::<u64>()).prop_map(|(i, seed)| {
        (
            PartyStructure::new(STRUCTURES[i].to_vec()).unwrap(),
            ChaCha8Rng::seed_from_u64(seed),
        )
    })
}

fn random_unitaries(structure: &PartyStructure, rng: &mut ChaCha8Rng) -> Vec<LocalUnitary> {
    structure
        .dims()
        .iter()
        .enumerate()
        .map(|(j, &n)| LocalUnitary::new(j, haar_unitary(n, rng)).unwrap())
        .collect()
}

fn max_dev(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn decimal() -> impl Strategy<Value = f64> {
    (-999i32..=999).prop_map(|v| f64::from(v) / 100.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flat_and_tuple_indices_are_inverse((st, _) in structure_and_rng()) {
        for flat in 0..st.total_dim() {
            let t = st.tuple_of(flat).unwrap();
            prop_assert_eq!(st.flat_index(&t).unwrap(), flat);
        }
        prop_assert!(st.tuple_of(st.total_dim()).is_err());
    }

    #[test]
    fn coefficient_file_round_trip_is_exact((st, mut rng) in structure_and_rng()) {
        let s = random_state(&st, &mut rng);
        let back = from_json(&to_json(&s), false).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn parsed_kets_survive_json(re in prop::collection::vec(decimal(), 1..6), im in prop::collection::vec(decimal(), 6)) {
        let text: Vec<String> = re
            .iter()
            .zip(&im)
            .enumerate()
            .map(|(k, (a, b))| format!("({a} + {b}i)|{},{}>", k / 3, k % 3))
            .collect();
        let text = text.join(" + ");
        let Ok(s) = parse_ket_normalized(&text, Some(&PartyStructure::new(vec![2, 3]).unwrap())) else {
            // every coefficient rounded to zero
            prop_assert!(re.iter().zip(&im).all(|(a, b)| *a == 0.0 && *b == 0.0));
            return Ok(());
        };
        let back = from_json(&to_json(&s), false).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn parser_is_linear(a in decimal(), b in decimal(), c in decimal()) {
        let text = format!("{a}|0,1> + ({b})*i|1,0> - ({c})|0,1>");
        let (_, amps) = ket::parse_amplitudes(&text, None).unwrap();
        prop_assert!((amps[1] - Complex64::new(a - c, 0.0)).norm() < 1e-12);
        prop_assert!((amps[2] - Complex64::new(0.0, b)).norm() < 1e-12);
        prop_assert_eq!(amps[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn projections_over_a_party_sum_to_one((st, mut rng) in structure_and_rng()) {
        let s = random_state(&st, &mut rng);
        for party in 0..st.num_parties() {
            let total: f64 = (0..st.dim(party))
                .map(|v| projection_probability(&s, &BTreeMap::from([(party, v)])).unwrap().probability)
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn components_ignore_local_phases((st, mut rng) in structure_and_rng()) {
        let s = random_state(&st, &mut rng);
        let gates: Vec<LocalUnitary> = st
            .dims()
            .iter()
            .enumerate()
            .map(|(j, &n)| LocalUnitary::phase(j, &random_phases(n, &mut rng)).unwrap())
            .collect();
        let before = full_tensor(&s, &scheme(), None).unwrap();
        let after = full_tensor(&apply_all(&s, &gates).unwrap(), &scheme(), None).unwrap();
        for (k, v) in &before.components {
            prop_assert!((after.components[k] - v).abs() < 1e-12, "{} {} {}", k, v, after.components[k]);
        }
    }

    #[test]
    fn product_states_have_no_components((st, mut rng) in structure_and_rng()) {
        let s = random_product_state(&st, &mut rng);
        let r = full_tensor(&s, &scheme(), None).unwrap();
        prop_assert!(r.components.values().all(|v| *v < 1e-10));
        prop_assert!(separability_scan(&s, &scheme()).unwrap().iter().all(|d| *d));
    }

    #[test]
    fn bipartite_component_matches_purity(da in 2usize..=4, db in 2usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&PartyStructure::new(vec![da, db]).unwrap(), &mut rng);
        let c = component(&s, &SubsetSelector::new(vec![0, 1], 2).unwrap(), &scheme()).unwrap();
        let p = concurrence_purity(&s, &PartyGrouping::parse("1|2", 2).unwrap()).unwrap();
        prop_assert!((c - p).abs() < 1e-9);
    }

    #[test]
    fn two_qubit_closed_form(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&PartyStructure::qubits(2).unwrap(), &mut rng);
        let a = s.amplitudes();
        let det = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
        let c = component(&s, &SubsetSelector::new(vec![0, 1], 2).unwrap(), &scheme()).unwrap();
        prop_assert!((c - det).abs() < 1e-10);
        prop_assert!((concurrence_pure_2qubit(&s).unwrap() - det).abs() < 1e-10);
        let rho = DensityMatrix::from_pure(&s).unwrap();
        prop_assert!((concurrence_mixed_2qubit(&rho) - det).abs() < 1e-9);
    }

    #[test]
    fn adjoint_undoes_local_unitary((st, mut rng) in structure_and_rng()) {
        let s = random_state(&st, &mut rng);
        let us = random_unitaries(&st, &mut rng);
        let forward = apply_all(&s, &us).unwrap();
        let inverse: Vec<LocalUnitary> = us.iter().map(LocalUnitary::adjoint).collect();
        let back = apply_all(&forward, &inverse).unwrap();
        prop_assert!(max_dev(&back, &s) < 1e-12);
        prop_assert!((forward.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regroup_round_trip((st, mut rng) in structure_and_rng(), cut in 1usize..4) {
        let m = st.num_parties();
        prop_assume!(m > 2);
        let cut = cut.min(m - 1);
        let g = PartyGrouping::new(vec![(0..cut).collect(), (cut..m).collect()], m).unwrap();
        let s = random_state(&st, &mut rng);
        let grouped = regroup(&s, &g).unwrap();
        prop_assert_eq!(grouped.num_parties(), 2);
        prop_assert_eq!(ungroup(&grouped, &g, &st).unwrap(), s);
    }

    #[test]
    fn measurement_branches_reproduce_the_reduced_state((st, mut rng) in structure_and_rng()) {
        let s = random_state(&st, &mut rng);
        let m = st.num_parties();
        prop_assume!(m > 2);
        let keep: Vec<usize> = (1..m).collect();
        let target = reduced_density(&s, &keep).unwrap();
        let mut mix = target.map(|_| Complex64::new(0.0, 0.0));
        for o in 0..st.dim(0) {
            let meas = measure_party(&s, 0, o).unwrap();
            if let Some(cs) = meas.state {
                let v = nalgebra::DVector::from_column_slice(cs.amplitudes());
                mix += (&v * v.adjoint()) * Complex64::new(meas.probability, 0.0);
            }
        }
        prop_assert!((mix - target).iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn spin_flip_twice_is_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&PartyStructure::qubits(2).unwrap(), &mut rng);
        let back = SpinFlip.apply(&SpinFlip.apply(&s).unwrap()).unwrap();
        prop_assert!(max_dev(&back, &s) < 1e-15);
    }

    #[test]
    fn scheme_constants_scale_components(seed in any::<u64>(), k in 0.5f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&PartyStructure::qubits(3).unwrap(), &mut rng);
        let custom = scheme().with_constant(3, 4.0 * k).unwrap();
        let base = full_tensor(&s, &scheme(), None).unwrap();
        let scaled = full_tensor(&s, &custom, None).unwrap();
        for (sub, v) in &base.components {
            let expected = if sub.size() == 3 { v * k.sqrt() } else { *v };
            prop_assert!((scaled.components[sub] - expected).abs() < 1e-12);
        }
    }
}

#[test]
fn oracles_agree_on_many_two_qubit_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pair = SubsetSelector::new(vec![0, 1], 2).unwrap();
    let cut = PartyGrouping::parse("1|2", 2).unwrap();
    for _ in 0..150 {
        let s = random_state(&PartyStructure::qubits(2).unwrap(), &mut rng);
        let c = component(&s, &pair, &scheme()).unwrap();
        assert!((c - concurrence_pure_2qubit(&s).unwrap()).abs() < 1e-10);
        assert!((c - concurrence_purity(&s, &cut).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn w_family_pair_contrast() {
    for m in 3..=6 {
        let w = states::w(m).unwrap();
        let pair = SubsetSelector::new(vec![0, 1], m).unwrap();
        let c = component(&w, &pair, &scheme()).unwrap();
        let traced = dur_average(m).unwrap();
        assert!((c * c - 2.0 / m as f64).abs() < 1e-12);
        assert!((c * c / traced - m as f64 / 2.0).abs() < 1e-9);
    }
}

#[test]
fn unequal_dimensions_break_no_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let st = PartyStructure::new(vec![3, 2, 4]).unwrap();
    let s = random_state(&st, &mut rng);
    let us = random_unitaries(&st, &mut rng);
    let moved = apply_all(&s, &us).unwrap();
    let g = PartyGrouping::parse("1|2,3", 3).unwrap();
    let before = concurrence_purity(&s, &g).unwrap();
    let after = concurrence_purity(&moved, &g).unwrap();
    assert!((before - after).abs() < 1e-10);
}
