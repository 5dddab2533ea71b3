use msa_core::assembly::all_element_matrices;
use msa_core::fixtures::{self, random_model};
use msa_core::{
    assemble, build_dof_map, dense_oracle_eig, element_matrices, energy_s, energy_v, parse_model,
    solve_extreme_eigenpairs, EigenOptions, ElementProps, Node,
};
use proptest::prelude::*;

fn check_identities(model: &msa_core::Model) {
    let map = build_dof_map(model);
    let matrices = all_element_matrices::<f64>(model).unwrap();
    let a = assemble::<f64>(model, &map).unwrap();
    let n = a.n();
    let n_s = n.min(6);
    let n_l = (n - n_s).min(4);
    let eig = solve_extreme_eigenpairs(&a, n_s, n_l, &EigenOptions::default()).unwrap();
    let counts = map.incidence_counts();
    for p in eig.smallest.iter().chain(&eig.largest) {
        let s: f64 = energy_s(&p.vector, &matrices, &map).iter().sum();
        assert!(
            (s - p.value / 2.0).abs() <= 1e-9 * p.value.abs().max(1.0),
            "s-sum {s} vs λ/2 {}",
            p.value / 2.0
        );
        let v2: f64 = energy_v(&p.vector, &map).iter().map(|v| 2.0 * v).sum();
        let expected: f64 = p
            .vector
            .iter()
            .zip(&counts)
            .map(|(u, &c)| c as f64 * u * u)
            .sum();
        assert!((v2 - expected).abs() <= 1e-12, "v-sum {v2} vs {expected}");
    }
}

#[test]
fn identities_on_fixtures() {
    check_identities(&fixtures::portal_frame(1e-8));
    check_identities(&fixtures::portal_frame(1.0));
    check_identities(&fixtures::unrestrained_frame());
}

#[test]
fn identities_on_random_models() {
    for seed in 0..10 {
        check_identities(&random_model(seed, 5 + 5 * seed as usize));
    }
}

#[test]
fn v_sum_matches_oracle_eigenvectors() {
    let model = fixtures::portal_frame(1e-8);
    let map = build_dof_map(&model);
    let a = assemble::<f64>(&model, &map).unwrap();
    let oracle = dense_oracle_eig(&a).unwrap();
    let counts = map.incidence_counts();
    for j in 0..a.n() {
        let u = oracle.vector(j);
        let v2: f64 = energy_v(&u, &map).iter().map(|v| 2.0 * v).sum();
        let expected: f64 = u.iter().zip(&counts).map(|(x, &c)| c as f64 * x * x).sum();
        assert!((v2 - expected).abs() <= 1e-12);
    }
}

fn element_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, ElementProps)> {
    let props = prop_oneof![
        (1e-3..1e3f64).prop_map(|k| ElementProps::Spring { k }),
        (1e-3..1e3f64).prop_map(|ea| ElementProps::Bar { ea }),
        (1e-3..1e3f64, 1e-3..1e3f64).prop_map(|(ea, ei)| ElementProps::Beam2d { ea, ei }),
    ];
    (
        -10.0..10.0f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
        props,
    )
        .prop_filter("non-degenerate length", |(x0, y0, x1, y1, _)| {
            (x1 - x0).hypot(y1 - y0) > 1e-2
        })
}

proptest! {
    #[test]
    fn element_matrices_are_symmetric_psd((x0, y0, x1, y1, props) in element_strategy(),
                                          u in prop::collection::vec(-1.0..1.0f64, 6)) {
        let element = msa_core::Element { id: 1, nodes: [1, 2], props };
        let a = Node { id: 1, x: x0, y: y0 };
        let b = Node { id: 2, x: x1, y: y1 };
        let k = element_matrices::<f64>(&element, &a, &b).unwrap().global();
        prop_assert!(k.is_symmetric());
        let u = &u[..k.rows()];
        let q: f64 = u.iter().zip(k.matvec(u)).map(|(x, y)| x * y).sum();
        prop_assert!(q >= -1e-12 * k.norm_fro());
        let w = msa_core::dense::symmetric_eigen(&k).unwrap().0;
        prop_assert!(w[0] >= -1e-12 * k.norm_fro());
    }

    #[test]
    fn rigid_translation_has_no_strain_energy((x0, y0, x1, y1, props) in element_strategy(),
                                              tx in -1.0..1.0f64, ty in -1.0..1.0f64) {
        let element = msa_core::Element { id: 1, nodes: [1, 2], props };
        let a = Node { id: 1, x: x0, y: y0 };
        let b = Node { id: 2, x: x1, y: y1 };
        let k = element_matrices::<f64>(&element, &a, &b).unwrap().global();
        let u: Vec<f64> = if k.rows() == 6 { vec![tx, ty, 0.0, tx, ty, 0.0] } else { vec![tx, ty, tx, ty] };
        let q: f64 = u.iter().zip(k.matvec(&u)).map(|(x, y)| x * y).sum();
        prop_assert!(q.abs() <= 1e-10 * k.norm_fro());
    }

    #[test]
    fn model_round_trips(seed in 0u64..1000, elements in 1usize..40) {
        let m = random_model(seed, elements);
        prop_assert_eq!(parse_model(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn normalized_energies_are_bounded(raw in prop::collection::vec(0.0..1e6f64, 1..30)) {
        let n = msa_core::normalize_energies(&raw);
        if raw.iter().all(|&x| x == 0.0) {
            prop_assert!(n.degenerate);
        } else {
            prop_assert!(n.values.iter().all(|&x| (0.0..=1.0).contains(&x)));
            prop_assert!(n.values.contains(&1.0));
            let p = msa_core::partition_two_clusters(&n.values);
            let top = n.values.iter().position(|&x| x == 1.0).unwrap();
            prop_assert_eq!(p.labels[top], msa_core::Cluster::Suspect);
        }
    }
}
