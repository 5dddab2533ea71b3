use msa_core::fixtures::{self, random_model, random_spd};
use msa_core::model::Dof;
use msa_core::scalar::{dot, norm2};
use msa_core::{
    assemble, build_dof_map, parse_model, solve_extreme_eigenpairs, EigenOptions, EigenSet, Matrix,
};

fn check(a: &Matrix, eig: &EigenSet<f64>, tol: f64) {
    let limit = eig.residual_limit(tol);
    let all: Vec<_> = eig.smallest.iter().chain(&eig.largest).collect();
    for list in [&eig.smallest, &eig.largest] {
        assert!(list.windows(2).all(|w| w[0].value <= w[1].value));
    }
    for (i, p) in all.iter().enumerate() {
        assert!((norm2(&p.vector) - 1.0).abs() <= 1e-12);
        let mut r = a.matvec(&p.vector).unwrap();
        for (ri, ui) in r.iter_mut().zip(&p.vector) {
            *ri -= p.value * ui;
        }
        assert!(norm2(&r) <= limit, "residual {} > {limit}", norm2(&r));
        assert!(p.value >= -1e-10 * eig.norm1);
        for q in &all[i + 1..] {
            if (p.value - q.value).abs() > 1e-6 * eig.norm1 {
                assert!(dot(&p.vector, &q.vector).abs() <= 1e-8);
            }
        }
    }
    let within = |list: &[msa_core::EigenPair<f64>]| {
        for (i, p) in list.iter().enumerate() {
            for q in &list[i + 1..] {
                assert!(dot(&p.vector, &q.vector).abs() <= 1e-8);
            }
        }
    };
    within(&eig.smallest);
    within(&eig.largest);
}

#[test]
fn invariants_on_fixtures_and_random_models() {
    let mut models = vec![
        fixtures::portal_frame(1e-8),
        fixtures::portal_frame(1.0),
        fixtures::unrestrained_frame(),
    ];
    models.extend((0..6).map(|s| random_model(50 + s, 10 + 6 * s as usize)));
    for model in models {
        let map = build_dof_map(&model);
        let a = assemble::<f64>(&model, &map).unwrap();
        let n_s = a.n().min(6);
        let n_l = (a.n() - n_s).min(3);
        let eig = solve_extreme_eigenpairs(&a, n_s, n_l, &EigenOptions::default()).unwrap();
        check(&a, &eig, 1e-8);
    }
}

#[test]
fn invariants_on_random_matrices() {
    for (n, seed) in [(10, 5), (60, 6), (150, 7)] {
        let a = random_spd(n, seed);
        let eig = solve_extreme_eigenpairs(&a, 4, 4, &EigenOptions::default()).unwrap();
        check(&a, &eig, 1e-8);
    }
}

#[test]
fn deterministic_for_fixed_seed() {
    let a = random_spd(40, 9);
    let opts = EigenOptions::default();
    let x = solve_extreme_eigenpairs(&a, 3, 2, &opts).unwrap();
    let y = solve_extreme_eigenpairs(&a, 3, 2, &opts).unwrap();
    assert_eq!(x, y);
}

#[test]
fn free_spring_has_axial_null_vector() {
    let model = parse_model(
        r#"{"nodes": [{"id": 1, "x": 0, "y": 0}, {"id": 2, "x": 1, "y": 0}],
            "elements": [{"id": 1, "kind": "spring", "nodes": [1, 2], "props": {"k": 5}}],
            "restraints": [{"node": 1, "fixed": ["uy", "rz"]}, {"node": 2, "fixed": ["uy", "rz"]}]}"#,
    )
    .unwrap();
    let map = build_dof_map(&model);
    let a = assemble::<f64>(&model, &map).unwrap();
    let eig = solve_extreme_eigenpairs(&a, 1, 1, &EigenOptions::default()).unwrap();
    assert!(eig.smallest[0].value.abs() <= 1e-12);
    let u = &eig.smallest[0].vector;
    let (i, j) = (
        map.global(1, Dof::Ux).unwrap(),
        map.global(2, Dof::Ux).unwrap(),
    );
    assert!((u[i] - u[j]).abs() <= 1e-10 && (u[i].abs() - 0.5f64.sqrt()).abs() <= 1e-10);
    assert!((eig.largest[0].value - 10.0).abs() <= 1e-12);
}

#[test]
fn diagonal_example() {
    let a = Matrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0]);
    let eig = solve_extreme_eigenpairs(&a, 2, 1, &EigenOptions::default()).unwrap();
    let small: Vec<f64> = eig.smallest.iter().map(|p| p.value).collect();
    assert!((small[0] - 1.0).abs() < 1e-12 && (small[1] - 2.0).abs() < 1e-12);
    assert!((eig.largest[0].value - 4.0).abs() < 1e-12);
    for (p, axis) in eig.smallest.iter().chain(&eig.largest).zip([0, 1, 3]) {
        assert!((p.vector[axis].abs() - 1.0).abs() < 1e-10);
    }
}
