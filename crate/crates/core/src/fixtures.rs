//! Reference models.
//!
//! The portal frame is six beam nodes and eight beam members, restrained so
//! that exactly seven dofs remain free:
//!
//! ```text
//!  node 1 (0,2) ── e2 ── node 3 (2,2)
//!     │                    │    ╲ e6
//!     e1                   e4    node 4 (3,1)
//!     │                    │    ╱ e5
//!  node 2 (0,0) ── e3 ── node 5 (2,0)
//!          ╲ e7          ╱ e8
//!            node 6 (1,-1)
//! ```
//!
//! Free dofs: `ux` of node 1, `rz` of node 2, `uy` of node 3, `ux`/`uy` of
//! node 4, `ux` of node 5 and `uy` of node 6. The connectivity graph of these
//! dofs has 7 vertices and 11 edges; node 6's `uy` is the dof reached only
//! through members 7 and 8.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Dof, Element, ElementProps, Model, Node, Restraint};
use crate::sparse::SparseSymmetric;

/// Axial rigidity of every portal-frame member.
pub const FRAME_EA: f64 = 1000.0;
/// Flexural rigidity of every portal-frame member.
pub const FRAME_EI: f64 = 100.0;

/// Members supplying all stiffness to the isolated dof.
pub const WEAK_MEMBERS: [u64; 2] = [7, 8];
/// Node carrying the isolated dof.
pub const WEAK_NODE: u64 = 6;
pub const WEAK_DOF: Dof = Dof::Uy;

/// Members supplying all stiffness to the second weak dof (`ux` of node 1).
pub const SECOND_WEAK_MEMBERS: [u64; 2] = [1, 2];
pub const SECOND_WEAK_NODE: u64 = 1;

fn frame_nodes() -> Vec<Node> {
    [
        (1, 0.0, 2.0),
        (2, 0.0, 0.0),
        (3, 2.0, 2.0),
        (4, 3.0, 1.0),
        (5, 2.0, 0.0),
        (6, 1.0, -1.0),
    ]
    .into_iter()
    .map(|(id, x, y)| Node { id, x, y })
    .collect()
}

fn frame_elements() -> Vec<Element> {
    [
        (1, 1, 2),
        (2, 1, 3),
        (3, 2, 5),
        (4, 3, 5),
        (5, 4, 5),
        (6, 3, 4),
        (7, 2, 6),
        (8, 5, 6),
    ]
    .into_iter()
    .map(|(id, a, b)| Element {
        id,
        nodes: [a, b],
        props: ElementProps::Beam2d {
            ea: FRAME_EA,
            ei: FRAME_EI,
        },
    })
    .collect()
}

fn frame_restraints() -> Vec<Restraint> {
    use Dof::*;
    [
        (1, vec![Uy, Rz]),
        (2, vec![Ux, Uy]),
        (3, vec![Ux, Rz]),
        (4, vec![Rz]),
        (5, vec![Uy, Rz]),
        (6, vec![Ux, Rz]),
    ]
    .into_iter()
    .map(|(node, fixed)| Restraint { node, fixed })
    .collect()
}

/// The restrained portal frame with members 7 and 8 scaled by `weak_factor`
/// (`1.0` gives the healthy frame).
pub fn portal_frame(weak_factor: f64) -> Model {
    Model::new(frame_nodes(), frame_elements(), frame_restraints())
        .expect("fixture is valid")
        .with_elements_scaled(|e| WEAK_MEMBERS.contains(&e.id), weak_factor)
        .expect("scaling keeps the fixture valid")
}

/// The portal frame with a second weak dof: members 1 and 2 are scaled by
/// `weak_factor` as well.
pub fn portal_frame_two_weak(weak_factor: f64) -> Model {
    portal_frame(weak_factor)
        .with_elements_scaled(|e| SECOND_WEAK_MEMBERS.contains(&e.id), weak_factor)
        .expect("scaling keeps the fixture valid")
}

/// The healthy portal frame with every restraint removed: 18 dofs and three
/// rigid-body modes.
pub fn unrestrained_frame() -> Model {
    portal_frame(1.0).unrestrained()
}

/// A random connected model with `elements` members.
///
/// Nodes sit on distinct points of an integer grid; members are mostly
/// `beam2d` with some bars and springs, stiffnesses log-uniform over three
/// decades. The lowest-numbered node is fully fixed and a few others are
/// partially restrained.
pub fn random_model(seed: u64, elements: usize) -> Model {
    assert!(elements >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_nodes = (elements * 2 / 3).max(2).min(elements + 1);
    let side = (2 * n_nodes) as i64;
    let mut used = BTreeSet::new();
    let mut nodes = Vec::with_capacity(n_nodes);
    while nodes.len() < n_nodes {
        let p = (rng.gen_range(0..side), rng.gen_range(0..side));
        if used.insert(p) {
            let id = nodes.len() as u64 + 1;
            nodes.push(Node {
                id,
                x: p.0 as f64 * 0.5,
                y: p.1 as f64 * 0.5,
            });
        }
    }

    let mut pairs: Vec<(u64, u64)> = (2..=n_nodes as u64)
        .map(|i| (rng.gen_range(1..i), i))
        .collect();
    while pairs.len() < elements {
        let a = rng.gen_range(1..=n_nodes as u64);
        let b = rng.gen_range(1..=n_nodes as u64);
        if a != b {
            pairs.push((a, b));
        }
    }
    pairs.shuffle(&mut rng);

    let elements: Vec<Element> = pairs
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let kind = rng.gen_range(0..10);
            let mut log_uniform = |base: f64| base * 10f64.powf(rng.gen_range(0.0..3.0));
            let props = match kind {
                0 => ElementProps::Spring {
                    k: log_uniform(1.0),
                },
                1 | 2 => ElementProps::Bar {
                    ea: log_uniform(10.0),
                },
                _ => ElementProps::Beam2d {
                    ea: log_uniform(10.0),
                    ei: log_uniform(1.0),
                },
            };
            Element {
                id: i as u64 + 1,
                nodes: [a, b],
                props,
            }
        })
        .collect();

    let mut restraints = vec![Restraint {
        node: 1,
        fixed: Dof::ALL.to_vec(),
    }];
    for id in 2..=n_nodes as u64 {
        if rng.gen_bool(0.2) {
            let fixed: Vec<Dof> = Dof::ALL.into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            if !fixed.is_empty() {
                restraints.push(Restraint { node: id, fixed });
            }
        }
    }
    Model::new(nodes, elements, restraints).expect("generated model is valid")
}

/// A random sparse symmetric positive definite matrix: a weighted graph
/// Laplacian with about three couplings per row, plus a positive diagonal.
pub fn random_spd(n: usize, seed: u64) -> SparseSymmetric<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trip = Vec::new();
    for i in 0..n {
        trip.push((i, i, rng.gen_range(0.01..1.0)));
        for _ in 0..3 {
            let j = rng.gen_range(0..n);
            if j != i {
                let w = 10f64.powf(rng.gen_range(-1.0..2.0));
                trip.push((i, i, w));
                trip.push((j, j, w));
                trip.push((i.min(j), i.max(j), -w));
            }
        }
    }
    SparseSymmetric::from_triplets(n, trip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_dof_map;

    #[test]
    fn seven_free_dofs() {
        let map = build_dof_map(&portal_frame(1.0));
        assert_eq!(map.n(), 7);
        assert_eq!(map.global(WEAK_NODE, WEAK_DOF), Some(6));
        assert_eq!(build_dof_map(&unrestrained_frame()).n(), 18);
    }

    #[test]
    fn random_models_are_valid_and_reproducible() {
        for seed in 0..20 {
            let m = random_model(seed, 5 + seed as usize);
            assert_eq!(m.elements().len(), 5 + seed as usize);
            assert_eq!(m, random_model(seed, 5 + seed as usize));
        }
    }

    #[test]
    fn weak_members_scaled() {
        let m = portal_frame(1e-8);
        for e in m.elements() {
            let expected = if WEAK_MEMBERS.contains(&e.id) {
                1e-8
            } else {
                1.0
            };
            assert_eq!(
                e.props,
                ElementProps::Beam2d {
                    ea: FRAME_EA * expected,
                    ei: FRAME_EI * expected
                }
            );
        }
    }
}
