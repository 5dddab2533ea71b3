//! Element stiffness matrices and global assembly.

use thiserror::Error;

use crate::dense::DenseMatrix;
use crate::model::{DofMap, Element, ElementProps, Model, Node};
use crate::scalar::Scalar;
use crate::sparse::{SparseSymmetric, SymmetricBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("element {0} has zero length")]
    ZeroLength(u64),
    #[error("model has no free dofs (fully restrained)")]
    NoFreeDofs,
}

/// Local stiffness `K` and local-to-global rotation `T` of one element.
///
/// Both are `n_e × n_e`; the element's contribution in global axes is
/// `Tᵀ K T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementStiffness<T> {
    pub element_id: u64,
    pub k_local: DenseMatrix<T>,
    pub transform: DenseMatrix<T>,
}

impl<T: Scalar> ElementStiffness<T> {
    /// `Tᵀ K T`, exactly symmetrized.
    pub fn global(&self) -> DenseMatrix<T> {
        let mut g = self.transform.congruence(&self.k_local);
        let n = g.rows();
        let half = T::of(0.5);
        for i in 0..n {
            for j in i + 1..n {
                let avg = (g[(i, j)] + g[(j, i)]) * half;
                g[(i, j)] = avg;
                g[(j, i)] = avg;
            }
        }
        g
    }
}

/// Build `K⁽ᵉ⁾` and `T⁽ᵉ⁾` for an element whose ends sit at `a` and `b`.
///
/// Axial elements (spring, bar) use local dofs `(u1, v1, u2, v2)`; the
/// Euler–Bernoulli frame element uses `(u1, v1, θ1, u2, v2, θ2)`.
pub fn element_matrices<T: Scalar>(
    element: &Element,
    a: &Node,
    b: &Node,
) -> Result<ElementStiffness<T>, AssemblyError> {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let length = dx.hypot(dy);
    if !(length > 0.0) {
        return Err(AssemblyError::ZeroLength(element.id));
    }
    let c = T::of(dx / length);
    let s = T::of(dy / length);
    let zero = T::zero();

    let (k_local, transform) = match element.props {
        ElementProps::Spring { k } => axial(T::of(k), c, s),
        ElementProps::Bar { ea } => axial(T::of(ea / length), c, s),
        ElementProps::Beam2d { ea, ei } => {
            let l = length;
            let axial = T::of(ea / l);
            let k12 = T::of(12.0 * ei / (l * l * l));
            let k6 = T::of(6.0 * ei / (l * l));
            let k4 = T::of(4.0 * ei / l);
            let k2 = T::of(2.0 * ei / l);
            let k = DenseMatrix::from_rows(&[
                [axial, zero, zero, -axial, zero, zero],
                [zero, k12, k6, zero, -k12, k6],
                [zero, k6, k4, zero, -k6, k2],
                [-axial, zero, zero, axial, zero, zero],
                [zero, -k12, -k6, zero, k12, -k6],
                [zero, k6, k2, zero, -k6, k4],
            ]);
            let one = T::one();
            let r = [[c, s, zero], [-s, c, zero], [zero, zero, one]];
            (k, block_diagonal(&r))
        }
    };
    Ok(ElementStiffness {
        element_id: element.id,
        k_local,
        transform,
    })
}

fn axial<T: Scalar>(k: T, c: T, s: T) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let zero = T::zero();
    let stiffness = DenseMatrix::from_rows(&[
        [k, zero, -k, zero],
        [zero, zero, zero, zero],
        [-k, zero, k, zero],
        [zero, zero, zero, zero],
    ]);
    let r = [[c, s], [-s, c]];
    (stiffness, block_diagonal(&r))
}

fn block_diagonal<T: Scalar, const N: usize>(r: &[[T; N]; N]) -> DenseMatrix<T> {
    let mut t = DenseMatrix::zeros(2 * N, 2 * N);
    for block in 0..2 {
        for i in 0..N {
            for j in 0..N {
                t[(block * N + i, block * N + j)] = r[i][j];
            }
        }
    }
    t
}

/// Element matrices for every element, in model order.
pub fn all_element_matrices<T: Scalar>(
    model: &Model,
) -> Result<Vec<ElementStiffness<T>>, AssemblyError> {
    model
        .elements()
        .iter()
        .map(|e| {
            let (a, b) = model.element_ends(e);
            element_matrices(e, &a, &b)
        })
        .collect()
}

/// Assemble `A = Σₑ Tᵀ K T` scattered through `m_e`, restrained rows and
/// columns dropped.
///
/// Contributions are accumulated in order of element id, then local row,
/// then local column.
pub fn assemble<T: Scalar>(
    model: &Model,
    dofmap: &DofMap,
) -> Result<SparseSymmetric<T>, AssemblyError> {
    let matrices = all_element_matrices::<T>(model)?;
    assemble_from(&matrices, model, dofmap)
}

/// Assemble from precomputed element matrices (model order).
pub fn assemble_from<T: Scalar>(
    matrices: &[ElementStiffness<T>],
    model: &Model,
    dofmap: &DofMap,
) -> Result<SparseSymmetric<T>, AssemblyError> {
    if dofmap.n() == 0 {
        return Err(AssemblyError::NoFreeDofs);
    }
    let mut order: Vec<usize> = (0..model.elements().len()).collect();
    order.sort_by_key(|&i| model.elements()[i].id);

    let mut builder = SymmetricBuilder::new(dofmap.n());
    for idx in order {
        let g = matrices[idx].global();
        let m = dofmap.element_dofs(idx);
        for (r, gr) in m.iter().enumerate() {
            let Some(gr) = *gr else { continue };
            for (c, gc) in m.iter().enumerate() {
                let Some(gc) = *gc else { continue };
                if gr <= gc {
                    builder.add(gr, gc, g[(r, c)]);
                }
            }
        }
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_dof_map, Dof, Restraint};

    fn node(id: u64, x: f64, y: f64) -> Node {
        Node { id, x, y }
    }

    #[test]
    fn axis_aligned_spring() {
        let e = Element {
            id: 1,
            nodes: [1, 2],
            props: ElementProps::Spring { k: 2.0 },
        };
        let m = element_matrices::<f64>(&e, &node(1, 0.0, 0.0), &node(2, 3.0, 0.0)).unwrap();
        let expected = DenseMatrix::from_rows(&[
            [2.0, 0.0, -2.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [-2.0, 0.0, 2.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(m.global(), expected);
    }

    #[test]
    fn diagonal_bar() {
        let e = Element {
            id: 1,
            nodes: [1, 2],
            props: ElementProps::Bar { ea: 10.0 },
        };
        let h = 2.0f64.sqrt();
        let m = element_matrices::<f64>(&e, &node(1, 0.0, 0.0), &node(2, h, h)).unwrap();
        let g = m.global();
        for i in 0..4 {
            for j in 0..4 {
                let sign = if (i < 2) == (j < 2) { 1.0 } else { -1.0 };
                assert!(
                    (g[(i, j)] - sign * 2.5).abs() < 1e-14,
                    "{i},{j}: {}",
                    g[(i, j)]
                );
            }
        }
    }

    #[test]
    fn beam_transform_is_orthogonal() {
        let e = Element {
            id: 4,
            nodes: [1, 2],
            props: ElementProps::Beam2d { ea: 3.0, ei: 7.0 },
        };
        for (x, y) in [(0.0, 2.0), (1.0, 0.0), (-0.3, 0.8)] {
            let m = element_matrices::<f64>(&e, &node(1, 0.0, 0.0), &node(2, x, y)).unwrap();
            let tt = m.transform.transpose().matmul(&m.transform);
            assert!(tt.max_abs_diff(&DenseMatrix::identity(6)) <= 1e-14);
            assert!(m.k_local.is_symmetric());
        }
    }

    #[test]
    fn zero_length_rejected() {
        let e = Element {
            id: 9,
            nodes: [1, 2],
            props: ElementProps::Spring { k: 1.0 },
        };
        assert_eq!(
            element_matrices::<f64>(&e, &node(1, 1.0, 1.0), &node(2, 1.0, 1.0)),
            Err(AssemblyError::ZeroLength(9))
        );
    }

    fn spring(id: u64, a: u64, b: u64, k: f64) -> Element {
        Element {
            id,
            nodes: [a, b],
            props: ElementProps::Spring { k },
        }
    }

    fn fixed(node: u64, dofs: &[Dof]) -> Restraint {
        Restraint {
            node,
            fixed: dofs.to_vec(),
        }
    }

    #[test]
    fn single_spring_assembly() {
        let model = Model::new(
            vec![node(1, 0.0, 0.0), node(2, 1.0, 0.0)],
            vec![spring(1, 1, 2, 3.0)],
            vec![fixed(1, &Dof::ALL)],
        )
        .unwrap();
        let map = build_dof_map(&model);
        let a = assemble::<f64>(&model, &map).unwrap();
        assert_eq!(a.n(), 3);
        assert_eq!(
            a.to_dense(),
            DenseMatrix::from_rows(&[[3.0, 0.0, 0.0], [0.0; 3], [0.0; 3]])
        );
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn springs_in_series() {
        let model = Model::new(
            vec![node(1, 0.0, 0.0), node(2, 1.0, 0.0), node(3, 2.0, 0.0)],
            vec![spring(1, 1, 2, 1.0), spring(2, 2, 3, 1.0)],
            vec![
                fixed(1, &Dof::ALL),
                fixed(3, &Dof::ALL),
                fixed(2, &[Dof::Uy, Dof::Rz]),
            ],
        )
        .unwrap();
        let map = build_dof_map(&model);
        let a = assemble::<f64>(&model, &map).unwrap();
        assert_eq!(a.to_dense(), DenseMatrix::from_rows(&[[2.0]]));
    }

    #[test]
    fn fully_restrained_is_an_error() {
        let model = Model::new(
            vec![node(1, 0.0, 0.0), node(2, 1.0, 0.0)],
            vec![spring(1, 1, 2, 3.0)],
            vec![fixed(1, &Dof::ALL), fixed(2, &Dof::ALL)],
        )
        .unwrap();
        let map = build_dof_map(&model);
        assert_eq!(
            assemble::<f64>(&model, &map),
            Err(AssemblyError::NoFreeDofs)
        );
    }
}
