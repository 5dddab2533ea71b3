//! Spectral-gap detection, per-element virtual energies and two-way
//! clustering.
//!
//! Eigenvectors belonging to a cluster of tiny eigenvalues are concentrated
//! on the dofs of weakly connected parts of the model. Restricting each such
//! eigenvector to the dofs of every element gives a per-element energy that
//! is large only on the elements touching those dofs:
//!
//! * `v⁽ᵉ⁾ = ½ u(m_e)ᵀ u(m_e)` for the eigenvectors inside the gap,
//! * `s⁽ᵉ⁾ = ½ u(m_e)ᵀ Tᵀ K T u(m_e)` for the largest eigenpairs.
//!
//! Both are scaled so the largest element value is 1 and then split into a
//! suspect and a sound cluster.

use serde::Serialize;
use thiserror::Error;

use crate::assembly::{all_element_matrices, assemble_from, AssemblyError, ElementStiffness};
use crate::conditioning::{estimate_condition, rank_tolerance, ConditionError, ConditionEstimate};
use crate::eigen::{solve_extreme_eigenpairs, EigenError, EigenOptions, EigenSet};
use crate::model::{build_dof_map, DofMap, Model};
use crate::scalar::Scalar;
use crate::sparse::SparseSymmetric;

/// Warning emitted when no spectral gap is found among the smallest pairs.
pub const NO_GAP_WARNING: &str = "no spectral gap; try a larger n_s";

/// Normalized energies below this are treated as this value when splitting.
pub const CLUSTER_FLOOR: f64 = 1e-15;

/// Consecutive sorted energies must differ by at least this factor for the
/// field to be split into two clusters.
pub const MIN_SEPARATION_RATIO: f64 = 100.0;

/// One row of the gap test: `left = λ_{k−1}/λ_k` (taken as 1 at `k = 1`)
/// against `right = gf·λ_k/λ_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapCandidate<T> {
    pub k: usize,
    pub left: T,
    pub right: T,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapResult<T> {
    /// 1-based index of the last eigenvalue in the small cluster.
    pub k: Option<usize>,
    pub gf: f64,
    pub table: Vec<GapCandidate<T>>,
}

/// Find the smallest `k < n_s` with `λ_{k−1}/λ_k > gf·λ_k/λ_{k+1}`.
///
/// Eigenvalues at or below [`Scalar::gap_floor`] are clamped to it first, so
/// exact zeros register as maximal gaps. Fewer than two eigenvalues never
/// produce a gap.
pub fn detect_gap<T: Scalar>(lambdas: &[T], gf: f64) -> GapResult<T> {
    let floor = T::gap_floor();
    let lam: Vec<T> = lambdas.iter().map(|&l| l.max(floor)).collect();
    let gf_t = T::of(gf);
    let mut table = Vec::new();
    let mut k_found = None;
    for k in 1..lam.len() {
        let left = if k == 1 {
            T::one()
        } else {
            lam[k - 2] / lam[k - 1]
        };
        let right = gf_t * (lam[k - 1] / lam[k]);
        let holds = left > right;
        table.push(GapCandidate {
            k,
            left,
            right,
            holds,
        });
        if holds && k_found.is_none() {
            k_found = Some(k);
        }
    }
    GapResult {
        k: k_found,
        gf,
        table,
    }
}

/// Replace eigenvalues at or below `tolerance` by exact zeros.
pub fn snap_numerical_zeros<T: Scalar>(lambdas: &[T], tolerance: T) -> Vec<T> {
    lambdas
        .iter()
        .map(|&l| if l <= tolerance { T::zero() } else { l })
        .collect()
}

fn gather<T: Scalar>(u: &[T], m: &[Option<usize>]) -> Vec<T> {
    m.iter().map(|j| j.map_or(T::zero(), |j| u[j])).collect()
}

/// `v⁽ᵉ⁾ = ½ Σ_{j ∈ m_e} u_j²` for every element, restrained entries
/// contributing nothing.
pub fn energy_v<T: Scalar>(u: &[T], dofmap: &DofMap) -> Vec<T> {
    let half = T::of(0.5);
    (0..dofmap.num_elements())
        .map(|e| {
            dofmap
                .element_dofs(e)
                .iter()
                .flatten()
                .map(|&j| u[j] * u[j])
                .sum::<T>()
                * half
        })
        .collect()
}

/// `s⁽ᵉ⁾ = ½ u(m_e)ᵀ Tᵀ K T u(m_e)` for every element, clamped at zero.
pub fn energy_s<T: Scalar>(u: &[T], matrices: &[ElementStiffness<T>], dofmap: &DofMap) -> Vec<T> {
    let half = T::of(0.5);
    matrices
        .iter()
        .enumerate()
        .map(|(e, m)| {
            let x = gather(u, dofmap.element_dofs(e));
            let gx = m.global().matvec(&x);
            let s = x.iter().zip(&gx).map(|(&a, &b)| a * b).sum::<T>() * half;
            s.max(T::zero())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized<T> {
    pub values: Vec<T>,
    /// The input was identically zero; `values` are all zero.
    pub degenerate: bool,
}

/// Divide by the maximum so the largest value is exactly 1.
pub fn normalize_energies<T: Scalar>(raw: &[T]) -> Normalized<T> {
    let max = raw.iter().copied().fold(T::zero(), T::max);
    if !(max > T::zero()) {
        return Normalized {
            values: vec![T::zero(); raw.len()],
            degenerate: true,
        };
    }
    Normalized {
        values: raw.iter().map(|&v| v / max).collect(),
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cluster {
    Suspect,
    Sound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub labels: Vec<Cluster>,
    /// False when no consecutive ratio reached [`MIN_SEPARATION_RATIO`]; every
    /// element is then suspect.
    pub separated: bool,
    /// Ratio across the chosen split (1 when not separated).
    pub ratio: f64,
}

impl Partition {
    pub fn suspects(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Cluster::Suspect)
            .map(|(i, _)| i)
    }
}

/// Split normalized energies at the largest gap in log-value.
///
/// Values are sorted descending and clamped below at [`CLUSTER_FLOOR`]; the
/// split falls between the consecutive pair with the largest ratio, the
/// earliest such pair on ties. Elements above the split are suspect.
pub fn partition_two_clusters<T: Scalar>(values: &[T]) -> Partition {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let clamped: Vec<f64> = order
        .iter()
        .map(|&i| values[i].as_f64().max(CLUSTER_FLOOR))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for i in 0..clamped.len().saturating_sub(1) {
        let gap = clamped[i].ln() - clamped[i + 1].ln();
        if best.is_none_or(|(_, g)| gap > g) {
            best = Some((i, gap));
        }
    }

    match best {
        Some((split, gap)) if gap >= MIN_SEPARATION_RATIO.ln() => {
            let mut labels = vec![Cluster::Sound; values.len()];
            for &i in &order[..=split] {
                labels[i] = Cluster::Suspect;
            }
            Partition {
                labels,
                separated: true,
                ratio: gap.exp(),
            }
        }
        _ => Partition {
            labels: vec![Cluster::Suspect; values.len()],
            separated: false,
            ratio: 1.0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    /// `v⁽ᵉ⁾`, from eigenvectors inside the spectral gap.
    V,
    /// `s⁽ᵉ⁾`, from the largest eigenpairs.
    S,
}

/// Energies of one eigenvector over all elements (model order).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyField<T> {
    /// 1-based position of the eigenvalue in the full ascending spectrum.
    pub eigen_index: usize,
    pub kind: EnergyKind,
    pub eigenvalue: T,
    pub raw: Vec<T>,
    pub normalized: Vec<T>,
    pub labels: Vec<Cluster>,
    pub degenerate: bool,
    pub separated: bool,
}

impl<T: Scalar> EnergyField<T> {
    pub fn from_raw(eigen_index: usize, kind: EnergyKind, eigenvalue: T, raw: Vec<T>) -> Self {
        let Normalized { values, degenerate } = normalize_energies(&raw);
        let (labels, separated) = if degenerate {
            (vec![Cluster::Sound; raw.len()], false)
        } else {
            let p = partition_two_clusters(&values);
            (p.labels, p.separated)
        };
        Self {
            eigen_index,
            kind,
            eigenvalue,
            raw,
            normalized: values,
            labels,
            degenerate,
            separated,
        }
    }

    /// Positions (model order) of suspect elements.
    pub fn suspects(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Cluster::Suspect)
            .map(|(i, _)| i)
            .collect()
    }

    /// Normalized value with out-of-cluster entries mapped to zero.
    pub fn display_value(&self, e: usize) -> T {
        match self.labels[e] {
            Cluster::Suspect => self.normalized[e],
            Cluster::Sound => T::zero(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityParams {
    pub n_s: usize,
    pub n_l: usize,
    pub gf: f64,
    pub tol: f64,
    pub cond_threshold: f64,
    pub seed: u64,
    pub shift_factor: f64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        Self {
            n_s: 8,
            n_l: 0,
            gf: 10.0,
            tol: 1e-8,
            cond_threshold: crate::conditioning::DEFAULT_THRESHOLD,
            seed: 42,
            shift_factor: 1e-8,
        }
    }
}

impl StabilityParams {
    pub fn eigen_options(&self) -> EigenOptions {
        EigenOptions {
            tol: self.tol,
            seed: self.seed,
            shift_factor: self.shift_factor,
            max_steps: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("condition estimate failed: {0}")]
    Condition(#[from] ConditionError),
    #[error("eigensolver failed: {0}")]
    Eigen(#[from] EigenError),
}

/// Everything produced by one stability run.
#[derive(Debug, Clone)]
pub struct StabilityAnalysis<T> {
    pub params: StabilityParams,
    pub dofmap: DofMap,
    pub matrix: SparseSymmetric<T>,
    pub condition: ConditionEstimate<T>,
    pub eigen: EigenSet<T>,
    /// Smallest eigenvalues after snapping numerical zeros, as fed to the gap test.
    pub gap_input: Vec<T>,
    pub gap: GapResult<T>,
    /// `v` fields for eigenvectors `1..=k`, then `s` fields for the largest pairs.
    pub fields: Vec<EnergyField<T>>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> StabilityAnalysis<T> {
    pub fn field(&self, kind: EnergyKind, eigen_index: usize) -> Option<&EnergyField<T>> {
        self.fields
            .iter()
            .find(|f| f.kind == kind && f.eigen_index == eigen_index)
    }
}

fn check_params(p: &StabilityParams) -> Result<(), AnalysisError> {
    let bad = |m: &str| Err(AnalysisError::InvalidParameter(m.to_string()));
    if p.n_s == 0 && p.n_l == 0 {
        return bad("n_s and n_l cannot both be zero");
    }
    if !(p.gf >= 1.0) || !p.gf.is_finite() {
        return bad("gf must be a finite number >= 1");
    }
    if !(p.tol > 0.0) || !p.tol.is_finite() {
        return bad("tol must be positive");
    }
    if !(p.cond_threshold > 0.0) {
        return bad("condition threshold must be positive");
    }
    if !(p.shift_factor > 0.0) || !p.shift_factor.is_finite() {
        return bad("shift factor must be positive");
    }
    Ok(())
}

/// Assemble, estimate conditioning, solve for the extreme eigenpairs, find
/// the spectral gap and build the clustered energy fields.
pub fn run_stability_analysis<T: Scalar>(
    model: &Model,
    params: &StabilityParams,
) -> Result<StabilityAnalysis<T>, AnalysisError> {
    check_params(params)?;
    let dofmap = build_dof_map(model);
    let matrices = all_element_matrices::<T>(model)?;
    let matrix = assemble_from(&matrices, model, &dofmap)?;
    let options = params.eigen_options();

    let mut warnings = Vec::new();
    let n = dofmap.n();
    let n_s = params.n_s.min(n);
    let n_l = params.n_l.min(n - n_s);
    if (n_s, n_l) != (params.n_s, params.n_l) {
        warnings.push(format!(
            "only {n} free dofs; computing n_s = {n_s}, n_l = {n_l} instead of n_s = {}, n_l = {}",
            params.n_s, params.n_l
        ));
    }

    let condition = estimate_condition(&matrix, params.cond_threshold, &options)?;
    let eigen = solve_extreme_eigenpairs(&matrix, n_s, n_l, &options)?;

    let smallest: Vec<T> = eigen.smallest.iter().map(|p| p.value).collect();
    let gap_input = snap_numerical_zeros(&smallest, rank_tolerance(&matrix));
    let gap = detect_gap(&gap_input, params.gf);

    let mut fields = Vec::new();
    match gap.k {
        Some(k) => {
            for (i, pair) in eigen.smallest.iter().take(k).enumerate() {
                let raw = energy_v(&pair.vector, &dofmap);
                fields.push(EnergyField::from_raw(i + 1, EnergyKind::V, pair.value, raw));
            }
        }
        None => warnings.push(NO_GAP_WARNING.to_string()),
    }
    for (j, pair) in eigen.largest.iter().enumerate() {
        let raw = energy_s(&pair.vector, &matrices, &dofmap);
        fields.push(EnergyField::from_raw(
            eigen.largest_index(j),
            EnergyKind::S,
            pair.value,
            raw,
        ));
    }
    for f in &fields {
        let name = match f.kind {
            EnergyKind::V => "v",
            EnergyKind::S => "s",
        };
        if f.degenerate {
            warnings.push(format!(
                "eigenvector {} ({name}): energy is zero on every element; not clustered",
                f.eigen_index
            ));
        } else if !f.separated {
            warnings.push(format!(
                "eigenvector {} ({name}): no separation between clusters; all elements marked suspect",
                f.eigen_index
            ));
        }
    }

    Ok(StabilityAnalysis {
        params: *params,
        dofmap,
        matrix,
        condition,
        eigen,
        gap_input,
        gap,
        fields,
        warnings,
    })
}
