//! JSON stability report.
//!
//! Keys appear in a fixed order and every float is written with 17
//! significant digits, so identical inputs give byte-identical reports.
//! Non-finite values (an infinite condition number) are written as `null`.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::conditioning::ConditionEstimate;
use crate::eigen::EigenPair;
use crate::model::Model;
use crate::scalar::Scalar;
use crate::stability::{Cluster, EnergyKind, GapResult, StabilityAnalysis, StabilityParams};

pub const TOOL_NAME: &str = "msa";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the model file contents.
pub fn input_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub tool: ToolInfo,
    pub input: InputInfo,
    pub parameters: Parameters,
    pub model: ModelSummary,
    pub condition: ConditionReport,
    pub eigenvalues: EigenvalueReport,
    pub gap: GapReport,
    pub fields: Vec<FieldReport>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputInfo {
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Parameters {
    pub n_s: usize,
    pub n_l: usize,
    pub gf: f64,
    pub tol: f64,
    pub cond_threshold: f64,
    pub seed: u64,
    pub shift_factor: f64,
    pub scalar: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSummary {
    pub nodes: usize,
    pub elements: usize,
    pub free_dofs: usize,
    pub stored_entries: usize,
    pub norm1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    /// `null` means `+∞`.
    pub kappa: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub rank_tolerance: f64,
    pub threshold: f64,
    pub numerically_singular: bool,
    pub ill_conditioned: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueEntry {
    /// 1-based position in the ascending spectrum.
    pub index: usize,
    pub value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueReport {
    pub shift: f64,
    pub lanczos_vectors: [usize; 2],
    pub smallest: Vec<EigenvalueEntry>,
    pub largest: Vec<EigenvalueEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub k: usize,
    pub left: f64,
    pub right: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub k: Option<usize>,
    pub gf: f64,
    pub table: Vec<GapRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ElementEnergy {
    pub id: u64,
    pub raw: f64,
    pub normalized: f64,
    pub cluster: Cluster,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldReport {
    pub eigenvector: usize,
    pub kind: EnergyKind,
    pub eigenvalue: f64,
    pub degenerate: bool,
    pub separated: bool,
    pub suspects: Vec<u64>,
    pub elements: Vec<ElementEnergy>,
}

fn pairs<T: Scalar>(list: &[EigenPair<T>], first_index: usize) -> Vec<EigenvalueEntry> {
    list.iter()
        .enumerate()
        .map(|(i, p)| EigenvalueEntry {
            index: first_index + i,
            value: p.value.as_f64(),
            residual: p.residual.as_f64(),
        })
        .collect()
}

fn condition<T: Scalar>(c: &ConditionEstimate<T>) -> ConditionReport {
    ConditionReport {
        kappa: c.kappa.as_f64(),
        lambda_max: c.lambda_max.as_f64(),
        lambda_min: c.lambda_min.as_f64(),
        rank_tolerance: c.rank_tolerance.as_f64(),
        threshold: c.threshold,
        numerically_singular: c.is_singular(),
        ill_conditioned: c.ill_conditioned,
    }
}

fn gap<T: Scalar>(g: &GapResult<T>) -> GapReport {
    GapReport {
        k: g.k,
        gf: g.gf,
        table: g
            .table
            .iter()
            .map(|c| GapRow {
                k: c.k,
                left: c.left.as_f64(),
                right: c.right.as_f64(),
                holds: c.holds,
            })
            .collect(),
    }
}

impl StabilityReport {
    pub fn new<T: Scalar>(model: &Model, analysis: &StabilityAnalysis<T>, digest: String) -> Self {
        let StabilityParams {
            n_s,
            n_l,
            gf,
            tol,
            cond_threshold,
            seed,
            shift_factor,
        } = analysis.params;
        let eig = &analysis.eigen;
        let fields = analysis
            .fields
            .iter()
            .map(|f| FieldReport {
                eigenvector: f.eigen_index,
                kind: f.kind,
                eigenvalue: f.eigenvalue.as_f64(),
                degenerate: f.degenerate,
                separated: f.separated,
                suspects: f
                    .suspects()
                    .into_iter()
                    .map(|e| model.elements()[e].id)
                    .collect(),
                elements: model
                    .elements()
                    .iter()
                    .enumerate()
                    .map(|(e, el)| ElementEnergy {
                        id: el.id,
                        raw: f.raw[e].as_f64(),
                        normalized: f.normalized[e].as_f64(),
                        cluster: f.labels[e],
                    })
                    .collect(),
            })
            .collect();

        Self {
            tool: ToolInfo {
                name: TOOL_NAME,
                version: TOOL_VERSION,
            },
            input: InputInfo { sha256: digest },
            parameters: Parameters {
                n_s,
                n_l,
                gf,
                tol,
                cond_threshold,
                seed,
                shift_factor,
                scalar: T::NAME,
            },
            model: ModelSummary {
                nodes: model.nodes().len(),
                elements: model.elements().len(),
                free_dofs: analysis.dofmap.n(),
                stored_entries: analysis.matrix.nnz(),
                norm1: analysis.matrix.norm1().as_f64(),
            },
            condition: condition(&analysis.condition),
            eigenvalues: EigenvalueReport {
                shift: eig.shift.as_f64(),
                lanczos_vectors: [eig.steps.0, eig.steps.1],
                smallest: pairs(&eig.smallest, 1),
                largest: pairs(&eig.largest, eig.n - eig.largest.len() + 1),
            },
            gap: gap(&analysis.gap),
            fields,
            warnings: analysis.warnings.clone(),
        }
    }

    /// Deterministic pretty-printed JSON, newline terminated.
    pub fn to_json(&self) -> String {
        to_json_17(self)
    }
}

/// Serialize any value as pretty JSON with 17-significant-digit floats.
pub fn to_json_17<S: Serialize>(value: &S) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits::default());
    value
        .serialize(&mut ser)
        .expect("report serialization is infallible");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Pretty formatter that writes floats as `d.ddddddddddddddddde±x`.
#[derive(Default)]
struct SignificantDigits {
    inner: PrettyFormatter<'static>,
}

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}
