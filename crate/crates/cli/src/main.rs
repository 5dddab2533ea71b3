use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use msa_core::report::input_digest;
use msa_core::svg::{emit_svg, file_name, SvgStyle};
use msa_core::{
    assemble, build_dof_map, estimate_condition, parse_model, run_stability_analysis,
    AnalysisError, AssemblyError, EigenOptions, Model, StabilityParams, StabilityReport,
};

const EXIT_IO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_MODEL: u8 = 3;
const EXIT_SOLVER: u8 = 4;

/// Locate the parts of a finite-element model responsible for an ill-conditioned stiffness matrix.
#[derive(Debug, Parser)]
#[command(name = "msa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full stability analysis and write a JSON report.
    Analyze(AnalyzeArgs),
    /// Estimate the condition number of the stiffness matrix only.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    model: PathBuf,
    /// Number of smallest eigenpairs.
    #[arg(long, default_value_t = 8)]
    ns: usize,
    /// Number of largest eigenpairs.
    #[arg(long, default_value_t = 0)]
    nl: usize,
    /// Gap factor (>= 1).
    #[arg(long, default_value_t = 10.0)]
    gf: f64,
    /// Eigenpair residual tolerance, relative to the 1-norm of the matrix.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 1e10)]
    cond_threshold: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-eigenvector SVG plots.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    /// Comma-separated eigenvector indices to plot (default: all fields).
    #[arg(long, value_delimiter = ',', requires = "svg_dir")]
    svg_eigvec: Option<Vec<usize>>,
    /// Write the assembled matrix in coordinate format.
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    model: PathBuf,
    #[arg(long, default_value_t = 1e10)]
    cond_threshold: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Analyze(args) => analyze(&args),
        Command::Check(args) => check(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<(Model, Vec<u8>), Failure> {
    let bytes =
        fs::read(path).map_err(|e| Failure::new(EXIT_MODEL, format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Failure::new(EXIT_MODEL, format!("{}: not UTF-8: {e}", path.display())))?;
    let model = parse_model(text)
        .map_err(|e| Failure::new(EXIT_MODEL, format!("{}: {e}", path.display())))?;
    Ok((model, bytes))
}

fn analysis_failure(e: AnalysisError) -> Failure {
    let code = match e {
        AnalysisError::InvalidParameter(_) => EXIT_USAGE,
        AnalysisError::Assembly(_) => EXIT_MODEL,
        AnalysisError::Condition(_) | AnalysisError::Eigen(_) => EXIT_SOLVER,
    };
    Failure::new(code, e.to_string())
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let (model, bytes) = load(&args.model)?;
    let params = StabilityParams {
        n_s: args.ns,
        n_l: args.nl,
        gf: args.gf,
        tol: args.tol,
        cond_threshold: args.cond_threshold,
        seed: args.seed,
        ..Default::default()
    };
    let analysis = run_stability_analysis::<f64>(&model, &params).map_err(analysis_failure)?;

    if let Some(path) = &args.dump_matrix {
        let mut buf = Vec::new();
        analysis
            .matrix
            .write_coordinate(&mut buf)
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        write_file(path, &buf)?;
    }

    let report = StabilityReport::new(&model, &analysis, input_digest(&bytes));
    let json = report.to_json();
    match &args.out {
        Some(path) => write_file(path, json.as_bytes())?,
        None => {
            let mut out = BufWriter::new(io::stdout().lock());
            out.write_all(json.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        }
    }

    if let Some(dir) = &args.svg_dir {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", dir.display())))?;
        let style = SvgStyle::default();
        if let Some(list) = &args.svg_eigvec {
            for i in list {
                if !analysis.fields.iter().any(|f| f.eigen_index == *i) {
                    eprintln!("warning: no energy field for eigenvector {i}; nothing plotted");
                }
            }
        }
        for field in &analysis.fields {
            if args
                .svg_eigvec
                .as_ref()
                .is_some_and(|l| !l.contains(&field.eigen_index))
            {
                continue;
            }
            let path = dir.join(file_name(field));
            emit_svg(&model, field, &style, &path)
                .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
        }
    }

    for w in &analysis.warnings {
        eprintln!("warning: {w}");
    }
    if args.out.is_some() {
        summarize(&model, &analysis);
    }
    Ok(())
}

fn summarize(model: &Model, analysis: &msa_core::Analysis) {
    let c = &analysis.condition;
    if c.is_singular() {
        println!("kappa: inf (numerically singular)");
    } else {
        println!("kappa: {:.6e}", c.kappa);
    }
    match analysis.gap.k {
        Some(k) => println!("gap: k = {k}"),
        None => println!("gap: none"),
    }
    for f in &analysis.fields {
        let ids: Vec<String> = f
            .suspects()
            .into_iter()
            .map(|e| model.elements()[e].id.to_string())
            .collect();
        let kind = match f.kind {
            msa_core::EnergyKind::V => "v",
            msa_core::EnergyKind::S => "s",
        };
        println!(
            "eigenvector {} ({kind}): suspects [{}]",
            f.eigen_index,
            ids.join(", ")
        );
    }
}

fn check(args: &CheckArgs) -> Result<(), Failure> {
    let (model, _) = load(&args.model)?;
    let map = build_dof_map(&model);
    let a = assemble::<f64>(&model, &map)
        .map_err(|e: AssemblyError| Failure::new(EXIT_MODEL, e.to_string()))?;
    let opts = EigenOptions {
        tol: args.tol,
        seed: args.seed,
        ..Default::default()
    };
    let c = estimate_condition(&a, args.cond_threshold, &opts)
        .map_err(|e| Failure::new(EXIT_SOLVER, e.to_string()))?;
    if c.is_singular() {
        println!("kappa: inf (numerically singular)");
    } else {
        println!("kappa: {:.6e}", c.kappa);
    }
    println!("lambda_max: {:.6e}", c.lambda_max);
    println!("lambda_min: {:.6e}", c.lambda_min);
    if c.ill_conditioned {
        println!(
            "ill-conditioned (threshold {:e}); run `msa analyze` to locate the cause",
            c.threshold
        );
    } else {
        println!("well-conditioned (threshold {:e})", c.threshold);
    }
    Ok(())
}
