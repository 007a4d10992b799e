use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use curvdim::cd::{cd_curvature_exact, cd_verify_at};
use curvdim::identities::run_suite;
use curvdim::json::Real;
use curvdim::ricci::RicciFlatOutcome;
use curvdim::{
    cd_constant, limit_probe, ricci_flat, ricci_flat_at, search_report, ConditionSpec, ConstantConfig, CurvatureReport,
    Dimension, Family, GeneratorSpec, Graph, LimitOperator, PsiFunction, SearchConfig, Verdict, VertexFunction,
};

/// Curvature-dimension conditions, Ricci-flatness and ψ-constants on finite graphs.
#[derive(Parser)]
#[command(name = "curvdim", version)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph document.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long, num_args = 0.., value_delimiter = ',')]
        params: Vec<usize>,
    },
    /// Exact CD(d, K) curvature. Without --kappa, reports the optimal K per vertex.
    Cd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dim: Dimension,
        #[arg(long, allow_negative_numbers = true)]
        kappa: Option<f64>,
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Multistart search for violations of a nonlinear condition.
    Check {
        #[arg(long, value_enum)]
        condition: Condition,
        #[arg(long)]
        psi: Option<PsiFunction>,
        #[arg(long)]
        phi: Option<PsiFunction>,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dim: Dimension,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Estimate the constant C_ψ^φ.
    Constant {
        #[arg(long)]
        psi: PsiFunction,
        #[arg(long)]
        phi: PsiFunction,
        /// Half-width of the search box in log coordinates.
        #[arg(long = "box")]
        box_half_width: Option<f64>,
        /// Grid points per axis.
        #[arg(long)]
        grid: Option<usize>,
        /// Number of refinement starts.
        #[arg(long)]
        refine: Option<usize>,
    },
    /// Decide D-Ricci-flatness, at one vertex or for the whole graph.
    RicciFlat {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Randomized checks of the exact identities between the two calculi.
    Identities {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Small-ε limits of the rescaled ψ-operators at 1 + εf.
    Limits {
        #[arg(long)]
        psi: PsiFunction,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "f")]
        function: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Condition {
    Cde,
    CdePrime,
    Cdpsi,
    Cdphipsi,
}

/// What a subcommand hands back to `main`.
struct Outcome {
    report: String,
    /// The report carries a violation witness or a refutation.
    negative: bool,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Outcome { report, negative: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command).and_then(|outcome| emit(cli.out.as_deref(), outcome)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, outcome: Outcome) -> Result<ExitCode> {
    let mut text = outcome.report;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(if outcome.negative { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::from_document(&text).with_context(|| format!("parsing graph {}", path.display()))
}

fn read_function(path: &Path) -> Result<VertexFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    VertexFunction::from_document(&text).with_context(|| format!("parsing function {}", path.display()))
}

fn pretty<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("report serializes")
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Gen { family, params } => {
            let g = Graph::generate(&GeneratorSpec::new(family, params))?;
            Ok(Outcome::ok(g.to_document()))
        }
        Command::Cd { graph, dim, kappa, vertex } => {
            let g = read_graph(&graph)?;
            let vertices: Vec<usize> = match vertex {
                Some(v) => {
                    g.check_vertex(v)?;
                    vec![v]
                }
                None => (0..g.vertex_count()).collect(),
            };
            match kappa {
                Some(kappa) => cd_check(&g, dim, kappa, &vertices),
                None => cd_curvatures(&g, dim, &vertices),
            }
        }
        Command::Check { condition, psi, phi, graph, dim, kappa, starts, seed } => {
            let g = read_graph(&graph)?;
            let spec = match condition {
                Condition::Cde => ConditionSpec::cde(dim, kappa)?,
                Condition::CdePrime => ConditionSpec::cde_prime(dim, kappa)?,
                Condition::Cdpsi => ConditionSpec::cd_psi(psi.context("cdpsi needs --psi")?, dim, kappa)?,
                Condition::Cdphipsi => ConditionSpec::cd_phi_psi(
                    psi.context("cdphipsi needs --psi")?,
                    phi.context("cdphipsi needs --phi")?,
                    dim,
                    kappa,
                )?,
            };
            let report = search_report(&g, &spec, &SearchConfig::new(seed).with_starts(starts))?;
            Ok(Outcome { negative: report.verdict == Verdict::Violated, report: report.to_document() })
        }
        Command::Constant { psi, phi, box_half_width, grid, refine } => {
            let defaults = ConstantConfig::default();
            let config = ConstantConfig {
                box_half_width: box_half_width.unwrap_or(defaults.box_half_width),
                grid: grid.unwrap_or(defaults.grid),
                refine_starts: refine.unwrap_or(defaults.refine_starts),
                ..defaults
            };
            Ok(Outcome::ok(cd_constant(&psi, &phi, &config)?.to_document()))
        }
        Command::RicciFlat { graph, vertex } => {
            let g = read_graph(&graph)?;
            let (report, flat) = match vertex {
                Some(v) => {
                    let outcome = ricci_flat_at(&g, v)?;
                    inconclusive_check(std::slice::from_ref(&outcome))?;
                    (outcome.to_json(), outcome.is_certified())
                }
                None => {
                    let report = ricci_flat(&g);
                    inconclusive_check(&report.outcomes)?;
                    (report.to_json(), report.ricci_flat)
                }
            };
            Ok(Outcome { report: pretty(&report), negative: !flat })
        }
        Command::Identities { graph, trials, seed } => {
            let g = read_graph(&graph)?;
            let report = run_suite(&g, trials, seed)?;
            Ok(Outcome { negative: !report.passed(), report: report.to_document() })
        }
        Command::Limits { psi, graph, function } => {
            let g = read_graph(&graph)?;
            let f = read_function(&function)?;
            limits(&g, &psi, &f)
        }
    }
}

/// A search that ran out of budget refutes nothing, so it cannot be reported
/// with exit code 1.
fn inconclusive_check(outcomes: &[RicciFlatOutcome]) -> Result<()> {
    for outcome in outcomes {
        if let RicciFlatOutcome::Refuted(r) = outcome {
            if !r.is_conclusive() {
                bail!("backtracking budget exhausted at vertex {}; no verdict", r.vertex);
            }
        }
    }
    Ok(())
}

fn cd_check(g: &Graph, dim: Dimension, kappa: f64, vertices: &[usize]) -> Result<Outcome> {
    let spec = ConditionSpec::cd(dim, kappa)?;
    let reports = vertices.iter().map(|&v| cd_verify_at(g, &spec, v)).collect::<curvdim::Result<Vec<_>>>()?;
    let report = CurvatureReport::from_vertices(spec.label(), dim, kappa, reports, None);
    Ok(Outcome { negative: report.verdict == Verdict::Violated, report: report.to_document() })
}

#[derive(Serialize)]
struct CurvatureDocument {
    dim: Dimension,
    min_kappa: Real,
    vertices: Vec<VertexCurvature>,
}

#[derive(Serialize)]
struct VertexCurvature {
    v: usize,
    kappa: Real,
}

fn cd_curvatures(g: &Graph, dim: Dimension, vertices: &[usize]) -> Result<Outcome> {
    let vertices = vertices
        .iter()
        .map(|&v| Ok(VertexCurvature { v, kappa: Real(cd_curvature_exact(g, dim, v)?) }))
        .collect::<Result<Vec<_>>>()?;
    let min_kappa = Real(vertices.iter().map(|c| c.kappa.0).fold(f64::INFINITY, f64::min));
    Ok(Outcome::ok(pretty(&CurvatureDocument { dim, min_kappa, vertices })))
}

#[derive(Serialize)]
struct LimitDocument<'a> {
    psi: &'a str,
    probes: Vec<ProbeDocument>,
}

#[derive(Serialize)]
struct ProbeDocument {
    v: usize,
    operator: LimitOperator,
    estimated_limit: Real,
    reference_value: Real,
    abs_error: Real,
    observed_order: Option<Real>,
}

fn limits(g: &Graph, psi: &PsiFunction, f: &VertexFunction) -> Result<Outcome> {
    let mut probes = Vec::new();
    for v in 0..g.vertex_count() {
        for operator in LimitOperator::ALL {
            let r = limit_probe(g, psi, f, operator, v)?;
            probes.push(ProbeDocument {
                v,
                operator,
                estimated_limit: Real(r.estimated_limit),
                reference_value: Real(r.reference_value),
                abs_error: Real((r.estimated_limit - r.reference_value).abs()),
                observed_order: r.observed_order.map(Real),
            });
        }
    }
    Ok(Outcome::ok(pretty(&LimitDocument { psi: psi.name(), probes })))
}
