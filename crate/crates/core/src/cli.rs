//! Command-line experiment runner: configuration, seeding and artifacts.
//!
//! Every run writes `<subcommand>.json` into the output directory, holding
//! the tool version, the full resolved configuration and the result. Runs
//! with tabular output also write `<subcommand>.csv` (header row, 17
//! significant digits). Identical configurations give identical bytes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::accept::{acceptance_suite_with, Level};
use crate::digraph::RegularDigraph;
use crate::ensembles::{
    circular_law_experiment, compare_linear_stat, compare_stieltjes, sample_regular, ssv_tail, wegner_profile,
    ComparisonReport, PiecewiseLinear, ZMode,
};
use crate::error::{Error, Result};
use crate::factor::{factor_probability, find_regular_factor};
use crate::matrix::{fmt_sig, DenseMatrix};
use crate::netgeom::{
    bimodal_sets, build_flat_net, concentration_with_center, flatness_certificate, ConcentrationMode, UnitVector,
};
use crate::regularity::{check_codegree_with_tail, check_discrepancy, check_expansion, verify_expansion_consequences};
use crate::rng::{RngStream, SEED_ENV};
use crate::sampler::{chain_sample_with, default_chain_steps, enumerate_regular, rejection_sample, ChainProposal};
use crate::spectral::{eigenvalue_list, shifted_singular_values, singular_values};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status: run complete and every asserted check passed.
pub const EXIT_OK: i32 = 0;
/// Exit status: an asserted check failed.
pub const EXIT_ASSERTION: i32 = 1;
/// Exit status: bad usage or invalid parameters.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rdlab", version, about = "Experiments on uniform random regular digraphs")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonArgs {
    /// Master seed; defaults to $RDLAB_SEED, then 0.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving every artifact.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Which artifact is echoed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Draw elements of A_{n,d}.
    Sample(SampleArgs),
    /// Eigenvalues or singular values of a matrix or a sampled digraph.
    Spectrum(SpectrumArgs),
    /// Codegree, discrepancy and expansion checks.
    Regularity(RegularityArgs),
    /// Flat nets, concentration, flatness and bimodal sets.
    Netgeom(NetgeomArgs),
    /// Eigenvalue clouds of normalized regular digraphs against the circular law.
    Circlaw(CirclawArgs),
    /// Smallest singular value tail of A + Z.
    Ssv(SsvArgs),
    /// Small singular value profile of Y/sqrt(n) - z.
    Wegner(WegnerArgs),
    /// Ensemble comparisons of Stieltjes transforms or linear statistics.
    Compare(CompareArgs),
    /// Regular factors of a 0-1 matrix, or their frequency in Bernoulli matrices.
    Factor(FactorArgs),
    /// Run the acceptance suite.
    Accept(AcceptArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMethod {
    Chain,
    Rejection,
    Enumerate,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Proposal {
    Vertex,
    Edge,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = SampleMethod::Chain)]
    pub method: SampleMethod,
    /// Chain proposals; defaults to 10 n d ceil(ln(nd + 1)).
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, value_enum, default_value_t = Proposal::Vertex)]
    pub proposal: Proposal,
    /// Number of independent draws (ignored by enumerate).
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_tries: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Eigenvalues,
    SingularValues,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumArgs {
    /// Matrix CSV; without it a regular digraph is sampled from --n, --d.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    pub n: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value_t = SpectrumKind::Eigenvalues)]
    pub kind: SpectrumKind,
    /// Shift: singular values are those of M/sqrt(n) - z.
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    pub z: Complex64,
    /// Use the normalized matrix of the sampled digraph.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyArg {
    Codegree,
    Discrepancy,
    Expansion,
    Consequences,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityArgs {
    /// 0-1 matrix CSV; without it a regular digraph is sampled.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum)]
    pub property: PropertyArg,
    #[arg(long, default_value_t = 1.0)]
    pub tail_k: f64,
    #[arg(long, default_value_t = 0)]
    pub n0: usize,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.4)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetgeomOp {
    Net,
    Concentration,
    Flatness,
    Bimodal,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetgeomArgs {
    #[arg(long, value_enum)]
    pub op: NetgeomOp,
    /// Vector CSV, one component per line, for the non-net operations.
    #[arg(long = "in", required_if_eq_any([("op", "concentration"), ("op", "flatness"), ("op", "bimodal")]))]
    pub input: Option<PathBuf>,
    #[arg(long, required_if_eq("op", "net"))]
    pub n: Option<usize>,
    #[arg(long, required_if_eq_any([("op", "net"), ("op", "flatness"), ("op", "bimodal")]))]
    pub m: Option<usize>,
    #[arg(long)]
    pub rho: f64,
    /// Point-centre concentration instead of the exact disk search.
    #[arg(long)]
    pub fast: bool,
    /// Also write every net point to the CSV.
    #[arg(long)]
    pub points: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclawArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsvArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    pub z: Complex64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// CSV of a custom perturbation Z; replaces the scalar shift.
    #[arg(long)]
    pub custom_z: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WegnerArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    pub z: Complex64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Comma-separated eta grid; defaults to 0.02 k for k = 1..50.
    #[arg(long, value_delimiter = ',')]
    pub etas: Vec<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Stieltjes,
    Linear,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    pub stat: Statistic,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    pub z: Complex64,
    /// Spectral parameter for the Stieltjes comparison.
    #[arg(long, value_parser = parse_complex, default_value = "0+1i")]
    pub w: Complex64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Tent test function for the linear statistic: centre,half-width,height.
    #[arg(long, value_delimiter = ',', default_value = "0,1,1")]
    pub tent: Vec<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorArgs {
    /// 0-1 matrix CSV to search for a d-regular factor.
    #[arg(long = "in", conflicts_with = "prob", required_unless_present = "prob")]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "prob")]
    pub d: Option<usize>,
    /// Estimate the factor probability for Bernoulli(p) matrices.
    #[arg(long)]
    pub prob: bool,
    #[arg(long, required_if_eq("prob", "true"))]
    pub n: Option<usize>,
    #[arg(long, required_if_eq("prob", "true"))]
    pub p: Option<f64>,
    #[arg(long, required_if_eq("prob", "true"))]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Fast,
    Full,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
    pub level: LevelArg,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    Complex64::from_str(s.trim()).map_err(|_| format!("cannot parse {s:?} as a complex number such as 1+2i"))
}

/// A fully resolved run: the command plus a concrete seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

impl ExperimentConfig {
    /// Resolves the seed from the flag, then `RDLAB_SEED`, then 0.
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let seed = match cli.common.seed {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
                Err(_) => 0,
            },
        };
        Ok(Self {
            command: cli.command,
            seed,
            out: cli.common.out,
            format: cli.common.format,
        })
    }

    pub fn name(&self) -> &'static str {
        match self.command {
            Command::Sample(_) => "sample",
            Command::Spectrum(_) => "spectrum",
            Command::Regularity(_) => "regularity",
            Command::Netgeom(_) => "netgeom",
            Command::Circlaw(_) => "circlaw",
            Command::Ssv(_) => "ssv",
            Command::Wegner(_) => "wegner",
            Command::Compare(_) => "compare",
            Command::Factor(_) => "factor",
            Command::Accept(_) => "accept",
        }
    }

    fn rng(&self) -> RngStream {
        RngStream::new(self.seed, 0)
    }
}

/// A rectangular table written as CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push_f64(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt_sig(x)).collect());
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// `None` when nothing was asserted.
    pub pass: Option<bool>,
    pub result: Value,
    pub table: Option<Table>,
}

/// The outcome of [`run`]: exit status, artifact paths and the stdout echo.
#[derive(Debug)]
pub struct RunStatus {
    pub exit_code: i32,
    pub artifacts: Vec<PathBuf>,
    pub echo: String,
}

/// Runs one configuration and writes its artifacts.
pub fn run(config: &ExperimentConfig) -> Result<RunStatus> {
    let output = execute(config)?;
    fs::create_dir_all(&config.out)?;
    let name = config.name();
    let envelope = json!({
        "tool": "rdlab",
        "version": VERSION,
        "config": config,
        "pass": output.pass,
        "result": output.result,
    });
    let mut json_bytes = serde_json::to_vec_pretty(&envelope)?;
    json_bytes.push(b'\n');
    let json_path = config.out.join(format!("{name}.json"));
    fs::write(&json_path, &json_bytes)?;
    let mut artifacts = vec![json_path];
    let mut echo = String::from_utf8_lossy(&json_bytes).into_owned();
    if let Some(table) = &output.table {
        let bytes = table.to_csv()?;
        let csv_path = config.out.join(format!("{name}.csv"));
        fs::write(&csv_path, &bytes)?;
        artifacts.push(csv_path);
        if config.format == Format::Csv {
            echo = String::from_utf8_lossy(&bytes).into_owned();
        }
    }
    Ok(RunStatus {
        exit_code: if output.pass == Some(false) { EXIT_ASSERTION } else { EXIT_OK },
        artifacts,
        echo,
    })
}

/// Runs the configuration without touching the file system.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutput> {
    let rng = config.rng();
    match &config.command {
        Command::Sample(a) => run_sample(a, rng),
        Command::Spectrum(a) => run_spectrum(a, rng),
        Command::Regularity(a) => run_regularity(a, rng),
        Command::Netgeom(a) => run_netgeom(a),
        Command::Circlaw(a) => {
            let (report, clouds) = circular_law_experiment(a.n, a.d, a.samples, rng)?;
            let mut table = Table::new(&["sample", "re", "im"]);
            for (k, cloud) in clouds.iter().enumerate() {
                for z in cloud {
                    table.push_f64(&[k as f64, z.re, z.im]);
                }
            }
            Ok(RunOutput {
                pass: report.pass,
                result: serde_json::to_value(&report)?,
                table: Some(table),
            })
        }
        Command::Ssv(a) => {
            let mode = match &a.custom_z {
                Some(p) => ZMode::Custom {
                    matrix: read_matrix(p)?,
                    gamma: a.gamma,
                },
                None => ZMode::ScalarShift,
            };
            report_output(ssv_tail(a.n, a.d, a.z, &mode, a.samples, rng)?)
        }
        Command::Wegner(a) => {
            let etas = if a.etas.is_empty() {
                (1..=50).map(|k| 0.02 * k as f64).collect()
            } else {
                a.etas.clone()
            };
            report_output(wegner_profile(a.n, a.d, a.z, &etas, a.samples, rng)?)
        }
        Command::Compare(a) => match a.stat {
            Statistic::Stieltjes => report_output(compare_stieltjes(a.n, a.d, a.z, a.w, a.samples, rng)?),
            Statistic::Linear => {
                let [center, half, height] = a.tent[..] else {
                    return Err(Error::BadFunctionSpec("--tent needs centre,half-width,height".into()));
                };
                let f = PiecewiseLinear::tent(center, half, height)?;
                report_output(compare_linear_stat(a.n, a.d, a.z, &f, a.samples, rng)?)
            }
        },
        Command::Factor(a) => run_factor(a, rng),
        Command::Accept(a) => {
            let level = match a.level {
                LevelArg::Fast => Level::Fast,
                LevelArg::Full => Level::Full,
            };
            let summary = acceptance_suite_with(level, config.seed, |o| eprintln!("{o}"));
            let mut table = Table::new(&["criterion", "binding", "pass", "detail"]);
            for o in &summary.outcomes {
                table.rows.push(vec![o.id.to_string(), o.binding.to_string(), o.pass.to_string(), o.detail.clone()]);
            }
            Ok(RunOutput {
                pass: Some(summary.all_binding_pass()),
                result: serde_json::to_value(&summary)?,
                table: Some(table),
            })
        }
    }
}

fn report_output(report: ComparisonReport) -> Result<RunOutput> {
    let mut table = Table::new(&["sample"]);
    table.header.extend(report.columns.iter().cloned());
    for (k, row) in report.rows.iter().enumerate() {
        let mut line = vec![k as f64];
        line.extend_from_slice(row);
        table.push_f64(&line);
    }
    Ok(RunOutput {
        pass: report.pass,
        result: serde_json::to_value(&report)?,
        table: Some(table),
    })
}

fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    DenseMatrix::read_csv(fs::File::open(path)?)
}

fn read_vector(path: &Path) -> Result<Vec<Complex64>> {
    let m = read_matrix(path)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(Error::Parse(format!("expected a vector, got a {}x{} matrix", m.rows(), m.cols())));
    }
    Ok(m.entries().to_vec())
}

fn run_sample(a: &SampleArgs, rng: RngStream) -> Result<RunOutput> {
    let digraphs: Vec<RegularDigraph> = match a.method {
        SampleMethod::Enumerate => enumerate_regular(a.n, a.d)?,
        SampleMethod::Chain => {
            let proposal = match a.proposal {
                Proposal::Vertex => ChainProposal::Vertex,
                Proposal::Edge => ChainProposal::Edge,
            };
            let steps = a.steps.unwrap_or_else(|| default_chain_steps(a.n, a.d));
            (0..a.count as u64)
                .map(|k| chain_sample_with(a.n, a.d, steps, proposal, rng.child(k)))
                .collect::<Result<_>>()?
        }
        SampleMethod::Rejection => (0..a.count as u64)
            .map(|k| rejection_sample(a.n, a.d, rng.child(k), a.max_tries))
            .collect::<Result<_>>()?,
    };
    Ok(RunOutput {
        pass: None,
        result: json!({ "count": digraphs.len(), "digraphs": digraphs }),
        table: None,
    })
}

fn run_spectrum(a: &SpectrumArgs, rng: RngStream) -> Result<RunOutput> {
    let m = match &a.input {
        Some(p) => read_matrix(p)?,
        None => {
            let (n, d) = (a.n.unwrap_or(0), a.d.unwrap_or(0));
            let g = sample_regular(n, d, rng)?;
            if a.normalized {
                g.normalized()?
            } else {
                g.to_dense()
            }
        }
    };
    match a.kind {
        SpectrumKind::Eigenvalues => {
            let eigs = eigenvalue_list(&m)?;
            let mut table = Table::new(&["re", "im"]);
            for z in &eigs {
                table.push_f64(&[z.re, z.im]);
            }
            let spectral_radius = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(RunOutput {
                pass: None,
                result: json!({ "n": m.rows(), "kind": "eigenvalues", "spectral_radius": spectral_radius }),
                table: Some(table),
            })
        }
        SpectrumKind::SingularValues => {
            let sv = if a.z == Complex64::new(0.0, 0.0) && a.input.is_some() {
                singular_values(&m)?
            } else {
                shifted_singular_values(&m, a.z)?
            };
            let mut table = Table::new(&["singular_value"]);
            for &s in &sv.descending {
                table.push_f64(&[s]);
            }
            Ok(RunOutput {
                pass: None,
                result: json!({
                    "n": m.rows(),
                    "kind": "singular-values",
                    "largest": sv.largest(),
                    "smallest": sv.smallest(),
                }),
                table: Some(table),
            })
        }
    }
}

fn run_regularity(a: &RegularityArgs, rng: RngStream) -> Result<RunOutput> {
    let g = match &a.input {
        Some(p) => RegularDigraph::from_dense(&read_matrix(p)?, a.d)?,
        None => sample_regular(a.n.unwrap_or(0), a.d, rng)?,
    };
    let check = rng.child(1);
    let report = match a.property {
        PropertyArg::Codegree => check_codegree_with_tail(&g, a.tail_k),
        PropertyArg::Discrepancy => check_discrepancy(&g, a.n0, a.delta, a.budget, check)?,
        PropertyArg::Expansion => check_expansion(&g, a.kappa, a.budget, check)?,
        PropertyArg::Consequences => {
            let exp = check_expansion(&g, a.kappa, a.budget, check)?;
            verify_expansion_consequences(&g, &exp, a.budget, check.child(0))?
        }
    };
    Ok(RunOutput {
        pass: Some(report.verdict.is_pass()),
        result: json!({ "digraph": g, "report": report }),
        table: None,
    })
}

fn run_netgeom(a: &NetgeomArgs) -> Result<RunOutput> {
    let mode = if a.fast {
        ConcentrationMode::Fast
    } else {
        ConcentrationMode::Exact
    };
    let vector = || -> Result<UnitVector> {
        let path = a.input.as_deref().ok_or_else(|| Error::BadParams("--in is required".into()))?;
        Ok(UnitVector::new(read_vector(path)?))
    };
    let m = a.m.unwrap_or(0);
    match a.op {
        NetgeomOp::Net => {
            let net = build_flat_net(a.n.unwrap_or(0), m, a.rho)?;
            let table = a.points.then(|| {
                let mut header = vec!["index".to_string()];
                for j in 1..=net.n() {
                    header.push(format!("re{j}"));
                    header.push(format!("im{j}"));
                }
                let mut t = Table { header, rows: Vec::new() };
                for (i, p) in net.points().enumerate() {
                    let mut line = vec![i as f64];
                    for z in p.components() {
                        line.push(z.re);
                        line.push(z.im);
                    }
                    t.push_f64(&line);
                }
                t
            });
            Ok(RunOutput {
                pass: None,
                result: json!({
                    "n": net.n(),
                    "m": net.m(),
                    "rho": net.rho(),
                    "grid_steps": net.grid_steps(),
                    "cardinality": net.cardinality(),
                    "cardinality_bound": net.cardinality_bound(),
                    "coverage_radius": net.coverage_radius(),
                }),
                table,
            })
        }
        NetgeomOp::Concentration => {
            let (q, center) = concentration_with_center(&vector()?, a.rho, mode)?;
            Ok(RunOutput {
                pass: None,
                result: json!({ "rho": a.rho, "q": q, "center": center }),
                table: None,
            })
        }
        NetgeomOp::Flatness => {
            let cert = flatness_certificate(&vector()?, m, a.rho)?;
            Ok(RunOutput {
                pass: None,
                result: serde_json::to_value(&cert)?,
                table: None,
            })
        }
        NetgeomOp::Bimodal => {
            let sets = bimodal_sets(&vector()?, m, a.rho)?;
            Ok(RunOutput {
                pass: None,
                result: serde_json::to_value(&sets)?,
                table: None,
            })
        }
    }
}

fn run_factor(a: &FactorArgs, rng: RngStream) -> Result<RunOutput> {
    if a.prob {
        let (n, p, delta) = match (a.n, a.p, a.delta) {
            (Some(n), Some(p), Some(delta)) => (n, p, delta),
            _ => return Err(Error::BadParams("--prob needs --n, --p and --delta".into())),
        };
        let report = factor_probability(n, p, delta, a.samples, rng)?;
        return Ok(RunOutput {
            pass: None,
            result: serde_json::to_value(&report)?,
            table: None,
        });
    }
    let (Some(path), Some(d)) = (&a.input, a.d) else {
        return Err(Error::BadParams("--in and --d are required without --prob".into()));
    };
    let result = find_regular_factor(&read_matrix(path)?, d)?;
    Ok(RunOutput {
        pass: None,
        result: serde_json::to_value(&result)?,
        table: None,
    })
}

/// Parses `args`, runs, writes artifacts and returns the exit status.
/// Diagnostics go to `err`, the echo to `out`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let config = match ExperimentConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match run(&config) {
        Ok(status) => {
            let _ = out.write_all(status.echo.as_bytes());
            status.exit_code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Io(_) => EXIT_ASSERTION,
                _ => EXIT_USAGE,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> ExperimentConfig {
        let mut full = vec!["rdlab"];
        full.extend_from_slice(args);
        ExperimentConfig::from_cli(Cli::try_parse_from(full).unwrap()).unwrap()
    }

    #[test]
    fn config_roundtrips_through_json() {
        let c = parse(&["--seed", "7", "compare", "--stat", "stieltjes", "--n", "50", "--d", "5", "--z", "1+1i"]);
        let text = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn missing_degree_is_a_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(["rdlab", "sample", "--n", "4"], &mut out, &mut err);
        assert_eq!(code, EXIT_USAGE);
        assert!(String::from_utf8(err).unwrap().contains("--d"));
    }

    #[test]
    fn enumerate_lists_ninety() {
        let c = parse(&["sample", "--n", "4", "--d", "2", "--method", "enumerate"]);
        let out = execute(&c).unwrap();
        assert_eq!(out.result["count"], 90);
        assert_eq!(out.result["digraphs"].as_array().unwrap().len(), 90);
    }

    #[test]
    fn complex_flags_parse() {
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("-0.5").unwrap(), Complex64::new(-0.5, 0.0));
        assert!(parse_complex("one").is_err());
    }
}
