//! Command-line front end: every analysis takes JSON in and writes JSON out.

use std::fmt;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sosdeg::cones::{build_gram_slice, sos_check, ConeError, SosOptions, SosOutcome};
use sosdeg::json::ExactVec;
use sosdeg::polytope::{
    amgm_witness, classify, diagonal_gram_obstruction, h_star, is_k_normal, is_normal, normalized_volume, oracle,
    polytope_degree, real_density, sublattice_index, ClassificationReport, Density, HStar, LatticePoint,
    LatticePolytope, PolytopeError, SparsePolynomial,
};
use sosdeg::variety::{
    epsilon, hypersurface_model, is_minimal_degree, quadric_model, scroll_model, segre_veronese_model,
    toric_model, veronese_cone_model, veronese_model, QuadraticForm, VarietyError, VarietyModel,
};
use sosdeg::witness::{hilbert_witness_with, WitnessError, WitnessOptions, WitnessReport};

#[derive(Debug, Parser)]
#[command(name = "sosdeg", version, about = "Nonnegative forms, sums of squares and lattice polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// h*-vector, degree and normalized volume of a polytope.
    Hstar {
        #[command(flatten)]
        input: InputArg,
        /// Recompute by brute force and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Normality, or k-normality with `--k`.
    Normal {
        #[command(flatten)]
        input: InputArg,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        oracle: bool,
    },
    /// Full positivity classification of a polytope.
    Classify {
        #[command(flatten)]
        input: InputArg,
    },
    /// Sublattice index and density of the real points.
    Density {
        #[command(flatten)]
        input: InputArg,
    },
    /// AM-GM witness for a polytope that is not 2-normal.
    Amgm {
        #[command(flatten)]
        input: InputArg,
    },
    /// Quadratic deficiency of a model or of the toric model of a polytope.
    Epsilon {
        #[command(flatten)]
        input: InputArg,
    },
    /// SOS membership of a quadratic form on a model.
    SosCheck {
        #[command(flatten)]
        input: InputArg,
        /// Feasibility tolerance; the PSD tolerance is a tenth of it.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Nonnegative non-SOS form on the degree-d Veronese surface.
    Witness {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct InputArg {
    /// Path to a JSON file, or the JSON itself.
    #[arg(long)]
    pub input: String,
}

/// An error in the request itself; everything else is a computation error.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Invalid(msg.into()))
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

/// Exit status for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<Invalid>()) {
        EXIT_INVALID
    } else {
        EXIT_COMPUTATION
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HStarReport {
    pub coefficients: Vec<u64>,
    pub degree: usize,
    pub normalized_volume: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<HStarOracle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HStarOracle {
    pub coefficients: Vec<u64>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalReport {
    pub k: Option<u32>,
    pub normal: bool,
    pub counterexample: Option<LatticePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<NormalOracle>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalOracle {
    pub normal: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub sublattice_index: String,
    pub density: Density,
    pub criterion: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmgmReport {
    pub two_normal: bool,
    pub witness: Option<SparsePolynomial>,
    /// Exponent whose coefficient no sum of squares supported in `Q` can produce.
    pub obstruction: Option<LatticePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonReport {
    pub model: String,
    pub epsilon: usize,
    pub dim_r1: usize,
    pub dim_r2: usize,
    pub quadrics: usize,
    pub minimal_degree: bool,
}

/// Every report the CLI can emit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    HStar(HStarReport),
    Normal(NormalReport),
    Classify(Box<ClassificationReport>),
    Density(DensityReport),
    Amgm(AmgmReport),
    Epsilon(EpsilonReport),
    Sos(Box<SosOutcome>),
    Witness(Box<WitnessReport>),
}

#[derive(Debug, Deserialize)]
struct PolytopeInput {
    ambient_rank: Option<usize>,
    vertices: Vec<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum NamedModel {
    Veronese { n: usize, d: usize },
    SegreVeronese { dims: Vec<usize>, degrees: Vec<usize> },
    VeroneseCone { n: usize },
    Scroll { d: Vec<usize> },
    Quadric { n: usize },
    Hypersurface { n: usize, d: u64 },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ModelInput {
    Polytope(PolytopeInput),
    Named(NamedModel),
    Model(Box<VarietyModel>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FormInput {
    Wrapped(QuadraticForm),
    Bare(ExactVec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SosInput {
    model: ModelInput,
    form: FormInput,
    budget: Option<usize>,
}

fn read_input(arg: &str) -> Result<serde_json::Value> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| invalid(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| invalid(format!("input is not valid JSON: {e}")))
}

fn parse<T: serde::de::DeserializeOwned>(value: serde_json::Value, what: &str) -> Result<T> {
    serde_json::from_value(value).map_err(|e| invalid(format!("input is not a valid {what}: {e}")))
}

fn polytope_from(p: PolytopeInput) -> Result<LatticePolytope> {
    let rank = match (p.ambient_rank, p.vertices.first()) {
        (Some(r), _) => r,
        (None, Some(v)) => v.len(),
        (None, None) => return Err(invalid("a polytope needs at least one vertex")),
    };
    LatticePolytope::new(rank, p.vertices.into_iter().map(LatticePoint).collect()).map_err(polytope_error)
}

fn read_polytope(arg: &str) -> Result<LatticePolytope> {
    let value = read_input(arg)?;
    let p = match value {
        serde_json::Value::Array(_) => PolytopeInput { ambient_rank: None, vertices: parse(value, "vertex list")? },
        other => parse(other, "polytope")?,
    };
    polytope_from(p)
}

fn model_from(input: ModelInput) -> Result<VarietyModel> {
    let model = match input {
        ModelInput::Polytope(p) => return Ok(toric_model(&polytope_from(p)?)),
        ModelInput::Model(m) => return Ok(*m),
        ModelInput::Named(NamedModel::Veronese { n, d }) => veronese_model(n, d),
        ModelInput::Named(NamedModel::SegreVeronese { dims, degrees }) => segre_veronese_model(&dims, &degrees),
        ModelInput::Named(NamedModel::VeroneseCone { n }) => veronese_cone_model(n),
        ModelInput::Named(NamedModel::Scroll { d }) => scroll_model(&d),
        ModelInput::Named(NamedModel::Quadric { n }) => quadric_model(n),
        ModelInput::Named(NamedModel::Hypersurface { n, d }) => hypersurface_model(n, d),
    };
    model.map_err(variety_error)
}

fn polytope_error(e: PolytopeError) -> anyhow::Error {
    invalid(e.to_string())
}

fn variety_error(e: VarietyError) -> anyhow::Error {
    match e {
        VarietyError::InconsistentModel(_) => anyhow!(e),
        other => invalid(other.to_string()),
    }
}

fn cone_error(e: ConeError) -> anyhow::Error {
    match e {
        ConeError::InvalidArgument(_) | ConeError::DimensionMismatch { .. } => invalid(e.to_string()),
        other => anyhow!(other),
    }
}

fn witness_error(e: WitnessError) -> anyhow::Error {
    match e {
        WitnessError::InvalidArgument(_) => invalid(e.to_string()),
        other => anyhow!(other),
    }
}

/// Runs one command and returns its report.
pub fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Hstar { input, oracle } => {
            let q = read_polytope(&input.input)?;
            let h: HStar = h_star(&q);
            let check = if *oracle {
                let brute = oracle::brute_h_star(&q).context("brute-force recount failed")?;
                Some(HStarOracle { agrees: brute == h, coefficients: brute.coefficients })
            } else {
                None
            };
            let report = HStarReport {
                degree: polytope_degree(&q),
                normalized_volume: normalized_volume(&q).to_string(),
                coefficients: h.coefficients,
                oracle: check,
            };
            if report.oracle.as_ref().is_some_and(|o| !o.agrees) {
                return Err(anyhow!("oracle disagrees: {:?}", report));
            }
            Ok(Report::HStar(report))
        }
        Command::Normal { input, k, oracle } => {
            let q = read_polytope(&input.input)?;
            let (normal, counterexample) = match k {
                Some(0) => return Err(invalid("--k must be at least 1")),
                Some(k) => {
                    let r = is_k_normal(&q, *k);
                    (r.normal, r.counterexample)
                }
                None => (is_normal(&q), None),
            };
            let check = if *oracle {
                let brute = match k {
                    Some(k) => oracle::brute_is_k_normal(&q, *k),
                    None => oracle::brute_is_normal(&q),
                }
                .context("brute-force check failed")?;
                Some(NormalOracle { normal: brute, agrees: brute == normal })
            } else {
                None
            };
            let report = NormalReport { k: *k, normal, counterexample, oracle: check };
            if report.oracle.as_ref().is_some_and(|o| !o.agrees) {
                return Err(anyhow!("oracle disagrees: {:?}", report));
            }
            Ok(Report::Normal(report))
        }
        Command::Classify { input } => {
            let q = read_polytope(&input.input)?;
            Ok(Report::Classify(Box::new(classify(&q))))
        }
        Command::Density { input } => {
            let q = read_polytope(&input.input)?;
            if !q.is_full_dimensional() {
                return Err(invalid("density needs a full-dimensional polytope"));
            }
            Ok(Report::Density(DensityReport {
                sublattice_index: sublattice_index(&q).to_string(),
                density: real_density(&q),
                criterion: "index parity".into(),
            }))
        }
        Command::Amgm { input } => {
            let q = read_polytope(&input.input)?;
            let witness = amgm_witness(&q);
            let obstruction = witness.as_ref().and_then(|f| diagonal_gram_obstruction(f, &q));
            Ok(Report::Amgm(AmgmReport { two_normal: witness.is_none(), witness, obstruction }))
        }
        Command::Epsilon { input } => {
            let model = model_from(parse(read_input(&input.input)?, "model")?)?;
            Ok(Report::Epsilon(EpsilonReport {
                model: model.name().to_string(),
                epsilon: epsilon(&model).map_err(variety_error)?,
                dim_r1: model.r1_dim(),
                dim_r2: model.dim_r2(),
                quadrics: model.i2_len(),
                minimal_degree: is_minimal_degree(&model).map_err(variety_error)?,
            }))
        }
        Command::SosCheck { input, tol } => {
            let req: SosInput = parse(read_input(&input.input)?, "sos-check request")?;
            let model = model_from(req.model)?;
            let form = match req.form {
                FormInput::Wrapped(f) => f,
                FormInput::Bare(v) => QuadraticForm::new(v.0),
            };
            let mut opts = SosOptions::default();
            if let Some(b) = req.budget {
                opts.budget = b;
            }
            if let Some(t) = tol {
                if !(t.is_finite() && *t > 0.0) {
                    return Err(invalid("--tol must be a positive number"));
                }
                opts.feas_tol = *t;
                opts.sep_tol = *t;
                opts.psd_tol = t / 10.0;
            }
            let slice = build_gram_slice(&model).map_err(cone_error)?;
            let out = sos_check(&form, &slice, &opts).map_err(cone_error)?;
            Ok(Report::Sos(Box::new(out)))
        }
        Command::Witness { d, seed, samples } => {
            let mut opts = WitnessOptions::default();
            if let Some(s) = samples {
                if *s == 0 {
                    return Err(invalid("--samples must be positive"));
                }
                opts.samples = *s;
            }
            let report = hilbert_witness_with(*d, *seed, &opts).map_err(witness_error)?;
            Ok(Report::Witness(Box::new(report)))
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Report) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}
