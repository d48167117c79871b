//! Input sources: distribution files and named generators.

use std::path::PathBuf;

use bellrelax::error::{Error, Result};
use bellrelax::format::DistributionFile;
use bellrelax::num::Rational;
use bellrelax::quantum::{
    bilocal_distribution, cglmp2_optimal, chsh_distribution, double_singlet_xyz, ghz_distribution, i3322_mixture,
    nonmax_distribution, MeasurementSpec,
};
use bellrelax::sampling::{pr_box, random_local, random_nonsignalling_chsh};
use bellrelax::scenario::{Distribution, ScenarioSpec};
use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Werner singlet at the Tsirelson settings (`--v`, default 1).
    ChshQuantum,
    PrBox,
    /// Uniform CHSH distribution.
    Uniform,
    /// PR/white-noise mixture on three inputs (`--v`, default 1).
    I3322,
    /// Partially entangled state with Alice at (0, π, π/2) and Bob at
    /// (0, θ, -π) (`--eps`, default 0.3; `--theta`, default atan(2√(ε(1-ε)))).
    Nonmax,
    /// Optimal quantum point of `I_2`.
    Cglmp2,
    /// Entanglement swapping with two Werner states (`--v`, default 1).
    DoubleWerner,
    /// Two singlets, outer parties measuring X, Y, Z.
    DoubleSinglet,
    /// GHZ state with Mermin settings.
    Ghz,
    /// Mixture of random deterministic local points (`--seed`, `--inputs`).
    RandomLocal,
    /// Mixture of random CHSH nonsignalling vertices (`--seed`).
    RandomNs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rational,
    Float,
    /// Rational when the input is exact and the program has at most 1024
    /// strategies, float otherwise.
    Auto,
}

#[derive(Args, Clone, Debug)]
pub struct Source {
    /// Distribution JSON file.
    #[arg(long, conflicts_with = "gen")]
    pub input: Option<PathBuf>,
    /// Named generator.
    #[arg(long, value_enum)]
    pub gen: Option<Generator>,
    /// Visibility, parsed exactly (`0.85`, `17/20`).
    #[arg(long)]
    pub v: Option<String>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Inputs per party for `random-local`.
    #[arg(long, default_value_t = 2)]
    pub inputs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

/// A distribution as loaded, before a mode is chosen.
#[derive(Clone, Debug)]
pub enum Loaded {
    Exact(Distribution<Rational>),
    Float(Distribution<f64>),
}

impl Loaded {
    pub fn scenario(&self) -> &ScenarioSpec {
        match self {
            Loaded::Exact(p) => p.scenario(),
            Loaded::Float(p) => p.scenario(),
        }
    }
}

pub fn parse_rational(text: &str, what: &str) -> Result<Rational> {
    text.parse().map_err(|e: Error| Error::Parse(format!("{what}: {e}")))
}

fn visibility(src: &Source) -> Result<Rational> {
    match &src.v {
        Some(t) => parse_rational(t, "--v"),
        None => Ok(Rational::from_integer(1)),
    }
}

/// Reads a distribution file. Exact normalization is tried first; a file
/// within `1e-9` of normalized loads as floats.
pub fn load_file(path: &PathBuf) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file = DistributionFile::from_json(&text)?;
    match file.to_rational() {
        Ok(p) => Ok(Loaded::Exact(p)),
        Err(exact) => match file.to_float() {
            Ok(p) => Ok(Loaded::Float(p)),
            Err(_) => Err(exact),
        },
    }
}

pub fn generate(src: &Source, gen: Generator) -> Result<Loaded> {
    let mut rng = ChaCha8Rng::seed_from_u64(src.seed);
    Ok(match gen {
        Generator::ChshQuantum => Loaded::Float(chsh_distribution(visibility(src)?.to_f64())?),
        Generator::PrBox => Loaded::Exact(pr_box(0, 0, 0)),
        Generator::Uniform => Loaded::Exact(Distribution::uniform(ScenarioSpec::chsh())),
        Generator::I3322 => Loaded::Exact(i3322_mixture(&visibility(src)?)?),
        Generator::Nonmax => {
            let eps = src.eps.unwrap_or(0.3);
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::OutOfRange(format!("--eps {eps} must lie in [0, 1]")));
            }
            let theta = src.theta.unwrap_or_else(|| (2.0 * (eps * (1.0 - eps)).sqrt()).atan());
            let pi = std::f64::consts::PI;
            Loaded::Float(nonmax_distribution(eps, &[0.0, pi, pi / 2.0], &[0.0, theta, -pi])?)
        }
        Generator::Cglmp2 => Loaded::Float(cglmp2_optimal()?),
        Generator::DoubleWerner => Loaded::Exact(bilocal_distribution(&visibility(src)?)?),
        Generator::DoubleSinglet => Loaded::Exact(double_singlet_xyz()?),
        Generator::Ghz => Loaded::Float(ghz_distribution(&MeasurementSpec::mermin())?),
        Generator::RandomLocal => {
            let sc = ScenarioSpec::bipartite(src.inputs, src.inputs, 2, 2);
            Loaded::Exact(random_local(&sc, 4, &mut rng)?)
        }
        Generator::RandomNs => Loaded::Exact(random_nonsignalling_chsh(&mut rng)?),
    })
}

/// Exactly one of `--input` and `--gen`.
pub fn load(src: &Source) -> Result<Loaded> {
    match (&src.input, src.gen) {
        (Some(path), None) => load_file(path),
        (None, Some(g)) => generate(src, g),
        (None, None) => Err(Error::Parse("one of --input or --gen is required".into())),
        (Some(_), Some(_)) => Err(Error::Parse("--input and --gen are mutually exclusive".into())),
    }
}
