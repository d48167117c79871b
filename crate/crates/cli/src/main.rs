use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bellrelax::bilocality::{min_bilocality, min_bilocality_at, nested_scan, BilocalProgram, Grid, ScanOptions};
use bellrelax::error::{Error, Result};
use bellrelax::format::DistributionFile;
use bellrelax::functionals::{
    bilocal_b, bilocal_ij, cglmp, chsh, chsh_max, i3322, i_a_to_b, load_functional_str, mermin, BellFunctional,
};
use bellrelax::measures::{
    causal_influence_functionals, min_causal_influence, min_causal_influence_given_value, min_communication,
    InfluenceVariant, MdProgram, MdTarget, MeasureKind,
};
use bellrelax::num::{format_sig, Rational, Scalar};
use bellrelax::scenario::{CausalModel, Distribution, ScenarioSpec, Variant};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bellrelax_cli::record::{texts, DistributionSummary, ResultRecord};
use bellrelax_cli::source::{load, parse_rational, Loaded, ModeArg, Source};

/// Largest strategy count solved exactly under `--mode auto`.
const AUTO_RATIONAL_LIMIT: u128 = 1024;

#[derive(Parser, Debug)]
#[command(name = "bellrelax", version, about = "Minimal relaxations of Bell-type causal structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for scans (0: all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Add wall-clock time to the record.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    XToB,
    AToB,
}

impl From<VariantArg> for InfluenceVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::XToB => InfluenceVariant::XToB,
            VariantArg::AToB => InfluenceVariant::AToB,
        }
    }
}

/// Condition on a functional value instead of a distribution.
#[derive(Args, Clone, Debug)]
struct ValueTarget {
    /// Built-in name (chsh, i3322, i-a-to-b, mermin, bilocal-i, bilocal-j,
    /// cglmp) or a functional JSON file.
    #[arg(long, requires = "value")]
    functional: Option<String>,
    #[arg(long, requires = "functional")]
    value: Option<String>,
    /// Also require the reproduced distribution to be nonsignalling.
    #[arg(long)]
    nonsignalling: bool,
    /// Outcomes for `cglmp`.
    #[arg(long, default_value_t = 2)]
    d: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal direct causal influence on Bob.
    CausalInfluence {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        target: ValueTarget,
    },
    /// Minimal entropy of a one-bit message from Alice to Bob.
    Communication {
        #[command(flatten)]
        source: Source,
    },
    /// Minimal measurement dependence.
    MeasurementDependence {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        target: ValueTarget,
        /// Largest pairwise distance between conditional source distributions.
        #[arg(long)]
        hall: bool,
        /// Mutual-information bounds.
        #[arg(long, conflicts_with = "hall")]
        mi: bool,
        #[arg(long, default_value_t = 3000)]
        mi_iterations: usize,
    },
    /// Minimal non-bilocality over the source-marginal window.
    Bilocality {
        #[command(flatten)]
        source: Source,
        /// Points per free parameter (41 for one parameter, 5 otherwise).
        #[arg(long)]
        grid: Option<usize>,
        /// Solve at one marginal point instead of scanning.
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<String>>,
        #[arg(long)]
        no_refine: bool,
    },
    /// Exact vertices of the dual region of the causal-influence program.
    Vertices {
        /// `chsh` or `mx,my,oa,ob`.
        #[arg(long, default_value = "chsh")]
        scenario: String,
        #[arg(long, value_enum)]
        variant: VariantArg,
    },
    /// Evaluate a Bell functional.
    Functional {
        #[command(flatten)]
        source: Source,
        /// Built-in name (as for --functional, plus chsh-max and bilocal-b)
        /// or a functional JSON file.
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Write a generated distribution in the input file format.
    Generate {
        #[command(flatten)]
        source: Source,
    },
}

struct Product {
    record: ResultRecord,
    csv: Option<String>,
    /// Replaces the record as JSON output.
    raw_json: Option<String>,
}

impl From<ResultRecord> for Product {
    fn from(record: ResultRecord) -> Self {
        Product { record, csv: None, raw_json: None }
    }
}

macro_rules! with_mode {
    ($loaded:expr, $p:ident => $body:expr) => {
        match $loaded {
            Loaded::Exact($p) => $body,
            Loaded::Float($p) => $body,
        }
    };
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn strategy_count(variant: Variant, sc: &ScenarioSpec) -> Result<u128> {
    Ok(CausalModel::new(variant, sc.clone())?.strategy_count())
}

fn exact_allowed(mode: ModeArg, strategies: u128) -> bool {
    match mode {
        ModeArg::Rational => true,
        ModeArg::Float => false,
        ModeArg::Auto => strategies <= AUTO_RATIONAL_LIMIT,
    }
}

fn choose(loaded: Loaded, mode: ModeArg, strategies: u128) -> Result<Loaded> {
    match (loaded, mode) {
        (Loaded::Float(_), ModeArg::Rational) => {
            Err(usage("the input is not exactly rational; use --mode float or --mode auto"))
        }
        (Loaded::Exact(p), m) if !exact_allowed(m, strategies) => Ok(Loaded::Float(p.to_f64())),
        (l, _) => Ok(l),
    }
}

fn functional_by_name(name: &str, d: usize) -> Result<BellFunctional<Rational>> {
    Ok(match name {
        "chsh" => chsh(),
        "i3322" => i3322(),
        "i-a-to-b" => i_a_to_b(),
        "mermin" => mermin(),
        "bilocal-i" => bilocal_ij().0,
        "bilocal-j" => bilocal_ij().1,
        "cglmp" => cglmp(d)?,
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            load_functional_str(&text)?
        }
    })
}

fn summary<T: Scalar>(p: &Distribution<T>) -> Result<DistributionSummary> {
    let tol = if T::is_exact() { 0.0 } else { 1e-9 };
    let is_chsh = *p.scenario() == ScenarioSpec::chsh();
    Ok(DistributionSummary {
        scenario: p.scenario().clone(),
        nonsignalling: p.is_nonsignalling(tol),
        signalling_violation: p.signalling_violation(),
        chsh: if is_chsh { Some(chsh().convert(T::from_rational).evaluate(p)?.to_text()) } else { None },
        chsh_max: if is_chsh { Some(chsh_max(p)?.to_text()) } else { None },
    })
}

fn no_source(source: &Source) -> Result<()> {
    if source.input.is_some() || source.gen.is_some() {
        return Err(usage("--functional/--value replace --input/--gen"));
    }
    Ok(())
}

fn value_target_details(rec: &mut ResultRecord, f: &BellFunctional<Rational>, value: &Rational, ns: bool) {
    rec.details.insert("functional".into(), f.name.clone().into());
    rec.details.insert("imposed_value".into(), value.to_string().into());
    rec.details.insert("nonsignalling".into(), ns.into());
}

fn causal_influence(cmd: Vec<String>, variant: InfluenceVariant, source: &Source, target: &ValueTarget) -> Result<Product> {
    if let (Some(name), Some(value)) = (&target.functional, &target.value) {
        no_source(source)?;
        let f = functional_by_name(name, target.d)?;
        let val = parse_rational(value, "--value")?;
        let n = strategy_count(variant.model_variant(), &f.scenario)?;
        let mut rec = if exact_allowed(source.mode, n) {
            let r = min_causal_influence_given_value(&f, &val, target.nonsignalling, variant)?;
            ResultRecord::from_relaxation(cmd, &r)
        } else {
            let ff = f.convert(|r| r.to_f64());
            let r = min_causal_influence_given_value(&ff, &val.to_f64(), target.nonsignalling, variant)?;
            ResultRecord::from_relaxation(cmd, &r)
        };
        value_target_details(&mut rec, &f, &val, target.nonsignalling);
        return Ok(rec.into());
    }
    let loaded = load(source)?;
    let n = strategy_count(variant.model_variant(), loaded.scenario())?;
    let rec = with_mode!(choose(loaded, source.mode, n)?, p => {
        let r = min_causal_influence(&p, variant)?;
        let mut rec = ResultRecord::from_relaxation(cmd, &r);
        rec.summary = Some(summary(&p)?);
        rec
    });
    Ok(rec.into())
}

fn communication(cmd: Vec<String>, source: &Source) -> Result<Product> {
    let loaded = load(source)?;
    let n = strategy_count(Variant::MessageCommunication, loaded.scenario())?;
    let rec = with_mode!(choose(loaded, source.mode, n)?, p => {
        let r = min_communication(&p)?;
        let mut rec = ResultRecord::from_relaxation(cmd, &r);
        // The record's value is the entropy; the LP optimum is kept alongside.
        rec.details.insert("min_p_m0".into(), r.value.to_text().into());
        rec.summary = Some(summary(&p)?);
        rec
    });
    Ok(rec.into())
}

fn md_run<T: Scalar>(cmd: Vec<String>, target: &MdTarget<T>, hall: bool, mi: bool, iters: usize) -> Result<ResultRecord> {
    let prog = MdProgram::new(target, None)?;
    let r = if hall { prog.solve_hall()? } else { prog.solve()? };
    let mut rec = ResultRecord::from_relaxation(cmd, &r);
    if mi {
        let b = prog.mi_bounds_refined(&r, iters)?;
        rec.details.insert("mutual_information".into(), serde_json::to_value(b).map_err(|e| Error::Io(e.to_string()))?);
    }
    Ok(rec)
}

fn measurement_dependence(
    cmd: Vec<String>,
    source: &Source,
    target: &ValueTarget,
    hall: bool,
    mi: bool,
    iters: usize,
) -> Result<Product> {
    if let (Some(name), Some(value)) = (&target.functional, &target.value) {
        no_source(source)?;
        let f = functional_by_name(name, target.d)?;
        let val = parse_rational(value, "--value")?;
        let ns = target.nonsignalling;
        let n = strategy_count(Variant::MeasurementDependence, &f.scenario)?;
        let mut rec = if exact_allowed(source.mode, n) {
            let t = MdTarget::Value { functional: f.clone(), value: val.clone(), nonsignalling: ns };
            md_run(cmd, &t, hall, mi, iters)?
        } else {
            let t = MdTarget::Value { functional: f.convert(|r| r.to_f64()), value: val.to_f64(), nonsignalling: ns };
            md_run(cmd, &t, hall, mi, iters)?
        };
        value_target_details(&mut rec, &f, &val, ns);
        return Ok(rec.into());
    }
    let loaded = load(source)?;
    let n = strategy_count(Variant::MeasurementDependence, loaded.scenario())?;
    let rec = with_mode!(choose(loaded, source.mode, n)?, p => {
        let mut rec = md_run(cmd, &MdTarget::Distribution(p.clone()), hall, mi, iters)?;
        rec.summary = Some(summary(&p)?);
        rec
    });
    Ok(rec.into())
}

fn bilocal_run<T: Scalar + Send + Sync>(
    cmd: Vec<String>,
    p: &Distribution<T>,
    grid: Option<usize>,
    nu: Option<&[String]>,
    refine: bool,
    threads: usize,
) -> Result<Product> {
    let mut rec = ResultRecord::new(cmd, "optimal");
    rec.measure = Some(MeasureKind::NonBilocality.label().into());
    if *p.scenario() == ScenarioSpec::bilocal(2, 2, 4) {
        rec.details.insert("bilocal_b".into(), bilocal_b(p)?.into());
    }
    if let Some(nu) = nu {
        let nu: Vec<T> = nu
            .iter()
            .map(|t| parse_rational(t, "--nu").map(|r| T::from_rational(&r)))
            .collect::<Result<_>>()?;
        let pt = min_bilocality_at(p, &nu)?;
        rec.set_value(&pt.value);
        rec.details.insert("nu".into(), texts(&pt.nu).into());
        if let Some(g) = &pt.gap {
            rec.details.insert("gap".into(), g.to_text().into());
        }
        return Ok(rec.into());
    }
    let prog = BilocalProgram::new(p)?;
    let free = prog.free_parameters().len();
    let n = grid.unwrap_or(if free == 1 { 41 } else { 5 });
    let opts = ScanOptions { refine, threads, ..ScanOptions::default() };
    let res = if free == 1 {
        min_bilocality(p, &Grid::Uniform(n), &opts)?
    } else {
        nested_scan(p, &vec![Grid::Uniform(n); free], &opts)?
    };
    rec.set_value(&res.minimum);
    rec.details.insert("argmin".into(), texts(&res.argmin).into());
    rec.details.insert(
        "argmin_decimal".into(),
        res.argmin.iter().map(|v| v.to_f64()).collect::<Vec<f64>>().into(),
    );
    rec.details.insert("parameters".into(), res.parameters.clone().into());
    rec.details.insert("window".into(), vec![res.window.0.to_text(), res.window.1.to_text()].into());
    rec.details.insert("points".into(), res.points.len().into());
    rec.details.insert(
        "verdict".into(),
        serde_json::to_value(res.verdict).map_err(|e| Error::Io(e.to_string()))?,
    );
    rec.details.insert("resolution_limited".into(), res.resolution_limited.into());
    rec.details.insert(
        "q".into(),
        res.q
            .iter()
            .enumerate()
            .filter(|(_, w)| w.sign_tol(1e-12) != 0)
            .map(|(i, w)| serde_json::json!([i, w.to_text()]))
            .collect::<Vec<_>>()
            .into(),
    );
    rec.diagnostics = res.warnings.clone();
    let mut csv = Vec::new();
    res.write_csv(&mut csv)?;
    Ok(Product { record: rec, csv: Some(String::from_utf8(csv).expect("ascii")), raw_json: None })
}

fn bilocality(
    cmd: Vec<String>,
    source: &Source,
    grid: Option<usize>,
    nu: Option<&[String]>,
    refine: bool,
    threads: usize,
) -> Result<Product> {
    let loaded = load(source)?;
    let n = strategy_count(Variant::Bilocal, loaded.scenario())?;
    with_mode!(choose(loaded, source.mode, n)?, p => bilocal_run(cmd, &p, grid, nu, refine, threads))
}

fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    if text == "chsh" {
        return Ok(ScenarioSpec::chsh());
    }
    let v: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("--scenario: bad number {t:?}"))))
        .collect::<Result<_>>()?;
    match v[..] {
        [mx, my, oa, ob] => ScenarioSpec::new(vec![mx, my], vec![oa, ob]),
        _ => Err(usage("--scenario takes `chsh` or `mx,my,oa,ob`")),
    }
}

fn vertices(cmd: Vec<String>, scenario: &str, variant: InfluenceVariant) -> Result<Product> {
    let sc = parse_scenario(scenario)?;
    let vs = causal_influence_functionals(&sc, variant)?;
    let labels: Vec<String> = (0..vs.dim).map(|j| if j < sc.len() { sc.label(j) } else { "u".into() }).collect();
    let mut rec = ResultRecord::new(cmd, "optimal");
    rec.measure = Some(variant.measure().label().into());
    rec.mode = Some(bellrelax::num::Mode::Rational);
    rec.details.insert("count".into(), vs.len().into());
    rec.details.insert("labels".into(), labels.clone().into());
    rec.details.insert("vertices".into(), vs.vertices.iter().map(|v| texts(v)).collect::<Vec<_>>().into());
    rec.details.insert("discarded_rays".into(), vs.discarded_ray_count.into());
    let mut csv = Vec::new();
    vs.write_csv(&labels, &mut csv)?;
    Ok(Product { record: rec, csv: Some(String::from_utf8(csv).expect("utf-8")), raw_json: None })
}

fn functional(cmd: Vec<String>, source: &Source, name: &str, d: usize) -> Result<Product> {
    let loaded = load(source)?;
    let loaded = match (loaded, source.mode) {
        (Loaded::Float(_), ModeArg::Rational) => return Err(usage("the input is not exactly rational")),
        (Loaded::Exact(p), ModeArg::Float) => Loaded::Float(p.to_f64()),
        (l, _) => l,
    };
    let mut rec = ResultRecord::new(cmd, "optimal");
    rec.measure = Some(name.to_string());
    with_mode!(loaded, p => {
        match name {
            "chsh-max" => {
                rec.set_value(&chsh_max(&p)?);
                rec.details.insert("classical_bound".into(), "0".into());
            }
            "bilocal-b" => {
                rec.set_value(&bilocal_b(&p)?);
                rec.details.insert("classical_bound".into(), "1".into());
            }
            other => {
                let f = functional_by_name(other, d)?;
                let v = f.convert(|r| Scalar::from_rational(r)).evaluate(&p)?;
                rec.set_value(&v);
                rec.details.insert("classical_bound".into(), f.classical_bound.to_string().into());
                rec.details.insert("violates".into(), (v.to_f64() > f.classical_bound.to_f64() + 1e-12).into());
            }
        }
        rec.summary = Some(summary(&p)?);
    });
    Ok(rec.into())
}

fn generate(cmd: Vec<String>, source: &Source) -> Result<Product> {
    let loaded = load(source)?;
    let file = with_mode!(&loaded, p => DistributionFile::from_distribution(p)?);
    let mut rec = ResultRecord::new(cmd, "optimal");
    rec.summary = Some(with_mode!(&loaded, p => summary(p)?));
    let sc = loaded.scenario().clone();
    let mut csv = String::from("label,p\n");
    with_mode!(&loaded, p => {
        for (j, v) in p.entries().iter().enumerate() {
            csv.push_str(&format!("\"{}\",{}\n", sc.label(j), cell(v)));
        }
    });
    Ok(Product { record: rec, csv: Some(csv), raw_json: Some(file.to_json()) })
}

/// Exact text in rational mode, 12 significant digits in float mode.
fn cell<T: Scalar>(v: &T) -> String {
    if T::is_exact() {
        v.to_text()
    } else {
        format_sig(v.to_f64(), 12)
    }
}

fn run(cli: &Cli, cmd: Vec<String>) -> Result<Product> {
    match &cli.command {
        Command::CausalInfluence { variant, source, target } => causal_influence(cmd, (*variant).into(), source, target),
        Command::Communication { source } => communication(cmd, source),
        Command::MeasurementDependence { source, target, hall, mi, mi_iterations } => {
            measurement_dependence(cmd, source, target, *hall, *mi, *mi_iterations)
        }
        Command::Bilocality { source, grid, nu, no_refine } => {
            bilocality(cmd, source, *grid, nu.as_deref(), !no_refine, cli.threads)
        }
        Command::Vertices { scenario, variant } => vertices(cmd, scenario, (*variant).into()),
        Command::Functional { source, name, d } => functional(cmd, source, name, *d),
        Command::Generate { source } => generate(cmd, source),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json(rec: &ResultRecord) -> String {
    serde_json::to_string_pretty(rec).expect("serializable") + "\n"
}

fn csv_text(rows: &[Vec<String>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|c| if c.contains([',', '"']) { format!("\"{}\"", c.replace('"', "\"\"")) } else { c.clone() }).collect::<Vec<_>>().join(","))
        .map(|l| l + "\n")
        .collect()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let cmd: Vec<String> = std::env::args().skip(1).collect();
    let format = cli.format.unwrap_or(match cli.command {
        Command::Vertices { .. } => Format::Csv,
        _ => Format::Json,
    });
    let start = Instant::now();
    match run(&cli, cmd.clone()) {
        Ok(mut prod) => {
            if cli.timing {
                prod.record.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            let text = match format {
                Format::Json => prod.raw_json.map(|j| j + "\n").unwrap_or_else(|| to_json(&prod.record)),
                Format::Csv => prod.csv.unwrap_or_else(|| csv_text(&prod.record.csv_rows())),
            };
            if cli.timing && prod.record.timing_ms.is_some() && format == Format::Csv {
                eprintln!("elapsed: {:.3} ms", prod.record.timing_ms.unwrap_or_default());
            }
            match emit(&cli, &text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Error::Infeasible(msg)) => {
            let mut rec = ResultRecord::new(cmd, "infeasible");
            rec.diagnostics.push(msg.clone());
            eprintln!("infeasible: {msg}");
            if format == Format::Json {
                let _ = emit(&cli, &to_json(&rec));
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
