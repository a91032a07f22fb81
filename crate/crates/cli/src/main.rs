//! `fracmax` command line.

mod files;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fracmax::grid::make_corpus;
use fracmax::maxop::{maximal, maximal_commutator, maximal_local, nonlinear_commutator};
use fracmax::oscfun::{evaluate_cubes, summarize, write_cube_csv, DominationTarget};
use fracmax::varlex::{luxemburg_norm, ExponentSpec};
use fracmax::verify::{
    parse_suite, run_check, run_suite_config, CheckInputs, CheckName, CheckParams, SuiteEntry,
    DEFAULT_SUITE,
};
use fracmax::{
    CommutatorMode, Cube, CubeFamily, Domain, Exponent, FracParams, GridFunction,
    OscFunctionalSpec, OscKind, SExponent, Symbol,
};

use files::{read_grid, Output};

#[derive(Parser, Debug)]
#[command(
    name = "fracmax",
    version,
    about = "Fractional maximal operators on uniform grids"
)]
struct Cli {
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Print human-readable tables to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a corpus symbol on a grid.
    Gen(GenArgs),
    /// Fractional maximal function, optionally localized to a cube.
    Maxop(MaxopArgs),
    /// Nonlinear or maximal commutator.
    Comm(CommArgs),
    /// Luxemburg norm of a grid function.
    Norm(NormArgs),
    /// Supremum of an oscillation functional over cubes.
    Functional(FunctionalArgs),
    /// Run one named identity or inequality check.
    Check(CheckArgs),
    /// Run a TOML suite of scaling studies and checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct FamilyArgs {
    /// Cube sides: `dyadic`, `all` or a comma list such as `1,2,4`.
    #[arg(long, default_value = "dyadic")]
    scales: String,
    /// Anchor stride of the cube family.
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

impl FamilyArgs {
    fn family(&self, dom: &Domain<f64>) -> anyhow::Result<CubeFamily> {
        let fam = match self.scales.as_str() {
            "dyadic" => CubeFamily::dyadic(dom),
            "all" => CubeFamily::all(dom),
            list => {
                let sides = list
                    .split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .with_context(|| {
                        format!("--scales: expected dyadic, all or a side list, got `{list}`")
                    })?;
                CubeFamily::custom(sides, 1)?
            }
        };
        let fam = fam.with_stride(self.stride)?;
        fam.validate_for(dom)?;
        Ok(fam)
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Symbol name, e.g. `lip_pos`, `bmo_signed`, `const(2)`, `power_sing(0.25)`.
    #[arg(long, required_unless_present = "log_holder")]
    symbol: Option<String>,
    /// Exponent of `lip_pos`.
    #[arg(long)]
    beta: Option<f64>,
    /// Seed of `random_lipschitz`.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the bundled log-Hölder exponent, flagged as an exponent field.
    #[arg(long, conflicts_with = "symbol")]
    log_holder: bool,
    /// Box as `lo:hi`, the same on every axis.
    #[arg(long, default_value = "-1:1", allow_hyphen_values = true)]
    domain: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Cells per axis.
    #[arg(long)]
    cells: usize,
    /// Output path; `.csv` writes CSV, anything else GFN1.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct MaxopArgs {
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Localize to a cube given as `a0[,a1]:side`; the output covers that cube only.
    #[arg(long)]
    cube: Option<String>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum CommKind {
    Nonlinear,
    Maximal,
}

#[derive(Args, Debug)]
struct CommArgs {
    #[arg(long, value_enum)]
    kind: CommKind,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Evaluation strategy of the maximal commutator.
    #[arg(long, default_value = "fast")]
    mode: CommutatorMode,
    #[command(flatten)]
    family: FamilyArgs,
    /// The symbol `b`.
    #[arg(short, long)]
    b: PathBuf,
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct NormArgs {
    /// `const:<p>` or `file:<path>`.
    #[arg(long)]
    exponent: ExponentSpec,
    #[arg(short, long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct FunctionalArgs {
    #[arg(long)]
    kind: OscKind,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Norm of the cube quotient: `const:<s>` or `file:<path>`.
    #[arg(long, default_value = "const:1")]
    s: ExponentSpec,
    /// Inner power of `lip-q`.
    #[arg(long)]
    q: Option<f64>,
    /// Order of the localized maximal function of `lip-max` and `bmo-max`.
    #[arg(long)]
    gamma: Option<f64>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(short, long)]
    b: PathBuf,
    /// Write one CSV row per evaluated cube.
    #[arg(long)]
    dump_cubes: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    name: CheckName,
    /// Symbol file; alternatively use --symbol with --cells.
    #[arg(short, long, conflicts_with = "symbol")]
    b: Option<PathBuf>,
    #[arg(long, requires = "cells")]
    symbol: Option<String>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value = "-1:1", allow_hyphen_values = true)]
    domain: String,
    /// Second function (Hölder partner or domination probe).
    #[arg(short, long)]
    f: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Power of the power identity.
    #[arg(long)]
    r: Option<f64>,
    /// Exponent of the norm checks; the bundled log-Hölder exponent otherwise.
    #[arg(long)]
    exponent: Option<ExponentSpec>,
    /// Restrict to one cube `a0[,a1]:side`.
    #[arg(long)]
    cube: Option<String>,
    #[arg(long, value_enum)]
    domination: Option<DominationArg>,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum DominationArg {
    Nonlinear,
    Maximal,
    Both,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite file; the bundled suite when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_domain(text: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .with_context(|| format!("--domain: expected lo:hi, got `{text}`"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("--domain: bad lower end `{lo}`"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("--domain: bad upper end `{hi}`"))?;
    Ok((lo, hi))
}

fn make_domain(text: &str, dim: usize, cells: usize) -> anyhow::Result<Domain<f64>> {
    let (lo, hi) = parse_domain(text)?;
    Ok(Domain::new(
        &vec![lo; dim],
        &vec![hi; dim],
        &vec![cells; dim],
    )?)
}

fn parse_cube(text: &str) -> anyhow::Result<Cube> {
    let (anchor, side) = text
        .split_once(':')
        .with_context(|| format!("--cube: expected a0[,a1]:side, got `{text}`"))?;
    let anchor = anchor
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("--cube: bad anchor `{anchor}`"))?;
    let side: usize = side
        .trim()
        .parse()
        .with_context(|| format!("--cube: bad side `{side}`"))?;
    Ok(Cube::from_anchor(&anchor, side)?)
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn gen(cli: &Cli, a: &GenArgs) -> anyhow::Result<bool> {
    let out = Output::new(&a.output, cli.force)?;
    let dom = make_domain(&a.domain, a.dim, a.cells)?;
    if a.log_holder {
        let p = Exponent::log_holder_default(dom)?;
        out.write_grid(p.values(), true)?;
        return Ok(true);
    }
    let mut symbol: Symbol = a.symbol.as_deref().unwrap_or_default().parse()?;
    match (&mut symbol, a.beta, a.seed) {
        (Symbol::LipPos { beta }, Some(b), _) => *beta = b,
        (Symbol::RandomLipschitz { seed }, _, Some(s)) => *seed = s,
        (_, Some(_), _) => bail!("--beta only applies to lip_pos"),
        (_, _, Some(_)) => bail!("--seed only applies to random_lipschitz"),
        _ => {}
    }
    let f = make_corpus(&symbol, &dom)?;
    if cli.verbose {
        eprintln!(
            "{symbol}: {} cells, min {:.6}, max {:.6}",
            f.len(),
            f.min(),
            f.max()
        );
    }
    out.write_grid(&f, false)?;
    Ok(true)
}

fn maxop(cli: &Cli, a: &MaxopArgs) -> anyhow::Result<bool> {
    let out = Output::new(&a.output, cli.force)?;
    let f = read_grid(&a.input)?;
    let fam = a.family.family(f.domain())?;
    let gp = FracParams::new(a.gamma)?;
    let result = match &a.cube {
        Some(text) => maximal_local(&f, &gp, &parse_cube(text)?, &fam)?.to_grid()?,
        None => maximal(&f, &gp, &fam)?,
    };
    if cli.verbose {
        eprintln!("max {:.6e} over {} cells", result.max(), result.len());
    }
    out.write_grid(&result, false)?;
    Ok(true)
}

fn comm(cli: &Cli, a: &CommArgs) -> anyhow::Result<bool> {
    let out = Output::new(&a.output, cli.force)?;
    let b = read_grid(&a.b)?;
    let f = read_grid(&a.input)?;
    let fam = a.family.family(b.domain())?;
    let gp = FracParams::new(a.alpha)?;
    gp.validate_for(b.domain())?;
    let result = match a.kind {
        CommKind::Nonlinear => nonlinear_commutator(&b, &f, &gp, &fam)?,
        CommKind::Maximal => maximal_commutator(&b, &f, &gp, &fam, a.mode)?,
    };
    if cli.verbose {
        eprintln!("sup |result| {:.6e}", result.sup_abs());
    }
    out.write_grid(&result, false)?;
    Ok(true)
}

fn norm(cli: &Cli, a: &NormArgs) -> anyhow::Result<bool> {
    let f = read_grid(&a.input)?;
    let p = a.exponent.resolve(f.domain())?;
    let r = luxemburg_norm(&f, &p)?;
    if cli.verbose {
        eprintln!("norm {:.15e} after {} iterations", r.value, r.iterations);
    }
    print_json(&r)?;
    Ok(true)
}

fn functional(cli: &Cli, a: &FunctionalArgs) -> anyhow::Result<bool> {
    let dump = a
        .dump_cubes
        .as_ref()
        .map(|p| Output::new(p, cli.force))
        .transpose()?;
    let b = read_grid(&a.b)?;
    let dom = b.domain();
    let fam = a.family.family(dom)?;
    let s = match &a.s {
        ExponentSpec::Const(v) => SExponent::constant(*v)?,
        file => SExponent::Field(file.resolve(dom)?),
    };
    let mut spec = OscFunctionalSpec::new(a.kind)
        .with_alpha(a.alpha)
        .with_beta(a.beta)
        .with_s(s);
    if let Some(q) = a.q {
        spec = spec.with_inner_q(q);
    }
    if let Some(g) = a.gamma {
        spec = spec.with_gamma_for_max(g);
    }
    spec.validate(dom.dim())?;
    let values = evaluate_cubes(&b, &spec, &fam, &fam)?;
    if let Some(out) = dump {
        out.write_with(|w| Ok(write_cube_csv(&values, dom.dim(), w)?))?;
    }
    let report = summarize(a.kind, &values)?.to_report(&spec, dom.dim());
    if cli.verbose {
        eprintln!("{:>8}  {:>14}", "side", "max");
        for s in &report.per_scale {
            eprintln!("{:>8}  {:>14.6e}", s.side, s.max);
        }
        eprintln!(
            "sup {:.6e} at anchor {:?} side {} ({} cubes, {} skipped)",
            report.sup_value,
            report.argmax.anchor,
            report.argmax.side,
            report.cubes_evaluated,
            report.cubes_skipped
        );
    }
    print_json(&report)?;
    Ok(true)
}

fn check(cli: &Cli, a: &CheckArgs) -> anyhow::Result<bool> {
    let b: GridFunction<f64> = match (&a.b, &a.symbol) {
        (Some(path), _) => read_grid(path)?,
        (None, Some(sym)) => {
            let cells = a.cells.context("--symbol needs --cells")?;
            make_corpus(
                &sym.parse::<Symbol>()?,
                &make_domain(&a.domain, a.dim, cells)?,
            )?
        }
        (None, None) => bail!("one of --b or --symbol is required"),
    };
    let dom = b.domain().clone();
    let f = a.f.as_ref().map(read_grid).transpose()?;
    let fam = a.family.family(&dom)?;
    let d = CheckParams::default();
    let params = CheckParams {
        gamma: a.gamma.unwrap_or(d.gamma),
        alpha: a.alpha.unwrap_or(d.alpha),
        beta: a.beta.unwrap_or(d.beta),
        r: a.r.unwrap_or(d.r),
        exponent: a.exponent.as_ref().map(|e| e.resolve(&dom)).transpose()?,
        cube: a.cube.as_deref().map(parse_cube).transpose()?,
        domination: match a.domination {
            None => d.domination,
            Some(DominationArg::Nonlinear) => DominationTarget::Nonlinear,
            Some(DominationArg::Maximal) => DominationTarget::Maximal,
            Some(DominationArg::Both) => DominationTarget::Both,
        },
    };
    let report = run_check(a.name, &CheckInputs { b, f, fam, params })?;
    if cli.verbose {
        eprintln!(
            "{} {}: deviation {:.3e}, tolerance {:.3e}",
            if report.pass { "PASS" } else { "FAIL" },
            report.check,
            report.max_deviation,
            report.tolerance
        );
    }
    print_json(&report)?;
    Ok(report.pass)
}

fn verify(cli: &Cli, a: &VerifyArgs) -> anyhow::Result<bool> {
    let out = a
        .report
        .as_ref()
        .map(|p| Output::new(p, cli.force))
        .transpose()?;
    let text = match &a.config {
        Some(path) => {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        None => DEFAULT_SUITE.to_string(),
    };
    let cfg = parse_suite(&text)?;
    let report = run_suite_config(&cfg)?;
    if cli.verbose {
        for e in &report.entries {
            match e {
                SuiteEntry::Experiment(r) => eprintln!(
                    "{:<6} {:<28} {:<13} expected {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.verdict.to_string(),
                    r.expect.map_or("-".to_string(), |v| v.to_string())
                ),
                SuiteEntry::Check(r) => eprintln!(
                    "{:<6} {:<28} deviation {:.3e} tolerance {:.3e}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.check,
                    r.max_deviation,
                    r.tolerance
                ),
            }
        }
    }
    match out {
        Some(out) => out.write_with(|w| Ok(serde_json::to_writer_pretty(w, &report.entries)?))?,
        None => print_json(&report.entries)?,
    }
    Ok(report.pass())
}

/// Errors that reject the request itself rather than a computation.
fn is_validation(e: &anyhow::Error) -> bool {
    use fracmax::Error as E;
    if e.downcast_ref::<files::Refused>().is_some() {
        return true;
    }
    match e.downcast_ref::<E>() {
        Some(err) => !matches!(
            err,
            E::Io(_) | E::NoConvergence(_) | E::NonFinite(_) | E::NoEligibleCubes(_)
        ),
        // Our own argument parsing failures.
        None => e.downcast_ref::<std::io::Error>().is_none(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Gen(a) => gen(&cli, a),
        Command::Maxop(a) => maxop(&cli, a),
        Command::Comm(a) => comm(&cli, a),
        Command::Norm(a) => norm(&cli, a),
        Command::Functional(a) => functional(&cli, a),
        Command::Check(a) => check(&cli, a),
        Command::Verify(a) => verify(&cli, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_validation(&e) { 2 } else { 1 })
        }
    }
}
