//! Command-line front end. [`dispatch`] parses arguments, runs one
//! subcommand and returns the process exit code.
//!
//! Exit codes: 0 success, 1 invalid input, 2 capacity exceeded, 64 usage.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{generate, Family, FamilyParams};
use crate::hardness::{fta_sweep, MIN_SWEEP_RESOLUTION};
use crate::instance::Instance;
use crate::instance_file::{load_instance, InstanceFile};
use crate::offline::{expected_opt, Budget, EstimateMethod};
use crate::pricing::MATROID_PANEL_SIZE;
use crate::simulation::{
    run_trials, track_q, trial_stream, Algorithm, Mechanism, SimConfig, OPT_STREAM,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CAPACITY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "prophet-secretary", version, about = "Posted prices for random-order buyers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate E[ALG] / E[OPT] over seeded trials.
    Simulate(RunArgs),
    /// Print base prices or fixed thresholds.
    Prices(RunArgs),
    /// Print per-item survival curves q(t) and the residual.
    Qcurve(RunArgs),
    /// Sweep every fixed threshold on the iid hard instance.
    Hardness(HardnessArgs),
    /// Compute E[OPT].
    Opt(OptArgs),
    /// Write a random instance from a named family.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every random draw; falls back to the SEED variable.
    #[arg(long, env = "SEED")]
    seed: Option<u64>,
    /// Largest joint support enumerated exactly.
    #[arg(long, default_value_t = Budget::default().exact_profiles)]
    budget: usize,
    /// Samples used past the enumeration budget.
    #[arg(long, default_value_t = Budget::default().mc_samples)]
    mc_samples: usize,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::validation("no seed: pass --seed or set SEED"))
    }

    fn budget(&self) -> Budget {
        Budget {
            exact_profiles: self.budget,
            mc_samples: self.mc_samples,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "dynamic")]
    alg: AlgArg,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    /// Grid intervals for qcurve.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Matroid price panel size when the joint support is too large.
    #[arg(long, default_value_t = MATROID_PANEL_SIZE)]
    k_samples: usize,
    /// Worker thread cap.
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum AlgArg {
    Dynamic,
    Fta,
}

#[derive(Debug, Args)]
struct HardnessArgs {
    /// Buyer counts, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Uniform grid steps over the skip probability.
    #[arg(long, default_value_t = 10 * MIN_SWEEP_RESOLUTION)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Buyers, or ground set size for uniform matroids.
    #[arg(long)]
    n: usize,
    /// Items, rank, blocks or vertices, depending on the family.
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    support: usize,
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    common: Common,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        _ => EXIT_INVALID,
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` unless `--out` is given and diagnostics to `err`.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => with_output(&a.common.out, stdout, |w| simulate(&a, w)),
        Command::Prices(a) => with_output(&a.common.out, stdout, |w| prices(&a, w)),
        Command::Qcurve(a) => with_output(&a.common.out, stdout, |w| qcurve(&a, w)),
        Command::Hardness(a) => with_output(&a.out, stdout, |w| hardness(&a, w)),
        Command::Opt(a) => with_output(&a.common.out, stdout, |w| opt(&a, w)),
        Command::Gen(a) => with_output(&a.common.out, stdout, |w| gen(&a, w)),
    }
}

fn with_output(
    path: &Option<PathBuf>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = File::create(p)?;
            body(&mut f)?;
            f.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn instance_label(file: &InstanceFile, path: &Path) -> String {
    file.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    })
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Unsupported(format!("csv output failed: {other:?}")),
    }
}

fn write_rows<S: Serialize>(w: &mut dyn Write, rows: impl IntoIterator<Item = S>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

struct Loaded {
    label: String,
    instance: Instance,
    config: SimConfig,
}

fn load_run(a: &RunArgs) -> Result<Loaded> {
    let seed = a.common.seed()?;
    let (file, instance) = load_instance(&a.instance)?;
    let algorithm = match a.alg {
        AlgArg::Dynamic => Algorithm::Dynamic,
        AlgArg::Fta => Algorithm::Fta,
    };
    let config = SimConfig {
        trials: a.trials,
        seed,
        algorithm,
        budget: a.common.budget(),
        k_samples: a.k_samples,
        grid: a.grid,
        workers: a.workers,
    };
    Ok(Loaded {
        label: instance_label(&file, &a.instance),
        instance,
        config,
    })
}

#[derive(Serialize)]
struct ReportRow<'a> {
    instance: &'a str,
    kind: &'a str,
    alg: &'a str,
    trials: usize,
    seed: u64,
    alg_mean: f64,
    alg_se: f64,
    opt_mean: f64,
    opt_se: f64,
    ratio: f64,
    ci_lo: f64,
    ci_hi: f64,
}

fn simulate(a: &RunArgs, w: &mut dyn Write) -> Result<()> {
    let l = load_run(a)?;
    let mech = Mechanism::prepare(&l.instance, &l.config)?;
    let r = run_trials(&l.instance, &mech, &l.config)?;
    write_rows(
        w,
        [ReportRow {
            instance: &l.label,
            kind: l.instance.kind().as_str(),
            alg: r.algorithm.as_str(),
            trials: r.trials,
            seed: r.seed,
            alg_mean: r.alg_mean,
            alg_se: r.alg_std_error,
            opt_mean: r.opt_mean,
            opt_se: r.opt_std_error,
            ratio: r.ratio,
            ci_lo: r.ratio_ci_95.lo,
            ci_hi: r.ratio_ci_95.hi,
        }],
    )
}

#[derive(Serialize)]
struct PriceRow {
    item: usize,
    base_price: f64,
    atom_accept_prob: Option<f64>,
}

fn prices(a: &RunArgs, w: &mut dyn Write) -> Result<()> {
    let l = load_run(a)?;
    let mech = Mechanism::prepare(&l.instance, &l.config)?;
    let rows: Vec<PriceRow> = match &mech {
        Mechanism::SingleItemFta { threshold } => vec![PriceRow {
            item: 0,
            base_price: threshold.tau,
            atom_accept_prob: Some(threshold.atom_accept_prob),
        }],
        Mechanism::MatchingFta { policy } => policy
            .thresholds
            .iter()
            .enumerate()
            .map(|(item, t)| PriceRow {
                item,
                base_price: t.tau,
                atom_accept_prob: Some(t.atom_accept_prob),
            })
            .collect(),
        // Matroid prices depend on the accepted set; report them at A = ∅.
        Mechanism::MatroidMps { pricer } => (0..pricer.matroid().ground_size())
            .map(|item| PriceRow {
                item,
                base_price: pricer.base_price(crate::matroids::ElementSet::EMPTY, item),
                atom_accept_prob: None,
            })
            .collect(),
        other => other
            .item_prices()
            .unwrap_or_default()
            .into_iter()
            .enumerate()
            .map(|(item, b)| PriceRow {
                item,
                base_price: b,
                atom_accept_prob: None,
            })
            .collect(),
    };
    write_rows(w, rows)
}

#[derive(Serialize)]
struct QRow<'a> {
    instance: &'a str,
    alg: &'a str,
    item: usize,
    t: f64,
    q: f64,
    q_se: f64,
    residual: Option<f64>,
}

fn qcurve(a: &RunArgs, w: &mut dyn Write) -> Result<()> {
    let l = load_run(a)?;
    let mech = Mechanism::prepare(&l.instance, &l.config)?;
    let q = track_q(&l.instance, &mech, &l.config)?;
    let alg = l.config.algorithm.as_str();
    let mut rows = Vec::new();
    for (item, curve) in q.survival.iter().enumerate() {
        for (g, (&t, &s)) in q.grid.iter().zip(curve).enumerate() {
            rows.push(QRow {
                instance: &l.label,
                alg,
                item,
                t,
                q: s,
                q_se: q.std_error(item, g),
                residual: q.residual.as_ref().map(|r| r[g]),
            });
        }
    }
    write_rows(w, rows)
}

#[derive(Serialize)]
struct HardnessRow {
    n: usize,
    best_ratio: f64,
    argmax_p: f64,
    bound: f64,
    low_atom_ratio: f64,
    below_low_ratio: f64,
    between_atoms_ratio: f64,
    exact_opt: f64,
}

fn hardness(a: &HardnessArgs, w: &mut dyn Write) -> Result<()> {
    let bound = 1.0 - (-1.0f64).exp();
    let rows = a
        .n
        .iter()
        .map(|&n| {
            let s = fta_sweep(n, a.resolution)?;
            Ok(HardnessRow {
                n,
                best_ratio: s.best_ratio,
                argmax_p: s.argmax_p,
                bound,
                low_atom_ratio: s.low_atom_ratio,
                below_low_ratio: s.below_low_ratio,
                between_atoms_ratio: s.between_atoms_ratio,
                exact_opt: s.exact_opt,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_rows(w, rows)
}

#[derive(Serialize)]
struct OptRow<'a> {
    instance: &'a str,
    kind: &'a str,
    opt_mean: f64,
    opt_se: f64,
    method: &'a str,
}

fn opt(a: &OptArgs, w: &mut dyn Write) -> Result<()> {
    let seed = a.common.seed()?;
    let (file, instance) = load_instance(&a.instance)?;
    let est = expected_opt(&instance, &a.common.budget(), &mut trial_stream(seed, OPT_STREAM))?;
    let method = match est.method {
        EstimateMethod::Exact => "exact",
        EstimateMethod::MonteCarlo { .. } => "monte_carlo",
    };
    write_rows(
        w,
        [OptRow {
            instance: &instance_label(&file, &a.instance),
            kind: instance.kind().as_str(),
            opt_mean: est.mean,
            opt_se: est.std_error,
            method,
        }],
    )
}

fn gen(a: &GenArgs, w: &mut dyn Write) -> Result<()> {
    let seed = a.common.seed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = FamilyParams {
        n: a.n,
        m: a.m,
        max_support: a.support,
    };
    let instance = generate(a.family, params, &mut rng)?;
    let text = InstanceFile::from_instance(&instance, a.name.clone()).to_json();
    writeln!(w, "{text}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("prophet-secretary").chain(args.iter().copied());
        let code = dispatch(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = call(&["simulate", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn hardness_row() {
        let (code, out, _) = call(&["hardness", "--n", "1000", "--resolution", "1000"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("n,best_ratio,argmax_p,bound"));
        assert!(lines.next().unwrap().starts_with("1000,"));
    }

    #[test]
    fn help_is_success() {
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }
}
