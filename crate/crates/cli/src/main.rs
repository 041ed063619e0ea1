use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use byzcode_cli::{
    accounting_report, check_unit, fig2_summary, parse_edge, run_sweep, stepped_grid, write_csv,
    AccountingSpec, SweepSpec,
};
use byzcode_core::algebra::FieldSpec;
use byzcode_core::analytic::{GenerationHashSize, Scheme};
use byzcode_core::detect::HashParams;
use byzcode_core::sim::{CodingSetup, Edge, Fidelity};
use byzcode_core::validate::{run_suite, ClosedForm, Criterion, Formulas, Tampered, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "byzcode",
    version,
    about = "Overhead of Byzantine detection in network-coded traffic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Overhead ratio over a grid of attack probabilities, as CSV.
    Sweep(SweepArgs),
    /// Generation scheme for several generation sizes, p from 0 to 1.
    Figure3(Figure3Args),
    /// All three schemes over p in [0, 1] plus a zoom on [0, 0.1].
    Figure45(Figure45Args),
    /// Run the acceptance checks; exit status 1 if any fails.
    Validate(ValidateArgs),
    /// Six-node sub-generation scenario.
    Fig2(Fig2Args),
    /// Signature, hash and key sizes at the given parameters.
    Accounting(AccountingArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    ErrorCorrection,
    Packet,
    Generation,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::ErrorCorrection => Scheme::ErrorCorrection,
            SchemeArg::Packet => Scheme::Packet,
            SchemeArg::Generation => Scheme::Generation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FidelityArg {
    Coded,
    Tagged,
}

#[derive(Args)]
struct ModelArgs {
    /// Packet size n in bits.
    #[arg(long, default_value_t = 1000.0)]
    n: f64,
    /// Per-packet signature size as a fraction of n.
    #[arg(long = "hp-frac", default_value_t = 0.06)]
    hp_frac: f64,
    /// Per-generation hash size as a fraction of nG.
    #[arg(long = "hg-frac", default_value_t = 0.02)]
    hg_frac: f64,
    /// Fixed per-generation hash size in bits, overriding --hg-frac.
    #[arg(long = "hg-bits")]
    hg_bits: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    /// Simulated packets (or generations, for the generation scheme) per
    /// point; 0 writes analytic values only.
    #[arg(long, default_value_t = 0)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FidelityArg::Coded)]
    fidelity: FidelityArg,
    /// Payload symbols per hash symbol in simulated generation traffic.
    #[arg(long, default_value_t = 50)]
    k: usize,
    /// Hidden degrees of freedom assumed by the hash bound.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Coding field GF(2^logq) for simulated generation traffic.
    #[arg(long, default_value_t = 8)]
    logq: u8,
}

#[derive(Args)]
struct SweepArgs {
    /// Schemes to include; all when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    scheme: Vec<SchemeArg>,
    /// Explicit attack probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    /// Grid step over [--p-min, --p-max] when --p is absent.
    #[arg(long = "p-step", default_value_t = 0.05)]
    p_step: f64,
    #[arg(long = "p-min", default_value_t = 0.0)]
    p_min: f64,
    #[arg(long = "p-max", default_value_t = 1.0)]
    p_max: f64,
    /// Generation size.
    #[arg(long = "G", default_value_t = 10)]
    g: usize,
    /// Several generation sizes, comma separated; overrides --G.
    #[arg(long = "G-list", value_delimiter = ',')]
    g_list: Vec<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct Figure3Args {
    #[arg(long = "G-list", value_delimiter = ',', default_value = "1,5,10,20,50")]
    g_list: Vec<usize>,
    #[arg(long = "p-step", default_value_t = 0.01)]
    p_step: f64,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct Figure45Args {
    #[arg(long = "G", default_value_t = 10)]
    g: usize,
    #[arg(long = "p-step", default_value_t = 0.01)]
    p_step: f64,
    /// Step of the extra grid over [0, 0.1].
    #[arg(long = "zoom-step", default_value_t = 0.001)]
    zoom_step: f64,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Run a single criterion, by name or number.
    #[arg(long)]
    criterion: Option<Criterion>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Evaluate against a deliberately broken formula set.
    #[arg(long, hide = true)]
    tamper: bool,
}

#[derive(Args)]
struct Fig2Args {
    /// Generation size; a multiple of 4.
    #[arg(long = "G", default_value_t = 8)]
    g: usize,
    /// Corruption probability on the A->B edge, used when --edge is absent.
    #[arg(long, default_value_t = 0.2)]
    p: f64,
    /// Per-edge corruption, e.g. --edge 'C->E=0.1'; repeatable.
    #[arg(long)]
    edge: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct AccountingArgs {
    #[arg(long, default_value_t = 1000.0)]
    n: f64,
    #[arg(long = "G", default_value_t = 10)]
    g: usize,
    #[arg(long = "hp-frac", default_value_t = 0.06)]
    hp_frac: f64,
    #[arg(long = "hg-frac", default_value_t = 0.02)]
    hg_frac: f64,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    s: usize,
    #[arg(long, default_value_t = 8)]
    logq: u8,
}

fn coding(run: &RunArgs) -> Result<CodingSetup> {
    let field = FieldSpec::binary(run.logq)?;
    Ok(CodingSetup {
        field,
        hash: HashParams::new(run.k, run.s, field)?,
    })
}

fn hg_mode(model: &ModelArgs) -> Result<GenerationHashSize> {
    Ok(match model.hg_bits {
        Some(bits) => GenerationHashSize::Fixed(bits),
        None => {
            check_unit("--hg-frac", model.hg_frac)?;
            GenerationHashSize::Scaled(model.hg_frac)
        }
    })
}

fn sweep_spec(
    schemes: Vec<Scheme>,
    p_grid: Vec<f64>,
    g_list: Vec<usize>,
    model: &ModelArgs,
    run: &RunArgs,
) -> Result<SweepSpec> {
    Ok(SweepSpec {
        schemes,
        p_grid,
        g_list,
        n: model.n,
        hp_frac: model.hp_frac,
        hg: hg_mode(model)?,
        trials: run.trials,
        seed: run.seed,
        fidelity: match run.fidelity {
            FidelityArg::Coded => Fidelity::Coded,
            FidelityArg::Tagged => Fidelity::Tagged,
        },
        coding: coding(run)?,
    })
}

fn emit(spec: &SweepSpec, out: &Option<PathBuf>) -> Result<()> {
    let rows = run_sweep(spec)?;
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            write_csv(&rows, BufWriter::new(file))
        }
        None => write_csv(&rows, io::stdout().lock()),
    }
}

fn dedup_sorted(mut grid: Vec<f64>) -> Vec<f64> {
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    grid.dedup();
    grid
}

/// Exit status 1 for failed checks, 2 for usage and runtime errors.
fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Sweep(a) => {
            let schemes = if a.scheme.is_empty() {
                Scheme::ALL.to_vec()
            } else {
                a.scheme.iter().map(|&s| s.into()).collect()
            };
            let p_grid = if a.p.is_empty() {
                stepped_grid(a.p_min, a.p_max, a.p_step)?
            } else {
                a.p.clone()
            };
            let g_list = if a.g_list.is_empty() {
                vec![a.g]
            } else {
                a.g_list.clone()
            };
            emit(
                &sweep_spec(schemes, p_grid, g_list, &a.model, &a.run)?,
                &a.run.out,
            )?;
        }
        Command::Figure3(a) => {
            let spec = sweep_spec(
                vec![Scheme::Generation],
                stepped_grid(0.0, 1.0, a.p_step)?,
                a.g_list.clone(),
                &a.model,
                &a.run,
            )?;
            emit(&spec, &a.run.out)?;
        }
        Command::Figure45(a) => {
            let mut grid = stepped_grid(0.0, 1.0, a.p_step)?;
            grid.extend(stepped_grid(0.0, 0.1, a.zoom_step)?);
            let spec = sweep_spec(
                Scheme::ALL.to_vec(),
                dedup_sorted(grid),
                vec![a.g],
                &a.model,
                &a.run,
            )?;
            emit(&spec, &a.run.out)?;
        }
        Command::Validate(a) => {
            let formulas: &dyn Formulas = if a.tamper { &Tampered } else { &ClosedForm };
            let mut failed = false;
            let mut stdout = io::stdout().lock();
            for c in Criterion::ALL
                .into_iter()
                .filter(|c| a.criterion.map_or(true, |o| o == *c))
            {
                let report = run_suite(Some(c), formulas, a.seed).remove(0);
                writeln!(stdout, "{report}")?;
                stdout.flush()?;
                failed |= !report.passed;
            }
            return Ok(u8::from(failed));
        }
        Command::Fig2(a) => {
            let edges: BTreeMap<Edge, f64> = if a.edge.is_empty() {
                check_unit("--p", a.p)?;
                [(Edge::AB, a.p)].into_iter().collect()
            } else {
                a.edge.iter().map(|e| parse_edge(e)).collect::<Result<_>>()?
            };
            print!("{}", fig2_summary(a.g, &edges, a.trials, a.seed)?);
        }
        Command::Accounting(a) => {
            let spec = AccountingSpec {
                n: a.n,
                generation_size: a.g,
                hp_frac: a.hp_frac,
                hg_frac: a.hg_frac,
                k: a.k,
                s: a.s,
                logq: a.logq,
            };
            print!("{}", accounting_report(&spec)?);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
