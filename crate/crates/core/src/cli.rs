//! Command-line front end. Exit codes: 0 success, 1 configuration or input
//! error, 2 numerical failure (for instance a window that is not a Gabor frame).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gabor::{dual_residual, GaborLattice, GaborSystem};
use crate::harness::{
    init_threads, run_experiment, ExperimentConfig, ExperimentName, IdealChoice, LatticeEntry,
    LatticeSpec, Target,
};
use crate::lattice::{Grid, Signal};
use crate::quant::{kernel_of_symbol, symbol_of_kernel, KernelMatrix, QuantMatrix};
use crate::spaces::{modnorm, tensor_norm_upper_with, Exponent, ModSpec};
use crate::timefreq::{stft, PhaseArray};
use crate::weights::{standard_weight, WeightKind};

#[derive(Parser, Debug)]
#[command(name = "tfq", version, about = "Time-frequency analysis and operator ideals on Z_N^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Short-time Fourier transform of a signal.
    Stft(StftArgs),
    /// Canonical dual window of a Gabor system.
    Dualwin(DualArgs),
    /// Modulation quasi-norm of a signal.
    Modnorm(ModnormArgs),
    /// Kernel of a symbol, or symbol of a kernel.
    Quantize(QuantizeArgs),
    /// Schatten-class bounds for pseudo-differential operators.
    Schatten(ExperimentArgs),
    /// Nuclear bounds for pseudo-differential operators.
    Nuclear(ExperimentArgs),
    /// Minimality of M^p among shift-invariant quasi-norms.
    Minimality(ExperimentArgs),
    /// Maximality of M^inf_(1/v) among shift-invariant norms.
    Maximality(ExperimentArgs),
    /// Ideal bounds for operators given by kernels.
    Kernels(ExperimentArgs),
    /// Projective tensor bound of a signal on Z_N^2.
    Tensor(TensorArgs),
}

#[derive(Args, Debug)]
struct StftArgs {
    #[arg(long)]
    signal: PathBuf,
    /// Window JSON; defaults to the normalized Gaussian.
    #[arg(long)]
    window: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DualArgs {
    #[arg(long)]
    window: Option<PathBuf>,
    #[arg(long)]
    a: usize,
    #[arg(long)]
    b: usize,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModnormArgs {
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    p: Exponent,
    /// Defaults to `p`.
    #[arg(long)]
    q: Option<Exponent>,
    /// `constant`, `polynomial:s` or `exponential:r`.
    #[arg(long, default_value = "constant")]
    weight: WeightKind,
    #[arg(long)]
    window: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct QuantizeArgs {
    #[arg(long, conflicts_with = "kernel", required_unless_present = "kernel")]
    symbol: Option<PathBuf>,
    #[arg(long)]
    kernel: Option<PathBuf>,
    /// `u`, `u/v` or a JSON integer matrix.
    #[arg(long = "A", default_value = "0")]
    quant: QuantMatrix,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TensorArgs {
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    p: Exponent,
    #[arg(long, default_value = "constant")]
    v1: WeightKind,
    #[arg(long, default_value = "constant")]
    v2: WeightKind,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated moduli.
    #[arg(long = "N", value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ensemble: Option<usize>,
    #[arg(long)]
    p: Option<Exponent>,
    #[arg(long)]
    q: Option<Exponent>,
    #[arg(long)]
    r: Option<Exponent>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    omega: Option<WeightKind>,
    #[arg(long)]
    v: Option<WeightKind>,
    #[arg(long)]
    omega0: Option<WeightKind>,
    #[arg(long)]
    omega1: Option<WeightKind>,
    #[arg(long)]
    omega2: Option<WeightKind>,
    #[arg(long = "A")]
    quant: Option<QuantMatrix>,
    #[arg(long, value_enum)]
    target: Option<TargetArg>,
    #[arg(long, value_enum)]
    ideal: Option<IdealArg>,
    /// `d1,d2`.
    #[arg(long, value_delimiter = ',')]
    kernel_dims: Option<Vec<usize>>,
    #[arg(long)]
    budget: Option<f64>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum TargetArg {
    Modulation,
    Atomic,
    Lattice,
    Window,
    Matrix,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum IdealArg {
    Schatten,
    Nuclear,
}

impl ExperimentArgs {
    fn config(&self, name: ExperimentName) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let cfg = ExperimentConfig::load(path)?;
                if cfg.name != name {
                    return Err(Error::Config(format!(
                        "config {} describes {:?}, not {name:?}",
                        path.display(),
                        cfg.name
                    )));
                }
                cfg
            }
            None => {
                let seed = self
                    .seed
                    .ok_or_else(|| Error::Config("either --config or --seed is required".into()))?;
                ExperimentConfig::new(name, seed)
            }
        };
        if let Some(ns) = &self.ns {
            cfg.ns = ns.clone();
        }
        if let Some(d) = self.d {
            cfg.d = d;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = self.ensemble {
            cfg.ensemble = e;
        }
        cfg.p = self.p.or(cfg.p);
        cfg.q = self.q.or(cfg.q);
        cfg.r = self.r.or(cfg.r);
        match (self.a, self.b) {
            (Some(a), Some(b)) => cfg.lattice = Some(LatticeSpec::Single(LatticeEntry { n: None, a, b })),
            (None, None) => {}
            _ => return Err(Error::Config("--a and --b go together".into())),
        }
        let w = &mut cfg.weights;
        for (slot, flag) in [
            (&mut w.omega, self.omega),
            (&mut w.v, self.v),
            (&mut w.omega0, self.omega0),
            (&mut w.omega1, self.omega1),
            (&mut w.omega2, self.omega2),
        ] {
            if let Some(k) = flag {
                *slot = k;
            }
        }
        if let Some(qm) = &self.quant {
            cfg.quant = qm.clone();
        }
        if let Some(t) = self.target {
            cfg.target = Some(match t {
                TargetArg::Modulation => Target::Modulation,
                TargetArg::Atomic => Target::Atomic,
                TargetArg::Lattice => Target::Lattice,
                TargetArg::Window => Target::Window,
                TargetArg::Matrix => Target::Matrix,
            });
        }
        if let Some(i) = self.ideal {
            cfg.ideal = Some(match i {
                IdealArg::Schatten => IdealChoice::Schatten,
                IdealArg::Nuclear => IdealChoice::Nuclear,
            });
        }
        if let Some(k) = &self.kernel_dims {
            match k.as_slice() {
                &[d1, d2] => cfg.kernel_dims = Some((d1, d2)),
                _ => return Err(Error::Config("--kernel-dims takes d1,d2".into())),
            }
        }
        if let Some(b) = self.budget {
            cfg.tolerances.growth_budget = b;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Writes `value` to `dir/file` when `dir` is given, else prints it.
fn emit<T: Serialize>(value: &T, out: Option<&Path>, file: &str) -> Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(file);
            std::fs::write(&path, json)?;
            println!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn window_or_gaussian(path: Option<&PathBuf>, grid: Grid) -> Result<Signal> {
    match path {
        Some(p) => {
            let w: Signal = read_json(p)?;
            if w.grid() != grid {
                return Err(Error::GridMismatch("window and signal live on different grids".into()));
            }
            Ok(w)
        }
        None => Ok(Signal::gaussian(grid)),
    }
}

#[derive(Serialize)]
struct DualOutput {
    dual: Signal,
    frame_bounds: (f64, f64),
    residual: f64,
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Stft(a) => {
            let f: Signal = read_json(&a.signal)?;
            let w = window_or_gaussian(a.window.as_ref(), f.grid())?;
            emit(&stft(&f, &w)?, a.out.as_deref(), "stft.json")
        }
        Command::Dualwin(a) => {
            let window = match (&a.window, a.n) {
                (Some(p), n) => {
                    let w: Signal = read_json(p)?;
                    if n.is_some_and(|n| n != w.grid().n()) {
                        return Err(Error::Config(format!(
                            "--N {} does not match the window modulus {}",
                            n.unwrap_or(0),
                            w.grid().n()
                        )));
                    }
                    w
                }
                (None, Some(n)) => Signal::gaussian(Grid::new(n, a.d)?),
                (None, None) => return Err(Error::Config("give --window or --N".into())),
            };
            let lattice = GaborLattice::new(window.grid(), a.a, a.b)?;
            let sys = GaborSystem::new(window, lattice)?;
            let dual = sys.canonical_dual()?.clone();
            let residual = dual_residual(sys.window(), &dual, &lattice)?;
            let out = DualOutput {
                dual,
                frame_bounds: sys.frame_bounds(),
                residual,
            };
            emit(&out, a.out.as_deref(), "dual.json")
        }
        Command::Modnorm(a) => {
            let f: Signal = read_json(&a.signal)?;
            let grid = f.grid();
            let w = window_or_gaussian(a.window.as_ref(), grid)?;
            let spec = ModSpec::new(a.p, a.q.unwrap_or(a.p), standard_weight(a.weight, grid.phase_domain()), w)?;
            println!("{:.17e}", modnorm(&f, &spec)?);
            Ok(())
        }
        Command::Quantize(a) => match (&a.symbol, &a.kernel) {
            (Some(s), _) => {
                let sym: PhaseArray = read_json(s)?;
                emit(&kernel_of_symbol(&sym, &a.quant)?, a.out.as_deref(), "kernel.json")
            }
            (None, Some(k)) => {
                let ker: KernelMatrix = read_json(k)?;
                emit(&symbol_of_kernel(&ker, &a.quant)?, a.out.as_deref(), "symbol.json")
            }
            (None, None) => Err(Error::Config("give --symbol or --kernel".into())),
        },
        Command::Tensor(a) => {
            let f: Signal = read_json(&a.signal)?;
            let g1 = Grid::new(f.grid().n(), 1)?;
            let pd = g1.phase_domain();
            let b = tensor_norm_upper_with(
                &f,
                a.p,
                &standard_weight(a.v1, pd),
                &standard_weight(a.v2, pd),
                &Signal::gaussian(g1),
            )?;
            println!("{:.17e}", b.bound);
            Ok(())
        }
        Command::Schatten(a) => experiment(a, ExperimentName::Schatten),
        Command::Nuclear(a) => experiment(a, ExperimentName::Nuclear),
        Command::Minimality(a) => experiment(a, ExperimentName::Minimality),
        Command::Maximality(a) => experiment(a, ExperimentName::Maximality),
        Command::Kernels(a) => experiment(a, ExperimentName::Kernels),
    }
}

fn experiment(args: ExperimentArgs, name: ExperimentName) -> Result<()> {
    let cfg = args.config(name)?;
    let report = run_experiment(&cfg)?;
    println!("{}", report.summary());
    if let Some(dir) = &args.out {
        let (json, csv) = report.write(dir)?;
        println!("wrote {} and {}", json.display(), csv.display());
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}
