use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use truncafem::mesh::write_snapshot;
use truncafem::report::{
    effectivity, fit_rate, gnuplot_script, read_history_file, run_experiment, write_indicators, ExperimentConfig,
};

#[derive(Parser)]
#[command(name = "truncafem", version, about = "Adaptive FEM with domain truncation on unbounded planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an adaptive experiment and write its convergence history.
    Run {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Also write per-element indicators of every iteration into this directory.
        #[arg(long)]
        indicators: Option<PathBuf>,
    },
    /// Least-squares rate of a history column against the number of unknowns.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        /// Trailing fraction of the rows used in the fit.
        #[arg(long, default_value_t = 0.5)]
        window: f64,
        #[arg(long, value_enum)]
        column: Option<Column>,
    },
    /// Estimator over error ratios of a history file.
    Effectivity {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Emit a gnuplot script for a history file.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        /// Degree used for the reference slope.
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the mesh of one iteration of an experiment.
    MeshDump {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[arg(long)]
        iter: usize,
        /// Mesh file; stdout if absent.
        #[arg(long = "mesh-out")]
        mesh_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Column {
    Err,
    Est,
}

#[derive(Args)]
struct ExperimentArgs {
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long = "kappa-sq")]
    kappa_sq: Option<f64>,
    #[arg(long)]
    h0: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    /// Zero disables the cap.
    #[arg(long = "dof-cap")]
    dof_cap: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            c.apply_kv(&text).with_context(|| format!("parsing {}", path.display()))?;
        }
        if let Some(v) = &self.problem {
            c.problem = v.clone();
        }
        if let Some(v) = self.p {
            c.p = v;
        }
        if let Some(v) = self.kappa_sq {
            c.kappa_sq = v;
        }
        if let Some(v) = self.h0 {
            c.h0 = v;
        }
        if let Some(v) = self.theta {
            c.theta = v;
        }
        if let Some(v) = self.iters {
            c.max_iterations = v;
        }
        if let Some(v) = self.dof_cap {
            c.dof_cap = (v > 0.0).then_some(v as usize);
        }
        if let Some(v) = &self.out {
            c.output = Some(v.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { experiment, indicators } => run(&experiment, indicators.as_deref()),
        Command::Fit { input, window, column } => fit(&input, window, column),
        Command::Effectivity { input } => {
            let table = read_history_file(&input).with_context(|| format!("reading {}", input.display()))?;
            let e = effectivity(&table)?;
            for r in &e.ratios {
                println!("{r:.6}");
            }
            println!(
                "trailing {}: mean {:.4} cv {:.4}",
                e.trailing, e.trailing_mean, e.trailing_cv
            );
            Ok(())
        }
        Command::Plot { input, p, out } => {
            let table = read_history_file(&input).with_context(|| format!("reading {}", input.display()))?;
            let script = gnuplot_script(&input, &table, p);
            match out {
                Some(path) => std::fs::write(&path, script).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{script}"),
            }
            Ok(())
        }
        Command::MeshDump {
            experiment,
            iter,
            mesh_out,
        } => mesh_dump(&experiment, iter, mesh_out.as_deref()),
    }
}

fn run(args: &ExperimentArgs, indicators: Option<&Path>) -> Result<()> {
    let config = args.resolve()?;
    if let Some(dir) = indicators {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut io_error = None;
    let rows = run_experiment(&config, |step| {
        let Some(dir) = indicators else { return };
        if io_error.is_some() {
            return;
        }
        let path = dir.join(format!("indicators_{:03}.txt", step.row.iteration));
        let res = File::create(&path).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_indicators(&mut w, step.mesh, step.indicators)?;
            w.flush()
        });
        if let Err(e) = res {
            io_error = Some(anyhow::Error::new(e).context(format!("writing {}", path.display())));
        }
    })?;
    if let Some(e) = io_error {
        return Err(e);
    }
    if config.output.is_none() {
        let stdout = std::io::stdout();
        truncafem::report::write_history(stdout.lock(), &rows)?;
    }
    Ok(())
}

fn fit(input: &Path, window: f64, column: Option<Column>) -> Result<()> {
    let table = read_history_file(input).with_context(|| format!("reading {}", input.display()))?;
    let (name, y) = match (column, &table.err) {
        (Some(Column::Est), _) | (None, None) => ("est", &table.est),
        (Some(Column::Err) | None, Some(err)) => ("err", err),
        (Some(Column::Err), None) => bail!("{} has no err column", input.display()),
    };
    let f = fit_rate(&table.dof, y, window)?;
    println!("{name}: slope {:.4} +- {:.4} over {} rows", f.slope, f.stderr, f.n);
    Ok(())
}

fn mesh_dump(args: &ExperimentArgs, iter: usize, out: Option<&Path>) -> Result<()> {
    let mut config = args.resolve()?;
    config.max_iterations = iter;
    config.output = None;
    let mut dumped: Option<Vec<u8>> = None;
    let rows = run_experiment(&config, |step| {
        if step.row.iteration == iter {
            let mut buf = Vec::new();
            write_snapshot(step.forest, step.mesh, &mut buf).expect("writing to memory");
            dumped = Some(buf);
        }
    })?;
    let Some(buf) = dumped else {
        bail!("the run stopped after {} iterations, before iteration {iter}", rows.len().saturating_sub(1));
    };
    match out {
        Some(path) => std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}
