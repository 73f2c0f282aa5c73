//! Experiment configuration, history files, rate fits and effectivity.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use crate::adaptive::{run_with_observer, AdaptiveConfig, HistoryRow, StepView};
use crate::error::{Error, Result};
use crate::estimator::IndicatorField;
use crate::mesh::ActiveMesh;
use crate::problems::{by_name, Problem};

pub const ALLOWED_H0: [f64; 3] = [1.0, 4.0, 8.0];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: String,
    pub p: usize,
    pub kappa_sq: f64,
    pub h0: f64,
    pub theta: f64,
    pub max_iterations: usize,
    pub dof_cap: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: "smoothed-fundamental".into(),
            p: 1,
            kappa_sq: 1.0,
            h0: 1.0,
            theta: 0.2,
            max_iterations: 100,
            dof_cap: Some(200_000),
            output: None,
        }
    }
}

impl ExperimentConfig {
    /// Applies `key = value` lines (`#` starts a comment) on top of `self`.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", n + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Parse(format!("bad value '{v}' for {key}")))
        }
        match key.replace('-', "_").as_str() {
            "problem" => self.problem = value.to_string(),
            "p" => self.p = num(key, value)?,
            "kappa_sq" => self.kappa_sq = num(key, value)?,
            "h0" => self.h0 = num(key, value)?,
            "theta" => self.theta = num(key, value)?,
            "iters" | "max_iterations" => self.max_iterations = num(key, value)?,
            "dof_cap" => {
                let cap: f64 = num(key, value)?;
                self.dof_cap = (cap > 0.0).then_some(cap as usize);
            }
            "out" | "output" => self.output = Some(PathBuf::from(value)),
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.p) {
            return Err(Error::UnsupportedDegree(self.p));
        }
        if !ALLOWED_H0.contains(&self.h0) {
            return Err(Error::InvalidConfig(format!("h0 must be one of 1, 4, 8; got {}", self.h0)));
        }
        self.adaptive().validate()?;
        let problem = self.build_problem()?;
        crate::adaptive::check_source_support(problem.as_ref())
    }

    pub fn build_problem(&self) -> Result<Box<dyn Problem>> {
        by_name(&self.problem, self.kappa_sq, self.h0)
    }

    pub fn adaptive(&self) -> AdaptiveConfig {
        AdaptiveConfig {
            p: self.p,
            theta: self.theta,
            max_iterations: self.max_iterations,
            dof_cap: self.dof_cap,
            ..AdaptiveConfig::default()
        }
    }
}

/// Validates, runs and (if an output path is set) writes the history file.
pub fn run_experiment(config: &ExperimentConfig, observer: impl FnMut(&StepView)) -> Result<Vec<HistoryRow>> {
    config.validate()?;
    let problem = config.build_problem()?;
    let rows = run_with_observer(problem.as_ref(), &config.adaptive(), observer)?;
    if let Some(path) = &config.output {
        write_history_file(path, &rows)?;
    }
    Ok(rows)
}

/// The columns of a history file.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryTable {
    pub dof: Vec<usize>,
    pub err: Option<Vec<f64>>,
    pub est: Vec<f64>,
}

impl HistoryTable {
    pub fn from_rows(rows: &[HistoryRow]) -> Self {
        let err = if !rows.is_empty() && rows.iter().all(|r| r.error.is_some()) {
            Some(rows.iter().map(|r| r.error.unwrap()).collect())
        } else {
            None
        };
        Self {
            dof: rows.iter().map(|r| r.n_dofs).collect(),
            err,
            est: rows.iter().map(|r| r.estimator).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.dof.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dof.is_empty()
    }
}

/// Writes `dof err est` (or `dof est` without an exact solution), one row per iteration.
pub fn write_history<W: Write>(mut out: W, rows: &[HistoryRow]) -> std::io::Result<()> {
    let t = HistoryTable::from_rows(rows);
    match &t.err {
        Some(_) => writeln!(out, "dof err est")?,
        None => writeln!(out, "dof est")?,
    }
    for i in 0..t.len() {
        match &t.err {
            Some(err) => writeln!(out, "{} {:e} {:e}", t.dof[i], err[i], t.est[i])?,
            None => writeln!(out, "{} {:e}", t.dof[i], t.est[i])?,
        }
    }
    Ok(())
}

pub fn write_history_file(path: &Path, rows: &[HistoryRow]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_history(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

pub fn read_history<R: BufRead>(input: R) -> Result<HistoryTable> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty history file".into()))??;
    let cols: Vec<&str> = header.split_whitespace().collect();
    let find = |name: &str| cols.iter().position(|&c| c == name);
    let dof_col = find("dof").ok_or_else(|| Error::Parse("missing dof column".into()))?;
    let est_col = find("est").ok_or_else(|| Error::Parse("missing est column".into()))?;
    let err_col = find("err");
    let mut t = HistoryTable {
        dof: Vec::new(),
        err: err_col.map(|_| Vec::new()),
        est: Vec::new(),
    };
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != cols.len() {
            return Err(Error::Parse(format!("row {}: expected {} fields", n + 1, cols.len())));
        }
        let bad = |what: &str| Error::Parse(format!("row {}: bad {what}", n + 1));
        t.dof.push(f[dof_col].parse().map_err(|_| bad("dof"))?);
        t.est.push(f[est_col].parse().map_err(|_| bad("est"))?);
        if let (Some(c), Some(err)) = (err_col, t.err.as_mut()) {
            err.push(f[c].parse().map_err(|_| bad("err"))?);
        }
    }
    Ok(t)
}

pub fn read_history_file(path: &Path) -> Result<HistoryTable> {
    let file = std::fs::File::open(path)?;
    read_history(std::io::BufReader::new(file))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub n: usize,
}

/// Least-squares slope of `log y` against `log dof` over the trailing
/// `window` fraction of the rows.
pub fn fit_rate(dof: &[usize], y: &[f64], window: f64) -> Result<RateFit> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidConfig(format!("window must lie in (0, 1], got {window}")));
    }
    let n = dof.len().min(y.len());
    let take = ((n as f64) * window).ceil() as usize;
    if take < 5 {
        return Err(Error::InsufficientData(format!("{take} rows in the fit window, need at least 5")));
    }
    let xs: Vec<f64> = dof[n - take..n].iter().map(|&d| (d as f64).ln()).collect();
    let ys: Vec<f64> = y[n - take..n].iter().map(|&v| v.ln()).collect();
    if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
        return Err(Error::InsufficientData("nonpositive values in the fit window".into()));
    }
    let m = take as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all dof counts in the window are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (sse / (m - 2.0) / sxx).sqrt();
    Ok(RateFit {
        slope,
        stderr,
        intercept,
        n: take,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Effectivity {
    pub ratios: Vec<f64>,
    pub trailing_mean: f64,
    /// Sample standard deviation over mean of the trailing ratios.
    pub trailing_cv: f64,
    pub trailing: usize,
}

pub const EFFECTIVITY_WINDOW: usize = 20;

/// `eta / err` per row and statistics over the last 20 rows.
pub fn effectivity(table: &HistoryTable) -> Result<Effectivity> {
    let err = table
        .err
        .as_ref()
        .ok_or_else(|| Error::InsufficientData("history has no err column".into()))?;
    let ratios: Vec<f64> = table.est.iter().zip(err).map(|(e, r)| e / r).collect();
    let k = ratios.len().min(EFFECTIVITY_WINDOW);
    if k < 2 {
        return Err(Error::InsufficientData("need at least two rows".into()));
    }
    let tail = &ratios[ratios.len() - k..];
    let mean = tail.iter().sum::<f64>() / k as f64;
    let var = tail.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    Ok(Effectivity {
        trailing_cv: var.sqrt() / mean,
        trailing_mean: mean,
        trailing: k,
        ratios,
    })
}

/// Writes `element_id eta_sq volume_sq jump_sq osc_sq`, one active element per line.
pub fn write_indicators<W: Write>(mut out: W, mesh: &ActiveMesh, field: &IndicatorField) -> std::io::Result<()> {
    writeln!(out, "element_id eta_sq volume_sq jump_sq osc_sq")?;
    for (e, id) in mesh.elements.iter().enumerate() {
        writeln!(
            out,
            "{id} {:e} {:e} {:e} {:e}",
            field.eta_sq(e),
            field.volume[e],
            field.jump[e],
            field.oscillation[e]
        )?;
    }
    Ok(())
}

/// A gnuplot script drawing the convergence history on log-log axes with
/// a reference slope `-p/2`.
pub fn gnuplot_script(data: &Path, table: &HistoryTable, p: usize) -> String {
    let name = data.display();
    let mut s = String::new();
    let _ = writeln!(s, "set logscale xy");
    let _ = writeln!(s, "set xlabel 'N_dofs'");
    let _ = writeln!(s, "set key bottom left");
    let _ = writeln!(s, "set format y '%.0e'");
    let (x0, y0) = match (table.dof.first(), table.est.first()) {
        (Some(&d), Some(&e)) => (d.max(1) as f64, e),
        _ => (1.0, 1.0),
    };
    let rate = p as f64 / 2.0;
    let _ = writeln!(s, "ref(x) = {y0:e} * ({x0:e} / x)**{rate}");
    let mut plots = Vec::new();
    if table.err.is_some() {
        plots.push(format!("'{name}' using 1:2 with linespoints title 'err'"));
        plots.push(format!("'{name}' using 1:3 with linespoints title 'est'"));
    } else {
        plots.push(format!("'{name}' using 1:2 with linespoints title 'est'"));
    }
    plots.push(format!("ref(x) with lines dashtype 2 title 'N^(-{rate})'"));
    let _ = writeln!(s, "plot {}", plots.join(", \\\n     "));
    s
}
