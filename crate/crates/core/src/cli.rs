//! Command-line front end: argument parsing, configuration merging, and
//! deterministic CSV/JSON output.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{absorption_probability, survival_series, QuadratureConfig, SurvivalSample};
use crate::propagator::{cone_sites, SeriesConfig, TimePoint, TimeSlice};
use crate::resolvent::WalkParams;
use crate::verify::{run_all, CriterionReport, Level, VerifyOptions};
use crate::wigner::{wigner_pole_closed_form, wigner_strong_decomposition, wigner_weak_decomposition, WignerField};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on. Serialized verbatim into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub omega: f64,
    pub kappa: f64,
    pub s0: usize,
    pub t_max: f64,
    pub dt: f64,
    /// Site cutoff for the survival sum; defaults to `s0 + ceil(Ωt) + 20`.
    pub sites: Option<usize>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub eta_list: Vec<f64>,
    pub snapshots: Vec<f64>,
    pub m_max: Option<usize>,
    pub k_nodes: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            omega: 1.0,
            kappa: 1.5,
            s0: 3,
            t_max: 30.0,
            dt: 0.1,
            sites: None,
            format: Format::Csv,
            output: None,
            eta_list: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            snapshots: vec![1.0, 3.0, 6.0, 12.0],
            m_max: None,
            k_nodes: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        WalkParams::new(self.omega, self.kappa)?;
        if self.s0 == 0 {
            return Err(Error::invalid("s0 must be >= 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::invalid(format!("t_max must be >= 0, got {}", self.t_max)));
        }
        if let Some(sites) = self.sites {
            if sites < self.s0 {
                return Err(Error::invalid(format!("sites = {sites} must cover s0 = {}", self.s0)));
            }
        }
        if let Some(&eta) = self.eta_list.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::invalid(format!("eta values must be finite and >= 0, got {eta}")));
        }
        if let Some(&t) = self.snapshots.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::invalid(format!("snapshot times must be finite and >= 0, got {t}")));
        }
        if matches!(self.m_max, Some(m) if m < 2) {
            return Err(Error::invalid("m_max must be >= 2"));
        }
        if matches!(self.k_nodes, Some(k) if k < 4) {
            return Err(Error::invalid("k_nodes must be >= 4"));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<WalkParams> {
        WalkParams::new(self.omega, self.kappa)
    }

    /// `0, dt, 2dt, ...` up to and including `t_max` (within rounding).
    pub fn times(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=n).map(|j| j as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits, round-trip exact.
            Cell::Real(v) => format!("{v:.16e}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Real(v) if v.is_finite() => serde_json::Number::from_str(&self.text())
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Real(_) => serde_json::Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, config: &RunConfig, mut out: W) -> Result<()> {
        let data: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "config": config,
            "data": data,
        });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, config: &RunConfig, out: W) -> Result<()> {
        match config.format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(config, out),
        }
    }
}

/// `t, S(t), F(t)` on the configured time grid.
pub fn cmd_survival(config: &RunConfig) -> Result<Table> {
    config.validate()?;
    let params = config.params()?;
    let cfg = SeriesConfig::default();
    let times: Vec<TimePoint> = config
        .times()
        .into_iter()
        .map(|t| TimePoint::new(t, params.omega()))
        .collect::<Result<_>>()?;
    let samples = match config.sites {
        None => survival_series(config.s0, &times, &params, &cfg)?,
        Some(sites) => times
            .iter()
            .map(|&tp| survival_with_cutoff(config.s0, sites, tp, &params, &cfg))
            .collect::<Result<_>>()?,
    };
    let mut table = Table::new(&["t", "S", "F"]);
    for smp in samples {
        table.rows.push(vec![Cell::Real(smp.t), Cell::Real(smp.survival), Cell::Real(smp.first_passage)]);
    }
    Ok(table)
}

fn survival_with_cutoff(
    s0: usize,
    sites: usize,
    tp: TimePoint,
    params: &WalkParams,
    cfg: &SeriesConfig,
) -> Result<SurvivalSample> {
    let slice = TimeSlice::new(params, cfg, tp, sites + s0)?;
    let column = slice.column(s0 as u32, sites as u32)?;
    Ok(SurvivalSample {
        t: tp.t(),
        survival: column.iter().map(|a| a.norm_sqr()).sum(),
        first_passage: params.kappa() * column[0].norm_sqr(),
    })
}

/// `s0, eta, pabs, pabs_dual` for every `η` in the list. The dual of `η = 0` is its `η -> ∞` limit, 0.
pub fn cmd_pabs(config: &RunConfig) -> Result<Table> {
    config.validate()?;
    let q = QuadratureConfig::default();
    let mut table = Table::new(&["s0", "eta", "pabs", "pabs_dual"]);
    for &eta in &config.eta_list {
        let p = absorption_probability(config.s0, eta, &q)?;
        let dual = if eta == 0.0 { 0.0 } else { absorption_probability(config.s0, 1.0 / eta, &q)? };
        table.rows.push(vec![Cell::Int(config.s0 as u64), Cell::Real(eta), Cell::Real(p), Cell::Real(dual)]);
    }
    Ok(table)
}

/// One Wigner grid per snapshot, with channel columns, plus a closed-form pole grid when `η > 1`.
pub fn cmd_wigner(config: &RunConfig) -> Result<Vec<(String, Table)>> {
    config.validate()?;
    let params = config.params()?;
    let cfg = SeriesConfig::default();
    let mut out = Vec::new();
    for (index, &t) in config.snapshots.iter().enumerate() {
        let tp = TimePoint::new(t, params.omega())?;
        let m_max = config.m_max.unwrap_or(2 * cone_sites(config.s0, tp.x()) + 2);
        let k_nodes = config.k_nodes.unwrap_or(2 * m_max + 1);
        let field = if params.is_strong() {
            wigner_strong_decomposition(config.s0, m_max, k_nodes, tp, &params, &cfg)?
        } else {
            wigner_weak_decomposition(config.s0, m_max, k_nodes, tp, &params, &cfg)?
        };
        out.push((format!("wigner_{index:03}"), field_table(&field)));
        if params.is_strong() {
            let mut pole = Table::new(&["m", "x_c", "k", "W_pp"]);
            for m in field.m_values() {
                for &k in field.k_grid() {
                    let w = wigner_pole_closed_form(m, k, tp, config.s0, &params)?;
                    pole.rows.push(vec![Cell::Int(m as u64), Cell::Real(m as f64 / 2.0), Cell::Real(k), Cell::Real(w)]);
                }
            }
            out.push((format!("pole_{index:03}"), pole));
        }
    }
    Ok(out)
}

fn field_table(field: &WignerField) -> Table {
    let mut columns = vec!["m".to_string(), "x_c".into(), "k".into(), "W_total".into()];
    columns.extend(field.channels().iter().map(|c| format!("W_{}", c.name)));
    let mut rows = Vec::new();
    for m in field.m_values() {
        for (j, &k) in field.k_grid().iter().enumerate() {
            let mut row = vec![
                Cell::Int(m as u64),
                Cell::Real(m as f64 / 2.0),
                Cell::Real(k),
                Cell::Real(field.total().value(m, j)),
            ];
            row.extend(field.channels().iter().map(|c| Cell::Real(c.grid.value(m, j))));
            rows.push(row);
        }
    }
    Table { columns, rows }
}

pub fn cmd_verify(level: Level) -> Vec<CriterionReport> {
    run_all(&VerifyOptions::new(level))
}

#[derive(Debug, Parser)]
#[command(name = "absorbing-walk", version, about = "Quantum walk on the half-line with a boundary sink")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Survival probability and first-passage density on a time grid
    Survival(RunArgs),
    /// Total absorption probability and its dual for a list of eta
    Pabs(RunArgs),
    /// Wigner snapshots, one file per snapshot time
    Wigner(RunArgs),
    /// Run the verification suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "quick")]
    pub level: LevelArg,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON file supplying any of the flags below; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub s0: Option<usize>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub sites: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (survival, pabs) or directory (wigner); stdout when omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub eta_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub k_nodes: Option<usize>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    config.$field = v.clone();
                }
            )*};
        }
        take!(omega, kappa, s0, t_max, dt, format, eta_list, snapshots);
        if self.sites.is_some() {
            config.sites = self.sites;
        }
        if self.output.is_some() {
            config.output = self.output.clone();
        }
        if self.m_max.is_some() {
            config.m_max = self.m_max;
        }
        if self.k_nodes.is_some() {
            config.k_nodes = self.k_nodes;
        }
        config.validate()?;
        Ok(config)
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotConverged { .. }
        | Error::InadequateTruncation { .. }
        | Error::StepUnderflow { .. }
        | Error::SingularSystem { .. }
        | Error::PoleEvaluation { .. }
        | Error::InternalConsistency(_) => EXIT_CONVERGENCE,
        _ => EXIT_INVALID,
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn run_command(command: &Command) -> Result<i32> {
    match command {
        Command::Survival(args) => {
            let config = args.resolve()?;
            cmd_survival(&config)?.write(&config, open_output(config.output.as_deref())?)?;
        }
        Command::Pabs(args) => {
            let config = args.resolve()?;
            cmd_pabs(&config)?.write(&config, open_output(config.output.as_deref())?)?;
        }
        Command::Wigner(args) => {
            let config = args.resolve()?;
            let dir = config
                .output
                .clone()
                .ok_or_else(|| Error::invalid("wigner writes one file per snapshot; pass --output <directory>"))?;
            let tables = cmd_wigner(&config)?;
            fs::create_dir_all(&dir)?;
            for (stem, table) in tables {
                let path = dir.join(format!("{stem}.{}", extension(config.format)));
                table.write(&config, open_output(Some(&path))?)?;
            }
        }
        Command::Verify(args) => {
            let level = match args.level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let reports = cmd_verify(level);
            let mut out = open_output(args.output.as_deref())?;
            match args.format.unwrap_or_default() {
                Format::Csv => {
                    for r in &reports {
                        writeln!(out, "{r}")?;
                    }
                }
                Format::Json => {
                    let doc = serde_json::json!({
                        "schema_version": SCHEMA_VERSION,
                        "level": level,
                        "passed": reports.iter().all(CriterionReport::passed),
                        "criteria": reports,
                    });
                    serde_json::to_writer_pretty(&mut out, &doc)?;
                    writeln!(out)?;
                }
            }
            out.flush()?;
            if !reports.iter().all(CriterionReport::passed) {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_command(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
