//! Command-line front end.
//!
//! [`run`] parses arguments, executes one command and returns the exit code
//! together with what should be printed, so it can be driven from tests.
//!
//! Exit codes: 0 success or compliant, 2 usage error, 3 data error or failed
//! reproduction check, 4 monotonicity violation found.

pub mod args;
pub mod report;
pub mod reproduce;
pub mod schema;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;

use crate::domain::Dataset;
use crate::error::Error;
use crate::indexes::{
    decompose_index, hpm_timedummy_index, npgm_index, IndexMethod, DEFAULT_BASE_VALUE,
};
use crate::monotonicity::{
    audit_perturbation, default_grid, melser_diagnostic, random_perturbation_audit,
    search_violations, Perturbation,
};
use crate::regression::{fit, ModelSpec, Regressor};
use crate::renoir;

use args::{
    Cli, Command, DataArgs, DecomposeArgs, FitArgs, FormatArg, IndexArgs, MethodArg, ModeArg,
    MonotonicityArgs, ReproduceArgs,
};
use report::{Report, ReportBody};
use schema::{InputSchema, SizeColumns};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

const DEFAULT_RANDOM_TRIALS: usize = 1000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::UnknownCharacteristic { .. }
            | Error::UnknownPeriod(_)
            | Error::UnknownObservation(_)
            | Error::InvalidModel(_)
            | Error::InvalidPerturbation(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Execution {
                    exit_code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Execution {
                    exit_code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(cli) {
        Ok(exec) => exec,
        Err(e) => Execution {
            exit_code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("{e}\n"),
        },
    }
}

fn load_config(path: Option<&Path>) -> Result<toml::Table, CliError> {
    let Some(path) = path else {
        return Ok(toml::Table::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
}

fn from_config<T: serde::de::DeserializeOwned>(table: &toml::Table) -> Result<T, CliError> {
    toml::Value::Table(table.clone())
        .try_into()
        .map_err(|e| usage(format!("invalid config: {e}")))
}

fn execute(cli: Cli) -> Result<Execution, CliError> {
    let config = load_config(cli.config.as_deref())?;
    let name = cli.command.name();
    let (report, format, output, code) = match cli.command {
        Command::Index(mut a) => {
            a.merge(&from_config(&config)?);
            let r = cmd_index(&a)?;
            (r, a.out.format, a.out.output, EXIT_OK)
        }
        Command::Fit(mut a) => {
            a.merge(&from_config(&config)?);
            let r = cmd_fit(&a)?;
            (r, a.out.format, a.out.output, EXIT_OK)
        }
        Command::Decompose(mut a) => {
            a.merge(&from_config(&config)?);
            let r = cmd_decompose(&a)?;
            (r, a.out.format, a.out.output, EXIT_OK)
        }
        Command::Monotonicity(mut a) => {
            a.merge(&from_config(&config)?);
            let r = cmd_monotonicity(&a)?;
            let code = match &r.body {
                ReportBody::Monotonicity { report, .. } if !report.is_compliant() => EXIT_VIOLATION,
                _ => EXIT_OK,
            };
            (r, a.out.format, a.out.output, code)
        }
        Command::Reproduce(mut a) => {
            a.merge(&from_config(&config)?);
            let r = cmd_reproduce(&a)?;
            let code = match &r.body {
                ReportBody::Reproduce { summary } if !summary.all_passed => EXIT_DATA,
                _ => EXIT_OK,
            };
            (r, a.format, None, code)
        }
    };
    let format = format.unwrap_or(FormatArg::Table);
    let rendered = report
        .render(format)
        .ok_or_else(|| usage(format!("format {format:?} is not available for {name}")))?;
    let stdout = match output {
        Some(path) => {
            std::fs::write(&path, rendered).map_err(|e| CliError::Data(e.into()))?;
            String::new()
        }
        None => rendered,
    };
    Ok(Execution {
        exit_code: code,
        stdout,
        stderr: String::new(),
    })
}

fn config_echo<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

/// Column layout from flags, defaulting to the bundled fixture's layout.
pub fn schema_from(args: &DataArgs) -> Result<InputSchema, CliError> {
    let mut schema = InputSchema::default();
    if let Some(v) = &args.id_col {
        schema.id = v.clone();
    }
    if let Some(v) = &args.period_col {
        schema.period = v.clone();
    }
    if let Some(v) = &args.price_col {
        schema.price = v.clone();
    }
    match (&args.area_col, &args.height_col, &args.width_col) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(usage(
                "map either an area column or height and width columns, not both",
            ))
        }
        (Some(a), None, None) => schema.size = SizeColumns::Area(a.clone()),
        (None, Some(h), Some(w)) => {
            schema.size = SizeColumns::Dimensions {
                height: h.clone(),
                width: w.clone(),
            };
            schema.aspect_ratio = None;
        }
        (None, Some(_), None) | (None, None, Some(_)) => {
            return Err(usage("height and width columns must be given together"))
        }
        (None, None, None) => {}
    }
    if let Some(v) = &args.ratio_col {
        schema.aspect_ratio = Some(v.clone());
    }
    if let Some(v) = &args.extra_cols {
        schema.extra = v.clone();
    }
    if let Some(v) = args.delimiter {
        schema.delimiter = v;
    }
    if let Some(v) = args.decimal_separator {
        schema.decimal_separator = v;
    }
    if let Some(v) = args.no_header {
        schema.has_header = !v;
    }
    schema.period_order = args.period_order.clone();
    Ok(schema)
}

/// Loads `--data`, or the bundled A/B fixture when absent.
pub fn load_data(args: &DataArgs) -> Result<Dataset, CliError> {
    let schema = schema_from(args)?;
    match &args.data {
        Some(path) => Ok(schema::load_csv(path, &schema)?),
        None => {
            let ds = renoir::table1();
            match &schema.period_order {
                Some(order) => Ok(crate::domain::validate_dataset(
                    ds.observations().to_vec(),
                    Some(order),
                )?),
                None => Ok(ds),
            }
        }
    }
}

fn parse_regressors(names: Option<&Vec<String>>) -> Result<Vec<Regressor>, CliError> {
    match names {
        None => Ok(vec![Regressor::Area, Regressor::AspectRatio]),
        Some(list) => list
            .iter()
            .map(|n| n.parse::<Regressor>().map_err(CliError::from))
            .collect(),
    }
}

fn first_period(ds: &Dataset) -> String {
    ds.periods()[0].clone()
}

fn dataset_warnings(args: &DataArgs) -> Vec<String> {
    if args.data.is_none() {
        vec![format!(
            "no --data given; using bundled {}",
            renoir::FIXTURE_NAME
        )]
    } else {
        Vec::new()
    }
}

pub fn cmd_index(args: &IndexArgs) -> Result<Report, CliError> {
    let ds = load_data(&args.data)?;
    let base = args.base.clone().unwrap_or_else(|| first_period(&ds));
    let base_value = args.base_value.unwrap_or(DEFAULT_BASE_VALUE);
    let method = args.method.unwrap_or(MethodArg::Npgm);
    let body = match method {
        MethodArg::Npgm => ReportBody::Index {
            series: npgm_index(&ds, &base, base_value)?,
            regression: None,
        },
        MethodArg::Hpm => {
            let spec = ModelSpec::new(parse_regressors(args.regressors.as_ref())?, base);
            let h = hpm_timedummy_index(&ds, &spec, base_value)?;
            ReportBody::Index {
                series: h.series,
                regression: Some(h.regression),
            }
        }
    };
    Ok(Report {
        command: "index".into(),
        config: config_echo(args),
        body,
        warnings: dataset_warnings(&args.data),
    })
}

pub fn cmd_fit(args: &FitArgs) -> Result<Report, CliError> {
    let ds = load_data(&args.data)?;
    let reference = args.reference.clone().unwrap_or_else(|| first_period(&ds));
    let spec = ModelSpec::new(parse_regressors(args.regressors.as_ref())?, reference);
    let regression = fit(&ds, &spec)?;
    Ok(Report {
        command: "fit".into(),
        config: config_echo(args),
        body: ReportBody::Fit { regression },
        warnings: dataset_warnings(&args.data),
    })
}

pub fn cmd_decompose(args: &DecomposeArgs) -> Result<Report, CliError> {
    let ds = load_data(&args.data)?;
    ds.require_periods(2)?;
    let p0 = args
        .period0
        .clone()
        .unwrap_or_else(|| ds.periods()[0].clone());
    let p1 = args
        .period1
        .clone()
        .unwrap_or_else(|| ds.periods()[1].clone());
    let spec = ModelSpec::new(parse_regressors(args.regressors.as_ref())?, p0.clone());
    let decomposition = decompose_index(&ds, &spec, &p0, &p1)?;
    Ok(Report {
        command: "decompose".into(),
        config: config_echo(args),
        body: ReportBody::Decomposition { decomposition },
        warnings: dataset_warnings(&args.data),
    })
}

pub fn cmd_monotonicity(args: &MonotonicityArgs) -> Result<Report, CliError> {
    let ds = load_data(&args.data)?;
    let base = args.base.clone().unwrap_or_else(|| first_period(&ds));
    let method = match args.method.unwrap_or(MethodArg::Npgm) {
        MethodArg::Npgm => IndexMethod::Npgm,
        MethodArg::Hpm => IndexMethod::HpmTimeDummy {
            spec: ModelSpec::new(parse_regressors(args.regressors.as_ref())?, base.clone()),
        },
    };
    let mut report = match args.mode.unwrap_or(ModeArg::Grid) {
        ModeArg::Single => {
            let id = args
                .obs
                .as_deref()
                .ok_or_else(|| usage("--mode single requires --obs"))?;
            let m = args
                .multiplier
                .ok_or_else(|| usage("--mode single requires --multiplier"))?;
            let pert = Perturbation::scaling(&ds, id, m)?;
            let mut r = audit_perturbation(&ds, &method, &base, &pert)?;
            for v in &mut r.violations {
                v.description = format!("obs {id} price x{m}");
            }
            r
        }
        ModeArg::Grid => {
            let grid = args.grid.clone().unwrap_or_else(default_grid);
            search_violations(&ds, &method, &base, &grid)?
        }
        ModeArg::Random => {
            let seed = args
                .seed
                .ok_or_else(|| usage("--mode random requires --seed"))?;
            let trials = args.trials.unwrap_or(DEFAULT_RANDOM_TRIALS);
            random_perturbation_audit(&ds, &method, &base, trials, seed)?
        }
    };
    let melser = match &args.melser {
        None => None,
        Some(name) => {
            let other = ds.periods().iter().find(|p| **p != base).ok_or_else(|| {
                CliError::from(Error::TooFewPeriods {
                    required: 2,
                    found: 1,
                })
            })?;
            let regressor: Regressor = name.parse()?;
            let m = melser_diagnostic(&ds, &regressor, &base, other)?;
            report.melser_statistic = Some(m.correlation);
            Some(m)
        }
    };
    Ok(Report {
        command: "monotonicity".into(),
        config: config_echo(args),
        body: ReportBody::Monotonicity { report, melser },
        warnings: dataset_warnings(&args.data),
    })
}

pub fn cmd_reproduce(args: &ReproduceArgs) -> Result<Report, CliError> {
    let out_dir: PathBuf = args
        .out_dir
        .clone()
        .ok_or_else(|| usage("reproduce requires --out-dir"))?;
    let ab = match &args.data {
        Some(path) => schema::load_csv(path, &InputSchema::default())?,
        None => renoir::table1(),
    };
    let summary = reproduce::reproduce(&ab, &out_dir)?;
    let report = Report {
        command: "reproduce".into(),
        config: config_echo(args),
        body: ReportBody::Reproduce { summary },
        warnings: Vec::new(),
    };
    std::fs::write(
        out_dir.join("summary.json"),
        report.to_json().map_err(|e| CliError::Data(e.into()))?,
    )
    .map_err(|e| CliError::Data(e.into()))?;
    Ok(report)
}
