//! The `tchebdesign` command-line front end.
//!
//! Every subcommand renders to a `String`; the binary only prints it and maps
//! errors to exit codes (2 for bad input, 3 for numerical failures).

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::design::{criteria, random_search_from, tcheb_design, Design, SearchConfig};
use crate::error::Error;
use crate::tcheb::{
    approx_tcheb_function, dette_weight_source, exact_tcheb_function_with_grid, TchebFunction,
    TchebOptions, DEFAULT_EXTREMUM_GRID,
};
use crate::weight::WeightFn;

const WEIGHT_GRAMMAR: &str = "\
WEIGHT GRAMMAR
  expr    := term (('+' | '-') term)*
  term    := factor (('*' | '/') factor)*
  factor  := unary ('^' factor)?          (right associative)
  unary   := '-' unary | primary
  primary := number | 'x' | 'exp' '(' expr ')' | '(' expr ')'

  Unary minus binds tighter than '^', so -x^2 is (-x)^2.
  A negative base with a fractional exponent is an evaluation error.

EXAMPLES
  tchebdesign design --weight \"1\" --m 3 --method jacobi
  tchebdesign table --weight \"(1-x)^0.5*(2+x)^0.5\" --m-list 3 10 --with-efficiency
  tchebdesign plotdata --weight \"1-x\" --m 8 --method jacobi";

#[derive(Debug, Parser)]
#[command(name = "tchebdesign", version, about = "E-optimal designs for weighted polynomial regression", after_help = WEIGHT_GRAMMAR)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one Tchebycheff design and report it.
    Design(DesignArgs),
    /// One design per model size, in the layout of a results table.
    Table(TableArgs),
    /// Sample the Tchebycheff function as CSV for plotting.
    Plotdata(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Gram-Schmidt approximation; any positive weight.
    Approx,
    /// Closed form via Jacobi polynomials; weights (1-x)^a (1+x)^b with a, b in {0, 1}.
    Jacobi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Human-readable, rounded to 4 significant digits.
    Table,
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// Regression weight w(x); see the grammar below.
    #[arg(long, allow_hyphen_values = true)]
    pub weight: String,
    /// Design interval.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, default_values_t = [-1.0, 1.0])]
    pub interval: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Method::Approx)]
    pub method: Method,
    /// Chebyshev-Gauss nodes for the inner product.
    #[arg(long, default_value_t = crate::quadrature::DEFAULT_NODE_COUNT)]
    pub nodes: usize,
    /// Grid size for the extremum scan.
    #[arg(long, default_value_t = DEFAULT_EXTREMUM_GRID)]
    pub grid: usize,
}

#[derive(Clone, Debug, Args)]
pub struct EfficiencyArgs {
    /// Also compute a reference design and report 1 - E-efficiency.
    #[arg(long)]
    pub with_efficiency: bool,
    /// Evaluation budget of the random-search reference.
    #[arg(long, default_value_t = 200_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Threads for the search (does not change the result).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Clone, Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Model size (number of regression functions), 2..=16.
    #[arg(long)]
    pub m: usize,
    #[command(flatten)]
    pub efficiency: EfficiencyArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, num_args = 1.., required = true)]
    pub m_list: Vec<usize>,
    #[command(flatten)]
    pub efficiency: EfficiencyArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub m: usize,
    /// Number of uniform samples, endpoints included.
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Failed(_) => 3,
        }
    }

    fn context(self, what: &str) -> Self {
        match self {
            CliError::Invalid(msg) => CliError::Invalid(format!("{what}: {msg}")),
            CliError::Failed(msg) => CliError::Failed(format!("{what}: {msg}")),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Evaluation { .. } | Error::Poly(_) => {
                CliError::Invalid(e.to_string())
            }
            Error::Degenerate(_)
            | Error::Structure(_)
            | Error::Infeasible(_)
            | Error::Singular(_)
            | Error::SingularFisher { .. } => CliError::Failed(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignReport {
    pub request: Request,
    pub design: DesignRecord,
    pub lambda_min: f64,
    pub criteria: CriteriaRecord,
    pub diagnostics: Diagnostics,
    pub reference: Option<Reference>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Request {
    pub weight: String,
    pub m: usize,
    pub interval: [f64; 2],
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignRecord {
    pub support: Vec<f64>,
    pub masses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriteriaRecord {
    pub e: f64,
    pub d: f64,
    pub a: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub mass_sum_raw: f64,
    pub equioscillation_gap: f64,
    pub quadrature_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    /// `exact` (Jacobi design) or `random_search`.
    pub method: String,
    pub lambda_min: f64,
    pub one_minus_efficiency: f64,
}

/// `(α, β)` if the weight text is one of the recognised spellings of
/// `(1-x)^α (1+x)^β`, `α, β ∈ {0, 1}`.
pub fn dette_alias(text: &str) -> Option<(u8, u8)> {
    let normalized: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let minus = ["1-x", "-x+1"];
    let plus = ["1+x", "x+1"];
    let single = |forms: &[&str]| {
        forms.iter().any(|f| {
            normalized == *f || normalized == format!("({f})") || normalized == format!("({f})^1")
        })
    };
    if ["1", "(1)", "1.0"].contains(&normalized.as_str()) {
        return Some((0, 0));
    }
    if single(&minus) {
        return Some((1, 0));
    }
    if single(&plus) {
        return Some((0, 1));
    }
    if ["1-x^2", "(1-x^2)", "1-x*x", "-x^2+1"].contains(&normalized.as_str()) {
        return Some((1, 1));
    }
    for p in minus {
        for q in plus {
            for (l, r) in [(p, q), (q, p)] {
                for (el, er) in [("", ""), ("^1", "^1")] {
                    if normalized == format!("({l}){el}*({r}){er}") {
                        return Some((1, 1));
                    }
                }
            }
        }
    }
    None
}

fn is_unit_interval(interval: (f64, f64)) -> bool {
    interval == (-1.0, 1.0)
}

struct Prepared {
    weight: WeightFn,
    interval: (f64, f64),
    dette: Option<(u8, u8)>,
}

fn prepare(common: &CommonArgs) -> Result<Prepared, CliError> {
    let weight = WeightFn::parse(&common.weight)
        .map_err(|e| CliError::Invalid(format!("cannot parse weight `{}`: {e}", common.weight)))?;
    let interval = (common.interval[0], common.interval[1]);
    if !(interval.0 < interval.1) || !interval.0.is_finite() || !interval.1.is_finite() {
        return Err(CliError::Invalid(format!(
            "interval must satisfy a < b, got [{}, {}]",
            interval.0, interval.1
        )));
    }
    if common.nodes < 1 || common.grid < 3 {
        return Err(CliError::Invalid(
            "--nodes must be ≥ 1 and --grid ≥ 3".into(),
        ));
    }
    let dette = dette_alias(&common.weight).filter(|_| is_unit_interval(interval));
    if common.method == Method::Jacobi && dette.is_none() {
        return Err(CliError::Invalid(format!(
            "--method jacobi needs a weight (1-x)^a(1+x)^b with a, b in {{0,1}} on [-1, 1]; got `{}`",
            common.weight
        )));
    }
    Ok(Prepared {
        weight,
        interval,
        dette,
    })
}

fn check_m(m: usize) -> Result<(), CliError> {
    if (2..=16).contains(&m) {
        Ok(())
    } else {
        Err(CliError::Invalid(format!(
            "m must be between 2 and 16, got {m}"
        )))
    }
}

fn build_kappa(common: &CommonArgs, prep: &Prepared, m: usize) -> Result<TchebFunction, CliError> {
    let kappa = match (common.method, prep.dette) {
        (Method::Jacobi, Some((alpha, beta))) => {
            exact_tcheb_function_with_grid(m, alpha, beta, common.grid)?
        }
        _ => {
            let options = TchebOptions {
                nodes: common.nodes,
                grid: common.grid,
                ..TchebOptions::default()
            };
            approx_tcheb_function(m, &prep.weight, prep.interval, options)?
        }
    };
    Ok(kappa)
}

fn design_report(
    common: &CommonArgs,
    prep: &Prepared,
    m: usize,
    efficiency: &EfficiencyArgs,
) -> Result<DesignReport, CliError> {
    check_m(m)?;
    let kappa = build_kappa(common, prep, m)?;
    let td = tcheb_design(&kappa, kappa.points())?;
    let crit = criteria(&td.design, m, &prep.weight)?;
    let reference = if efficiency.with_efficiency {
        Some(reference(prep, m, &td.design, crit.e_value, efficiency)?)
    } else {
        None
    };
    Ok(DesignReport {
        request: Request {
            weight: common.weight.clone(),
            m,
            interval: [prep.interval.0, prep.interval.1],
            method: common.method,
        },
        design: DesignRecord {
            support: td.design.support().to_vec(),
            masses: td.design.masses().to_vec(),
        },
        lambda_min: crit.e_value,
        criteria: CriteriaRecord {
            e: crit.e_value,
            d: crit.d_value,
            a: crit.a_value,
        },
        diagnostics: Diagnostics {
            mass_sum_raw: td.mass_sum_raw,
            equioscillation_gap: kappa.points().equioscillation_gap(),
            quadrature_delta: kappa.quadrature_delta(),
        },
        reference,
    })
}

fn reference(
    prep: &Prepared,
    m: usize,
    design: &Design,
    lambda: f64,
    args: &EfficiencyArgs,
) -> Result<Reference, CliError> {
    let (method, ref_lambda) = match prep.dette {
        Some((alpha, beta)) => {
            let exact = exact_tcheb_function_with_grid(m, alpha, beta, DEFAULT_EXTREMUM_GRID)?;
            let exact_design = tcheb_design(&exact, exact.points())?.design;
            ("exact", criteria(&exact_design, m, &prep.weight)?.e_value)
        }
        None => {
            if args.budget == 0 {
                return Err(CliError::Invalid("--budget must be at least 1".into()));
            }
            let mut config = SearchConfig::new(args.budget, args.seed);
            config.workers = args
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let out = random_search_from(design, m, &prep.weight, prep.interval, &config)?;
            ("random_search", out.lambda_min)
        }
    };
    if !(ref_lambda > 0.0) {
        return Err(CliError::Failed(format!(
            "reference design has λ_min = {ref_lambda:e}"
        )));
    }
    Ok(Reference {
        method: method.into(),
        lambda_min: ref_lambda,
        one_minus_efficiency: 1.0 - lambda / ref_lambda,
    })
}

/// Rounds to `digits` significant digits for display.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    if (-3..4).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // rounding may carry into the next decade; fall back to scientific
        if s.trim_start_matches('-')
            .replace('.', "")
            .trim_start_matches('0')
            .len()
            > digits
        {
            return format!("{v:.prec$e}", prec = digits - 1);
        }
        s
    } else {
        format!("{v:.prec$e}", prec = digits - 1)
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const CSV_HEADER: &str = "weight,m,method,i,x,mass,lambda_min,one_minus_efficiency\n";

fn csv_rows(out: &mut String, r: &DesignReport) {
    let method = match r.request.method {
        Method::Approx => "approx",
        Method::Jacobi => "jacobi",
    };
    let eff = r
        .reference
        .as_ref()
        .map_or(String::new(), |x| x.one_minus_efficiency.to_string());
    for (i, (x, rho)) in r.design.support.iter().zip(&r.design.masses).enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&r.request.weight),
            r.request.m,
            method,
            i + 1,
            x,
            rho,
            r.lambda_min,
            eff
        );
    }
}

fn table_block(out: &mut String, r: &DesignReport) {
    let sig = |v: f64| format_significant(v, 4);
    let _ = writeln!(out, "w(x) = {}, m = {}", r.request.weight, r.request.m);
    let _ = writeln!(out, "  {:>4}  {:>11}  {:>11}", "i", "x_i", "rho_i");
    for (i, (x, rho)) in r.design.support.iter().zip(&r.design.masses).enumerate() {
        let _ = writeln!(out, "  {:>4}  {:>11}  {:>11}", i + 1, sig(*x), sig(*rho));
    }
    let _ = writeln!(out, "  lambda_min = {:.3e}", r.lambda_min);
    if let Some(reference) = &r.reference {
        let _ = writeln!(
            out,
            "  1 - eff = {:.3e} ({} reference)",
            reference.one_minus_efficiency, reference.method
        );
    }
}

fn render(reports: &[DesignReport], format: Format, single: bool) -> Result<String, CliError> {
    let mut out = String::new();
    match format {
        Format::Json => {
            let json = if single {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(reports)
            };
            out = json.map_err(|e| CliError::Failed(format!("serialization failed: {e}")))?;
            out.push('\n');
        }
        Format::Csv => {
            out.push_str(CSV_HEADER);
            reports.iter().for_each(|r| csv_rows(&mut out, r));
        }
        Format::Table => {
            for (k, r) in reports.iter().enumerate() {
                if k > 0 {
                    out.push('\n');
                }
                table_block(&mut out, r);
            }
        }
    }
    Ok(out)
}

pub fn cmd_design(args: &DesignArgs) -> Result<String, CliError> {
    let prep = prepare(&args.common)?;
    let report = design_report(&args.common, &prep, args.m, &args.efficiency)?;
    render(&[report], args.format, true)
}

pub fn cmd_table(args: &TableArgs) -> Result<String, CliError> {
    let prep = prepare(&args.common)?;
    let reports = args
        .m_list
        .iter()
        .map(|&m| {
            design_report(&args.common, &prep, m, &args.efficiency)
                .map_err(|e| e.context(&format!("row m = {m}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    render(&reports, args.format, false)
}

pub fn cmd_plotdata(args: &PlotArgs) -> Result<String, CliError> {
    let prep = prepare(&args.common)?;
    check_m(args.m)?;
    if args.samples < 2 {
        return Err(CliError::Invalid("--samples must be at least 2".into()));
    }
    let kappa = build_kappa(&args.common, &prep, args.m)?;
    let (a, b) = prep.interval;
    let mut out = String::from("x,kappa\n");
    let last = args.samples - 1;
    for i in 0..args.samples {
        let x = if i == last {
            b
        } else {
            a + (b - a) * i as f64 / last as f64
        };
        let _ = writeln!(out, "{},{}", x, kappa.eval(x)?);
    }
    let pts = kappa.points();
    let weight = match prep.dette {
        Some((alpha, beta)) if args.common.method == Method::Jacobi => {
            dette_weight_source(alpha, beta).to_string()
        }
        _ => prep.weight.source().to_string(),
    };
    let _ = writeln!(out, "# weight: {weight}");
    let _ = writeln!(out, "# tchebycheff points: {}", pts.len());
    let _ = writeln!(out, "# equioscillation gap: {}", pts.equioscillation_gap());
    let _ = writeln!(out, "# s,kappa");
    for (s, v) in pts.points().iter().zip(pts.values()) {
        let _ = writeln!(out, "# {s},{v}");
    }
    Ok(out)
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Table(args) => cmd_table(args),
        Command::Plotdata(args) => cmd_plotdata(args),
    }
}
