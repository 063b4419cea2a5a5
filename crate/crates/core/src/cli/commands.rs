//! The four subcommands, each split into argument parsing and a pure
//! function that returns the records it would write.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use super::records::{format_number, Branch, CurveRecord, Model};
use super::CliError;
use crate::bounds::{bounds_instance_at_rate, gaussian_bounds_harness, HarnessRecord};
use crate::discrete::{extreme_point_a, extreme_point_b, region_approx, Channel, DecoderGrid, DiscreteSource};
use crate::error::Error;
use crate::gaussian_model::GaussianPairSource;
use crate::gaussian_tradeoff::{
    boundary_curve, c_min, c_threshold, dcr_distortion_oracle, dcr_distortion_printed, printed_case3_applies, Binding,
    FeasibilityVerdict, Status,
};
use crate::universal::{encoder_for_rate, region_sweep};

/// Relative tolerance for calling a printed and an oracle distortion equal.
const AGREE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Correlation between X and S.
    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    pub rho: f64,
    /// Standard deviation of X.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_x: f64,
    /// Standard deviation of S.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_s: f64,
}

impl Default for SourceArgs {
    fn default() -> Self {
        Self { rho: 0.7, sigma_x: 1.0, sigma_s: 1.0 }
    }
}

impl SourceArgs {
    pub fn source(&self) -> Result<GaussianPairSource, Error> {
        GaussianPairSource::from_correlation(self.rho, self.sigma_x, self.sigma_s)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

// ---------------------------------------------------------------- gauss-curves

#[derive(Debug, Clone, Args)]
pub struct GaussCurvesArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Rate budgets in nats.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.15, 0.2, 0.34])]
    pub rates: Vec<f64>,
    /// Points per curve.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Default for GaussCurvesArgs {
    fn default() -> Self {
        Self { source: SourceArgs::default(), rates: vec![0.05, 0.1, 0.15, 0.2, 0.34], points: 200, out: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussCurves {
    pub records: Vec<CurveRecord>,
    /// `−½ ln(1 − ρ²)`, the rate of the MMSE reconstruction of `X` from `S`.
    pub r_max: f64,
}

/// Printed boundary and oracle frontier per rate, then the single-encoder
/// sweep at the largest rate.
pub fn cmd_gauss_curves(args: &GaussCurvesArgs) -> Result<GaussCurves, CliError> {
    let src = args.source.source()?;
    if args.rates.is_empty() {
        return Err(Error::Config("at least one rate is required".into()).into());
    }
    if args.points < 2 {
        return Err(Error::Config(format!("--points must be at least 2, got {}", args.points)).into());
    }
    let mut records = Vec::new();
    for &rate in &args.rates {
        for p in boundary_curve(&src, rate, args.points)? {
            records.push(CurveRecord {
                curve_id: format!("printed_R{rate}"),
                model: Model::Printed,
                rate_nats: rate,
                c_nats: p.closs,
                d: p.distortion,
                branch: Branch::Boundary,
            });
        }
        let (lo, hi) = (c_threshold(&src, rate), src.h_s());
        let cs = if hi > lo { linspace(lo, hi, args.points) } else { vec![hi] };
        for c in cs {
            let v = dcr_distortion_oracle(&src, c, rate)?;
            let Some(d) = v.value else { continue };
            records.push(CurveRecord {
                curve_id: format!("oracle_R{rate}"),
                model: Model::Oracle,
                rate_nats: rate,
                c_nats: c,
                d,
                branch: if v.binding == Binding::Both { Branch::Threshold } else { Branch::RateLimited },
            });
        }
    }

    let r_top = args.rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rep = encoder_for_rate(&src, r_top)?;
    let mut gammas = linspace(0.0, 3.0 * src.sigma_x(), args.points);
    gammas.push(rep.mmse_gain());
    for (d, c) in region_sweep(&src, &rep, &gammas)? {
        records.push(CurveRecord {
            curve_id: format!("universal_R{r_top}"),
            model: Model::Universal,
            rate_nats: r_top,
            c_nats: c,
            d,
            branch: Branch::DecoderSweep,
        });
    }
    Ok(GaussCurves { records, r_max: -0.5 * (-src.rho_squared()).ln_1p() })
}

// ---------------------------------------------------------- discrepancy-report

#[derive(Debug, Clone, Args)]
pub struct DiscrepancyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Grid points along the classification-loss axis.
    #[arg(long, default_value_t = 50)]
    pub grid_c: usize,
    /// Grid points along the rate axis.
    #[arg(long, default_value_t = 50)]
    pub grid_r: usize,
    /// Largest rate on the grid, in nats.
    #[arg(long, default_value_t = 2.0)]
    pub r_max: f64,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Default for DiscrepancyArgs {
    fn default() -> Self {
        Self { source: SourceArgs::default(), grid_c: 50, grid_r: 50, r_max: 2.0, out: None }
    }
}

/// Which printed case a cell falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellBranch {
    /// `C < c_min`.
    BelowCMin,
    /// `C > c_threshold(R)`.
    Case1,
    /// `c_min ≤ C ≤ c_threshold(R)`.
    Case2,
}

impl CellBranch {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellBranch::BelowCMin => "below_c_min",
            CellBranch::Case1 => "case1",
            CellBranch::Case2 => "case2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeFlag {
    Infeasible,
    Inf,
}

/// A distortion, or a flag when there is none to report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Value(f64),
    Flag(OutcomeFlag),
}

impl From<FeasibilityVerdict> for Outcome {
    fn from(v: FeasibilityVerdict) -> Self {
        match (v.status, v.value) {
            (Status::Feasible, Some(d)) if d.is_finite() => Outcome::Value(d),
            (Status::Infeasible, _) => Outcome::Flag(OutcomeFlag::Infeasible),
            _ => Outcome::Flag(OutcomeFlag::Inf),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub c: f64,
    pub r: f64,
    pub branch: CellBranch,
    pub printed: Outcome,
    pub oracle: Outcome,
    pub agree: bool,
    /// The printed case-3 condition holds (it is shadowed by case 1).
    pub case3_condition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub branch: CellBranch,
    pub cells: usize,
    pub agree: usize,
    pub disagree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub rho: f64,
    pub sigma_x: f64,
    pub sigma_s: f64,
    pub c_min: f64,
    pub h_s: f64,
    pub cells: Vec<Cell>,
    pub summary: Vec<BranchSummary>,
    /// Indices into `cells` where the two computations disagree.
    pub disagreements: Vec<usize>,
}

fn outcomes_agree(a: Outcome, b: Outcome) -> bool {
    match (a, b) {
        (Outcome::Value(x), Outcome::Value(y)) => (x - y).abs() <= AGREE_TOL * y.abs().max(1.0),
        (Outcome::Flag(x), Outcome::Flag(y)) => x == y,
        _ => false,
    }
}

/// Tabulates printed and directly solved `D(C, R)` over a grid that runs
/// from below `c_min` to above `h(S)` and from rate 0 to `--r-max`.
pub fn cmd_discrepancy_report(args: &DiscrepancyArgs) -> Result<DiscrepancyReport, CliError> {
    if args.grid_c < 2 || args.grid_r < 2 {
        return Err(Error::Config(format!("grid sizes must be at least 2, got {}x{}", args.grid_c, args.grid_r)).into());
    }
    if !(args.r_max > 0.0) || !args.r_max.is_finite() {
        return Err(Error::Config(format!("--r-max must be positive and finite, got {}", args.r_max)).into());
    }
    let src = args.source.source()?;
    let (cm, h) = (c_min(&src), src.h_s());
    let base = if cm.is_finite() { cm } else { c_threshold(&src, args.r_max) };
    let span = if h > base { h - base } else { 1.0 };
    let c_axis = linspace(base - 0.25 * span, h + 0.25 * span, args.grid_c);
    let r_axis = linspace(0.0, args.r_max, args.grid_r);

    let mut cells = Vec::with_capacity(c_axis.len() * r_axis.len());
    for &c in &c_axis {
        for &r in &r_axis {
            let branch = if c < cm {
                CellBranch::BelowCMin
            } else if c > c_threshold(&src, r) {
                CellBranch::Case1
            } else {
                CellBranch::Case2
            };
            let printed = Outcome::from(dcr_distortion_printed(&src, c, r)?);
            let oracle = Outcome::from(dcr_distortion_oracle(&src, c, r)?);
            cells.push(Cell {
                c,
                r,
                branch,
                printed,
                oracle,
                agree: outcomes_agree(printed, oracle),
                case3_condition: printed_case3_applies(&src, c, r),
            });
        }
    }

    let summary = [CellBranch::BelowCMin, CellBranch::Case1, CellBranch::Case2]
        .into_iter()
        .map(|b| {
            let of_branch: Vec<&Cell> = cells.iter().filter(|c| c.branch == b).collect();
            let agree = of_branch.iter().filter(|c| c.agree).count();
            BranchSummary { branch: b, cells: of_branch.len(), agree, disagree: of_branch.len() - agree }
        })
        .collect();
    let disagreements = cells.iter().enumerate().filter(|(_, c)| !c.agree).map(|(i, _)| i).collect();
    Ok(DiscrepancyReport {
        rho: args.source.rho,
        sigma_x: args.source.sigma_x,
        sigma_s: args.source.sigma_s,
        c_min: cm,
        h_s: h,
        cells,
        summary,
        disagreements,
    })
}

// ------------------------------------------------------------- discrete-region

#[derive(Debug, Clone, Args)]
pub struct DiscreteRegionArgs {
    /// Source JSON: {"x_values", "s_size", "pmf", "encoder"}.
    #[arg(long)]
    pub source: PathBuf,
    /// Grid levels per decoder row.
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// Distortion budget for the minimum-loss corner; unconstrained when omitted.
    #[arg(long)]
    pub budget: Option<f64>,
    /// Frontier CSV destination.
    #[arg(long)]
    pub out: PathBuf,
    /// Verdict JSON destination; stdout when omitted.
    #[arg(long)]
    pub verdict: Option<PathBuf>,
}

/// On-disk discrete source. `pmf[i][j] = p(x_values[i], s = j)`;
/// `encoder[i]` is the row `p(z | x_values[i])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceFile {
    pub x_values: Vec<f64>,
    pub s_size: usize,
    pub pmf: Vec<Vec<f64>>,
    pub encoder: Vec<Vec<f64>>,
}

impl SourceFile {
    pub fn from_reader(r: impl Read) -> Result<Self, CliError> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn build(&self) -> Result<(DiscreteSource, Channel), Error> {
        let src = DiscreteSource::new(self.x_values.clone(), self.s_size, self.pmf.clone())?;
        let enc = Channel::new(self.encoder.clone())?;
        if enc.n_inputs() != src.x_size() {
            return Err(Error::Dimension { expected: src.x_size(), got: enc.n_inputs() });
        }
        Ok((src, enc))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterBoundSummary {
    pub checked: u64,
    pub violations: u64,
    /// Largest `E(X − X̃)² + W₂² − D` over the grid; non-positive when the bound holds.
    pub worst_excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub levels: usize,
    pub decoders: u64,
    pub xhat_support: Vec<f64>,
    pub mmse_residual: f64,
    pub frontier_points: usize,
    /// `(D, C)` of the MMSE decoder.
    pub extreme_point_a: (f64, f64),
    /// `(D, C)` of the minimum-loss corner.
    pub extreme_point_b: (f64, f64),
    pub budget: Option<f64>,
    pub outer_bound: OuterBoundSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRegionOutput {
    pub frontier: Vec<(f64, f64)>,
    pub verdict: RegionVerdict,
}

pub fn cmd_discrete_region(args: &DiscreteRegionArgs) -> Result<DiscreteRegionOutput, CliError> {
    let file = SourceFile::from_reader(BufReader::new(File::open(&args.source)?))?;
    run_discrete_region(&file, args.levels, args.budget)
}

/// Everything `discrete-region` computes, from an already-parsed source.
pub(crate) fn run_discrete_region(
    file: &SourceFile,
    levels: usize,
    budget: Option<f64>,
) -> Result<DiscreteRegionOutput, CliError> {
    let (src, enc) = file.build()?;
    if budget.is_some_and(|b| !(b >= 0.0)) {
        return Err(Error::Domain("distortion budget must be non-negative".into()).into());
    }
    let frontier = region_approx(&src, &enc, levels)?;
    if frontier.is_empty() {
        return Err(CliError::Empty("the enumerated region has no points".into()));
    }
    let grid = DecoderGrid::with_default_support(&src, &enc, levels)?;
    let (checked, violations, worst_excess) = grid.outer_bound_sweep();
    let verdict = RegionVerdict {
        levels,
        decoders: grid.count(),
        xhat_support: grid.support().to_vec(),
        mmse_residual: grid.mmse().residual,
        frontier_points: frontier.len(),
        extreme_point_a: extreme_point_a(&src, &enc)?,
        extreme_point_b: extreme_point_b(&src, &enc, budget.unwrap_or(f64::INFINITY), levels)?,
        budget,
        outer_bound: OuterBoundSummary { checked, violations, worst_excess },
    };
    Ok(DiscreteRegionOutput { frontier, verdict })
}

const POINTS_HEADER: [&str; 3] = ["index", "d", "c"];

pub fn write_points_csv<W: Write>(out: W, points: &[(f64, f64)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(POINTS_HEADER)?;
    for (i, (d, c)) in points.iter().enumerate() {
        w.write_record([i.to_string(), format_number(*d), format_number(*c)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rd = csv::Reader::from_reader(input);
    if rd.headers()?.iter().ne(POINTS_HEADER) {
        return Err(CliError::Parse(format!("unexpected CSV header {:?}", rd.headers()?)));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Parse(format!("bad number {s:?}")));
    rd.records()
        .map(|row| {
            let row = row?;
            Ok((num(&row[1])?, num(&row[2])?))
        })
        .collect()
}

// ---------------------------------------------------------------------- bounds

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Evaluate the single instance at this rate.
    #[arg(long, conflicts_with = "instances", required_unless_present = "instances")]
    pub rate: Option<f64>,
    /// Evaluate this many instances at random rates.
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Upper end of the random rate range, in nats.
    #[arg(long, default_value_t = 2.0)]
    pub max_rate: f64,
    /// JSON destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub instances: usize,
    pub degenerate: usize,
    pub sandwich_pass: usize,
    pub gap_pass: usize,
    pub ratio_pass: usize,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub rho: f64,
    pub sigma_x: f64,
    pub sigma_s: f64,
    pub seed: Option<u64>,
    pub records: Vec<HarnessRecord>,
    pub summary: BoundsSummary,
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<BoundsReport, CliError> {
    let src = args.source.source()?;
    let (records, seed) = match (args.rate, args.instances) {
        (Some(rate), None) => (vec![bounds_instance_at_rate(&src, rate)?], None),
        (None, Some(n)) => (gaussian_bounds_harness(&src, args.max_rate, args.seed, n)?, Some(args.seed)),
        _ => return Err(Error::Config("exactly one of --rate and --instances is required".into()).into()),
    };
    let count = |f: fn(&HarnessRecord) -> bool| records.iter().filter(|r| f(r)).count();
    let summary = BoundsSummary {
        instances: records.len(),
        degenerate: count(|r| r.degenerate),
        sandwich_pass: count(|r| r.sandwich),
        gap_pass: count(|r| r.gap_holds),
        ratio_pass: count(|r| r.ratio_holds),
        all_pass: records.iter().all(|r| r.sandwich && r.gap_holds && r.ratio_holds),
    };
    Ok(BoundsReport {
        rho: args.source.rho,
        sigma_x: args.source.sigma_x,
        sigma_s: args.source.sigma_s,
        seed,
        records,
        summary,
    })
}
