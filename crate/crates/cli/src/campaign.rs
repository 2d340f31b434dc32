//! Campaign engine: runs registered checks over generated instances,
//! aggregates slack statistics, logs failing instances inline, and replays
//! them.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use semirad_core::ensembles::{random_a_unit, random_pair_at, ARank, EnsembleSpec, OperandKind};
use semirad_core::inequalities::{parameter_grid, BoundReport, CheckId, Evaluator, Params, Signature, REL_TOL};
use semirad_core::rng::{stream, RNG_ALGORITHM};
use semirad_core::{AContext, ComplexMatrix, ContextOptions};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::MatrixFile;

pub const REPORT_SCHEMA: &str = "semirad-campaign/1";
pub const FAILURE_SCHEMA: &str = "semirad-failure/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankPolicy {
    Full,
    Deficient,
    Both,
}

impl RankPolicy {
    fn deficiencies(self) -> &'static [bool] {
        match self {
            RankPolicy::Full => &[false],
            RankPolicy::Deficient => &[true],
            RankPolicy::Both => &[false, true],
        }
    }
}

impl std::str::FromStr for RankPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(RankPolicy::Full),
            "deficient" => Ok(RankPolicy::Deficient),
            "both" => Ok(RankPolicy::Both),
            _ => Err(format!("unknown rank policy '{s}' (full | deficient | both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub dims: Vec<usize>,
    pub ranks: RankPolicy,
    pub trials_per_cell: usize,
    /// Empty means all checks.
    pub checks: Vec<CheckId>,
    pub seed: u64,
    /// Replaces the default relative tolerance of every check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

impl CampaignConfig {
    pub fn new(dims: Vec<usize>, ranks: RankPolicy, trials_per_cell: usize, seed: u64) -> Self {
        Self { dims, ranks, trials_per_cell, checks: Vec::new(), seed, rel_tol: None }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.dims.is_empty() {
            return Err(CliError::ConfigInvalid("dims must be nonempty".into()));
        }
        if self.trials_per_cell == 0 {
            return Err(CliError::ConfigInvalid("trials_per_cell must be at least 1".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| !(1..=64).contains(&d)) {
            return Err(CliError::ConfigInvalid(format!("dimension {d} outside [1, 64]")));
        }
        if self.ranks != RankPolicy::Full && self.dims.contains(&1) {
            return Err(CliError::ConfigInvalid("dimension 1 has no deficient-rank A".into()));
        }
        if let Some(t) = self.rel_tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::ConfigInvalid("rel_tol must be a finite non-negative number".into()));
            }
        }
        Ok(())
    }

    pub fn check_list(&self) -> Vec<CheckId> {
        if self.checks.is_empty() {
            CheckId::ALL.to_vec()
        } else {
            self.checks.clone()
        }
    }

    /// `(dim, deficient)` for every cell, in order.
    pub fn cells(&self) -> Vec<(usize, bool)> {
        self.dims.iter().flat_map(|&d| self.ranks.deficiencies().iter().map(move |&def| (d, def))).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PartAggregate {
    pub count: usize,
    pub pass_count: usize,
    pub min_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckAggregate {
    pub count: usize,
    pub pass_count: usize,
    /// Over the worst parameter of each trial.
    pub min_slack: f64,
    pub mean_slack: f64,
    pub max_certified_gap: f64,
    pub min_margin: f64,
    /// Evaluations including every grid parameter.
    pub grid_evaluations: usize,
    pub parts: BTreeMap<String, PartAggregate>,
}

/// A failing or erroring evaluation with everything needed to rerun it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureRecord {
    pub schema: String,
    pub check: CheckId,
    /// `[seed, cell, trial]`.
    pub seed_path: Vec<u64>,
    pub dim: usize,
    pub rank: usize,
    pub params: Params,
    pub a: MatrixFile,
    pub b: MatrixFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<MatrixFile>,
    /// `null` (NaN) when the evaluation raised an error.
    #[serde(deserialize_with = "nan_or_f64")]
    pub lhs: f64,
    #[serde(deserialize_with = "nan_or_f64")]
    pub rhs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn nan_or_f64<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// One row of the per-trial slack table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub dim: usize,
    pub rank: usize,
    pub trial: usize,
    pub check: CheckId,
    pub pass: bool,
    pub slack: f64,
    pub margin: f64,
    pub certified_gap: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema: String,
    pub version: String,
    pub rng: String,
    pub config: CampaignConfig,
    pub total_evaluations: usize,
    pub checks: BTreeMap<CheckId, CheckAggregate>,
    pub failures: Vec<FailureRecord>,
    pub wall_time: f64,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

impl CampaignReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Operands of one trial.
struct TrialInstance {
    ctx: AContext,
    b: ComplexMatrix,
    c: ComplexMatrix,
    rank_one: ComplexMatrix,
}

fn kinds_for(trial: usize) -> (OperandKind, OperandKind, &'static str) {
    use OperandKind::*;
    match trial % 10 {
        0..=2 => (GenericACompatible, GenericACompatible, "generic"),
        3 => (ASelfadjoint, ASelfadjoint, "selfadjoint"),
        4 => (RankOneA, GenericACompatible, "rank_one"),
        5 => (Nilpotent, GenericACompatible, "nilpotent"),
        6 => (CommutingPair, CommutingPair, "commuting"),
        7 => (GenericACompatible, GenericACompatible, "equal"),
        8 => (Zero, GenericACompatible, "zero_b"),
        _ if trial % 20 == 9 => (Zero, Zero, "zero"),
        _ => (Nilpotent, Nilpotent, "nilpotent_pair"),
    }
}

fn instance(seed: u64, cell: usize, trial: usize, dim: usize, rank: usize) -> semirad_core::Result<TrialInstance> {
    let (kb, kc, label) = kinds_for(trial);
    let scale = [1.0, 1.0, 0.1, 10.0][(trial / 10) % 4];
    let path = [cell as u64, trial as u64];
    let spec = |kind| EnsembleSpec { dim, a_rank: ARank::Rank(rank), operand_kind: kind, scale, seed };
    let first = random_pair_at(&spec(kc), &path)?;
    let ctx = first.ctx;
    let c = first.c;
    let b = match label {
        "equal" => c.clone(),
        "commuting" => first.b,
        _ => {
            let mut sub = path.to_vec();
            sub.push(7);
            semirad_core::ensembles::random_compatible_at(&ctx, kb, seed, &sub)?.scale_real(scale)
        }
    };
    let x = random_a_unit(&ctx, &mut stream(seed, &[cell as u64, trial as u64, 3]))?;
    let rank_one = ctx.rank_one_a(&x)?;
    Ok(TrialInstance { ctx, b, c, rank_one })
}

fn rank_for(dim: usize, deficient: bool, trial: usize) -> usize {
    if deficient {
        1 + trial % (dim - 1)
    } else {
        dim
    }
}

/// Operands passed to `evaluate` for a check, derived from the trial.
fn operands(check: CheckId, inst: &TrialInstance) -> semirad_core::Result<(ComplexMatrix, Option<ComplexMatrix>)> {
    Ok(match check {
        CheckId::CorSelfadjLower => (inst.ctx.cartesian(&inst.b)?.0, Some(inst.ctx.cartesian(&inst.c)?.1)),
        CheckId::PropRankone => (inst.rank_one.clone(), None),
        _ => match check.signature() {
            Signature::Pair => (inst.b.clone(), Some(inst.c.clone())),
            Signature::Single | Signature::Context => (inst.b.clone(), None),
        },
    })
}

struct Outcome {
    rows: Vec<TrialRow>,
    reports: Vec<(CheckId, Vec<BoundReport>)>,
    failures: Vec<FailureRecord>,
}

fn failure(
    check: CheckId,
    seed_path: Vec<u64>,
    ctx_a: &ComplexMatrix,
    dim: usize,
    rank: usize,
    b: &ComplexMatrix,
    c: Option<&ComplexMatrix>,
    params: Params,
    lhs: f64,
    rhs: f64,
    error: Option<String>,
) -> FailureRecord {
    FailureRecord {
        schema: FAILURE_SCHEMA.into(),
        check,
        seed_path,
        dim,
        rank,
        params,
        a: ctx_a.into(),
        b: b.into(),
        c: c.map(MatrixFile::from),
        lhs,
        rhs,
        error,
    }
}

fn run_trial(cfg: &CampaignConfig, checks: &[CheckId], cell: usize, dim: usize, deficient: bool, trial: usize) -> Outcome {
    let rank = rank_for(dim, deficient, trial);
    let seed_path = vec![cfg.seed, cell as u64, trial as u64];
    let mut out = Outcome { rows: Vec::new(), reports: Vec::new(), failures: Vec::new() };
    let inst = match instance(cfg.seed, cell, trial, dim, rank) {
        Ok(i) => i,
        Err(e) => {
            // Without an instance every check of the trial counts as failed.
            let z = ComplexMatrix::zeros(dim, dim);
            for &check in checks {
                out.failures.push(failure(check, seed_path.clone(), &z, dim, rank, &z, None, Params::default(), f64::NAN, f64::NAN, Some(e.to_string())));
                out.rows.push(TrialRow { dim, rank, trial, check, pass: false, slack: f64::NAN, margin: f64::NAN, certified_gap: f64::NAN, lhs: f64::NAN, rhs: f64::NAN });
            }
            return out;
        }
    };
    let evaluator = Evaluator::new(&inst.ctx);
    for (k, &check) in checks.iter().enumerate() {
        let mut rng = stream(cfg.seed, &[cell as u64, trial as u64, 100 + k as u64]);
        let buzano_seed = cfg.seed ^ ((cell as u64) << 40) ^ ((trial as u64) << 8);
        let grid = parameter_grid(check, &mut rng, buzano_seed);
        let ops = operands(check, &inst);
        let result = ops.and_then(|(b, c)| evaluator.evaluate_grid(check, &b, c.as_ref(), &grid).map(|g| (g, b, c)));
        match result {
            Ok((mut g, b, c)) => {
                if let Some(tol) = cfg.rel_tol {
                    for r in &mut g.reports {
                        r.rejudge(tol);
                    }
                    let k = (0..g.reports.len())
                        .min_by(|&i, &j| g.reports[i].margin().total_cmp(&g.reports[j].margin()))
                        .expect("nonempty grid");
                    g.worst = g.reports[k].clone();
                    g.params = grid[k].clone();
                }
                let w = &g.worst;
                let pass = g.reports.iter().all(|r| r.pass);
                out.rows.push(TrialRow {
                    dim,
                    rank,
                    trial,
                    check,
                    pass,
                    slack: w.slack,
                    margin: w.margin(),
                    certified_gap: w.certified_gap,
                    lhs: w.lhs,
                    rhs: w.rhs,
                });
                if !pass {
                    out.failures.push(failure(check, seed_path.clone(), inst.ctx.a(), dim, rank, &b, c.as_ref(), g.params.clone(), w.lhs, w.rhs, None));
                }
                out.reports.push((check, g.reports));
            }
            Err(e) => {
                let (b, c) = operands(check, &inst).unwrap_or((inst.b.clone(), Some(inst.c.clone())));
                out.failures.push(failure(check, seed_path.clone(), inst.ctx.a(), dim, rank, &b, c.as_ref(), grid[0].clone(), f64::NAN, f64::NAN, Some(e.to_string())));
                out.rows.push(TrialRow { dim, rank, trial, check, pass: false, slack: f64::NAN, margin: f64::NAN, certified_gap: f64::NAN, lhs: f64::NAN, rhs: f64::NAN });
            }
        }
    }
    out
}

/// Runs every (cell, trial, check) combination. Trials run in parallel and
/// are merged in (cell, trial, check) order, so the report does not depend
/// on scheduling.
pub fn run_campaign(cfg: &CampaignConfig) -> CliResult<CampaignReport> {
    cfg.validate()?;
    let start = Instant::now();
    let checks = cfg.check_list();
    let cells = cfg.cells();
    let work: Vec<(usize, usize, bool, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, &(d, def))| (0..cfg.trials_per_cell).map(move |t| (ci, d, def, t)))
        .collect();
    let outcomes: Vec<Outcome> = work.par_iter().map(|&(ci, d, def, t)| run_trial(cfg, &checks, ci, d, def, t)).collect();

    let mut aggregates: BTreeMap<CheckId, CheckAggregate> = checks
        .iter()
        .map(|&c| {
            (
                c,
                CheckAggregate {
                    count: 0,
                    pass_count: 0,
                    min_slack: f64::INFINITY,
                    mean_slack: 0.0,
                    max_certified_gap: 0.0,
                    min_margin: f64::INFINITY,
                    grid_evaluations: 0,
                    parts: BTreeMap::new(),
                },
            )
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut total = 0;
    for o in outcomes {
        for r in &o.rows {
            let agg = aggregates.get_mut(&r.check).expect("known check");
            agg.count += 1;
            total += 1;
            if r.pass {
                agg.pass_count += 1;
            }
            if r.slack.is_finite() {
                agg.min_slack = agg.min_slack.min(r.slack);
                agg.mean_slack += r.slack;
                agg.max_certified_gap = agg.max_certified_gap.max(r.certified_gap);
                agg.min_margin = agg.min_margin.min(r.margin);
            }
        }
        for (check, reports) in &o.reports {
            let agg = aggregates.get_mut(check).expect("known check");
            agg.grid_evaluations += reports.len();
            for rep in reports {
                for p in &rep.parts {
                    let pa = agg.parts.entry(p.name.clone()).or_insert(PartAggregate { count: 0, pass_count: 0, min_margin: f64::INFINITY });
                    pa.count += 1;
                    if p.pass {
                        pa.pass_count += 1;
                    }
                    pa.min_margin = pa.min_margin.min(p.margin());
                }
            }
        }
        rows.extend(o.rows);
        failures.extend(o.failures);
    }
    for (check, agg) in aggregates.iter_mut() {
        let finite = rows.iter().filter(|r| r.check == *check && r.slack.is_finite()).count();
        if finite > 0 {
            agg.mean_slack /= finite as f64;
        }
    }
    Ok(CampaignReport {
        schema: REPORT_SCHEMA.into(),
        version: version_string(),
        rng: RNG_ALGORITHM.into(),
        config: cfg.clone(),
        total_evaluations: total,
        checks: aggregates,
        failures,
        wall_time: start.elapsed().as_secs_f64(),
        rows,
    })
}

pub fn version_string() -> String {
    format!("semirad {} (relative tolerance {REL_TOL:e})", env!("CARGO_PKG_VERSION"))
}

/// Writes the per-trial slack table.
pub fn write_csv(path: &Path, rows: &[TrialRow]) -> CliResult<()> {
    let wrap = |source| CliError::Csv { path: path.into(), source };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    for r in rows {
        w.serialize(r).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.into(), source })
}

/// Parses a failure record, rejecting unknown fields and foreign schemas.
pub fn parse_failure(text: &str) -> CliResult<FailureRecord> {
    let rec: FailureRecord = serde_json::from_str(text).map_err(|e| CliError::SchemaMismatch(e.to_string()))?;
    if rec.schema != FAILURE_SCHEMA {
        return Err(CliError::SchemaMismatch(format!("expected schema {FAILURE_SCHEMA}, found {}", rec.schema)));
    }
    Ok(rec)
}

/// Recomputes the check of a failure record from its inline operands.
pub fn replay(rec: &FailureRecord) -> CliResult<BoundReport> {
    let a = rec.a.to_matrix()?;
    let ctx = AContext::new(&a, ContextOptions::default())?;
    let b = rec.b.to_matrix()?;
    let c = rec.c.as_ref().map(MatrixFile::to_matrix).transpose()?;
    Ok(semirad_core::inequalities::evaluate(rec.check, &ctx, &b, c.as_ref(), &rec.params)?)
}
