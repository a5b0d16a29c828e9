//! Adaptive integration by recursive bisection or by a heap of intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use crate::error::{QuadError, Result};
use crate::estimators::{global_scale, Context, Estimator, EstimatorOutcome, Inherited, IntervalState};
use crate::legendre::Side;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverConfig {
    pub max_depth: usize,
    pub max_evals: usize,
    /// Known integral; the relative tolerance is taken against it.
    pub reference: Option<f64>,
}

impl Default for DriverConfig {
    fn default() -> Self {
        Self { max_depth: 50, max_evals: 1_000_000, reference: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    DepthLimit,
    EvalBudget,
    EvaluationError,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Converged => "converged",
            Status::DepthLimit => "depth-limit",
            Status::EvalBudget => "eval-budget",
            Status::EvaluationError => "evaluation-error",
        })
    }
}

#[derive(Debug, Clone)]
pub struct IntervalRecord {
    pub a: f64,
    pub b: f64,
    pub integral: f64,
    pub error: f64,
    pub depth: usize,
    pub child_state: Option<Arc<IntervalState>>,
}

#[derive(Debug, Clone)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_bound: f64,
    pub evals: usize,
    pub intervals: usize,
    pub status: Status,
    /// Accepted intervals, left to right for the recursive driver.
    pub records: Vec<IntervalRecord>,
}

impl IntegrationResult {
    fn from_records(records: Vec<IntervalRecord>, evals: usize, status: Status) -> Self {
        let value = records.iter().map(|r| r.integral).sum();
        let error_bound = records.iter().map(|r| r.error).sum();
        Self { value, error_bound, evals, intervals: records.len(), status, records }
    }
}

fn check_args(a: f64, b: f64, tol: f64) -> Result<()> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::InvalidArgument(format!("bad interval [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(QuadError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Shared bookkeeping for both drivers.
struct Run<'a> {
    est: &'a dyn Estimator,
    f: &'a dyn Fn(f64) -> f64,
    ctx: Context,
    cfg: DriverConfig,
    evals: usize,
    status: Status,
}

impl<'a> Run<'a> {
    fn new(est: &'a dyn Estimator, f: &'a dyn Fn(f64) -> f64, a: f64, b: f64, cfg: DriverConfig) -> Result<Self> {
        let mut run = Self { est, f, ctx: Context::default(), cfg, evals: 0, status: Status::Converged };
        if est.needs_global_scale() {
            let (s, n) = global_scale(f, a, b)?;
            run.evals += n;
            run.ctx.global_scale = Some(s);
        }
        Ok(run)
    }

    fn call(&mut self, a: f64, b: f64, tol: f64, parent: Option<&Inherited>) -> Result<EstimatorOutcome> {
        let ctx = Context { tol_abs: tol, ..self.ctx };
        let out = self.est.estimate(self.f, a, b, &ctx, parent)?;
        self.evals += out.evals;
        Ok(out)
    }

    fn demote(&mut self, s: Status) {
        if self.status == Status::Converged {
            self.status = s;
        }
    }

    fn budget_left(&self) -> bool {
        self.evals < self.cfg.max_evals
    }
}

fn record(a: f64, b: f64, depth: usize, out: EstimatorOutcome) -> IntervalRecord {
    IntervalRecord { a, b, integral: out.integral, error: out.error_estimate, depth, child_state: out.child_state }
}

/// Recursive bisection: an interval is accepted when its estimate is within
/// its local tolerance, otherwise both halves are processed with the
/// tolerance divided by `sqrt(2)`.
///
/// `tol_rel` is relative to `cfg.reference` when given, else to the first
/// whole-interval integral.
pub fn integrate_recursive(
    est: &dyn Estimator,
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol_rel: f64,
    cfg: DriverConfig,
) -> Result<IntegrationResult> {
    check_args(a, b, tol_rel)?;
    let mut run = match Run::new(est, f, a, b, cfg) {
        Ok(r) => r,
        Err(QuadError::NonFinite { .. }) => {
            return Ok(IntegrationResult::from_records(vec![], 0, Status::EvaluationError));
        }
        Err(e) => return Err(e),
    };
    let mut records = Vec::new();
    let first = match cfg.reference {
        Some(r) => run.call(a, b, tol_rel * r.abs(), None),
        None => run.call(a, b, 0.0, None),
    };
    let first = match first {
        Ok(o) => o,
        Err(QuadError::NonFinite { .. }) => {
            return Ok(IntegrationResult::from_records(records, run.evals, Status::EvaluationError));
        }
        Err(e) => return Err(e),
    };
    let tol = tol_rel * cfg.reference.unwrap_or(first.integral).abs();
    // rerun once the tolerance is known if the estimate depends on it
    let first = if cfg.reference.is_none() && est.uses_tolerance() { run.call(a, b, tol, None)? } else { first };
    match recurse(&mut run, a, b, tol, 0, first, &mut records) {
        Ok(()) => {}
        Err(QuadError::NonFinite { .. }) => run.demote(Status::EvaluationError),
        Err(e) => return Err(e),
    }
    Ok(IntegrationResult::from_records(records, run.evals, run.status))
}

fn recurse(
    run: &mut Run<'_>,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
    out: EstimatorOutcome,
    records: &mut Vec<IntervalRecord>,
) -> Result<()> {
    if out.error_estimate <= tol {
        records.push(record(a, b, depth, out));
        return Ok(());
    }
    let m = 0.5 * (a + b);
    if depth >= run.cfg.max_depth || !(a < m && m < b) {
        run.demote(Status::DepthLimit);
        records.push(record(a, b, depth, out));
        return Ok(());
    }
    if !run.budget_left() {
        run.demote(Status::EvalBudget);
        records.push(record(a, b, depth, out));
        return Ok(());
    }
    let child_tol = tol / std::f64::consts::SQRT_2;
    let state = out.child_state;
    let inherit = |side| state.as_ref().map(|s| Inherited { state: s.clone(), side });
    let left = run.call(a, m, child_tol, inherit(Side::Left).as_ref())?;
    let right = run.call(m, b, child_tol, inherit(Side::Right).as_ref())?;
    recurse(run, a, m, child_tol, depth + 1, left, records)?;
    recurse(run, m, b, child_tol, depth + 1, right, records)
}

struct HeapEntry {
    seq: u64,
    rec: IntervalRecord,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // largest error first, then oldest
    fn cmp(&self, other: &Self) -> Ordering {
        self.rec.error.total_cmp(&other.rec.error).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Running sum that tolerates infinite terms.
#[derive(Default)]
struct ErrorSum {
    finite: f64,
    infinite: usize,
}

impl ErrorSum {
    fn add(&mut self, e: f64) {
        if e.is_infinite() {
            self.infinite += 1;
        } else {
            self.finite += e;
        }
    }

    fn sub(&mut self, e: f64) {
        if e.is_infinite() {
            self.infinite -= 1;
        } else {
            self.finite -= e;
        }
    }

    fn value(&self) -> f64 {
        if self.infinite > 0 {
            f64::INFINITY
        } else {
            self.finite
        }
    }
}

/// Global adaptive integration: always bisect the interval with the largest
/// error until the summed error is at most `tol` (absolute).
pub fn integrate_heap(
    est: &dyn Estimator,
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    cfg: DriverConfig,
) -> Result<IntegrationResult> {
    check_args(a, b, tol)?;
    let mut run = match Run::new(est, f, a, b, cfg) {
        Ok(r) => r,
        Err(QuadError::NonFinite { .. }) => {
            return Ok(IntegrationResult::from_records(vec![], 0, Status::EvaluationError));
        }
        Err(e) => return Err(e),
    };
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut seq = 0u64;
    let mut err = ErrorSum::default();
    let first = match run.call(a, b, tol, None) {
        Ok(o) => o,
        Err(QuadError::NonFinite { .. }) => {
            return Ok(IntegrationResult::from_records(vec![], run.evals, Status::EvaluationError));
        }
        Err(e) => return Err(e),
    };
    err.add(first.error_estimate);
    heap.push(HeapEntry { seq, rec: record(a, b, 0, first) });

    while err.value() > tol {
        let Some(top) = heap.pop() else { break };
        let rec = top.rec;
        let m = 0.5 * (rec.a + rec.b);
        if rec.depth >= cfg.max_depth || !(rec.a < m && m < rec.b) {
            run.demote(Status::DepthLimit);
            frozen.push(rec);
            continue;
        }
        if !run.budget_left() {
            run.demote(Status::EvalBudget);
            heap.push(HeapEntry { seq: top.seq, rec });
            break;
        }
        let local_tol = tol / std::f64::consts::SQRT_2;
        let inherit = |side| rec.child_state.as_ref().map(|s| Inherited { state: s.clone(), side });
        let children = run
            .call(rec.a, m, local_tol, inherit(Side::Left).as_ref())
            .and_then(|l| Ok((l, run.call(m, rec.b, local_tol, inherit(Side::Right).as_ref())?)));
        let (l, r) = match children {
            Ok(c) => c,
            Err(QuadError::NonFinite { .. }) => {
                run.demote(Status::EvaluationError);
                heap.push(HeapEntry { seq: top.seq, rec });
                break;
            }
            Err(e) => return Err(e),
        };
        err.sub(rec.error);
        err.add(l.error_estimate);
        err.add(r.error_estimate);
        for (lo, hi, o) in [(rec.a, m, l), (m, rec.b, r)] {
            seq += 1;
            heap.push(HeapEntry { seq, rec: record(lo, hi, rec.depth + 1, o) });
        }
    }
    let mut records: Vec<IntervalRecord> = heap.into_iter().map(|e| e.rec).chain(frozen).collect();
    records.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut res = IntegrationResult::from_records(records, run.evals, run.status);
    if res.status == Status::Converged && res.error_bound > tol {
        res.status = Status::DepthLimit;
    }
    Ok(res)
}
