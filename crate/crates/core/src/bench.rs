//! Monte Carlo harness: false-positive / false-negative tables and the
//! convergence experiments.
//!
//! Every realization draws its parameters from a ChaCha8 stream keyed by
//! `(seed, family, index)`, so all estimators see identical instances and
//! results do not depend on thread scheduling.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::drivers::{integrate_recursive, DriverConfig, Status};
use crate::error::{QuadError, Result};
use crate::estimators::{global_scale, Context, ErrorScale, Estimator, Inherited};
use crate::legendre::Side;
use crate::testbed::{make_instance, Family, TestInstance};

/// The tolerances of the published tables.
pub const TOLERANCES: [f64; 5] = [1e-1, 1e-3, 1e-6, 1e-9, 1e-12];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses rayon when built with the `parallel` feature; sequential otherwise.
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Correct,
    FalsePositive,
    FalseNegative,
    TrueNegative,
}

/// Four-way classification of an estimate against the true error.
pub fn classify(error_estimate: f64, actual_error: f64, tol: f64) -> Outcome {
    match (error_estimate <= tol, actual_error <= tol) {
        (true, true) => Outcome::Correct,
        (true, false) => Outcome::FalsePositive,
        (false, true) => Outcome::FalseNegative,
        (false, false) => Outcome::TrueNegative,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub estimator: String,
    pub family: Family,
    pub tol_rel: f64,
    pub realizations: usize,
    pub correct: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
    /// Realizations where the integrand could not be evaluated.
    pub eval_errors: usize,
    pub seed: u64,
}

impl BenchCell {
    fn empty(estimator: &str, family: Family, tol_rel: f64, seed: u64) -> Self {
        Self {
            estimator: estimator.to_string(),
            family,
            tol_rel,
            realizations: 0,
            correct: 0,
            false_pos: 0,
            false_neg: 0,
            true_neg: 0,
            eval_errors: 0,
            seed,
        }
    }

    fn add(&mut self, o: Option<Outcome>) {
        self.realizations += 1;
        match o {
            Some(Outcome::Correct) => self.correct += 1,
            Some(Outcome::FalsePositive) => self.false_pos += 1,
            Some(Outcome::FalseNegative) => self.false_neg += 1,
            Some(Outcome::TrueNegative) => self.true_neg += 1,
            None => self.eval_errors += 1,
        }
    }

    fn merge(mut self, o: Self) -> Self {
        self.realizations += o.realizations;
        self.correct += o.correct;
        self.false_pos += o.false_pos;
        self.false_neg += o.false_neg;
        self.true_neg += o.true_neg;
        self.eval_errors += o.eval_errors;
        self
    }

    /// Realizations that were classified.
    pub fn classified(&self) -> usize {
        self.realizations - self.eval_errors
    }

    fn pct(&self, n: usize) -> f64 {
        let d = self.classified();
        if d == 0 {
            0.0
        } else {
            100.0 * n as f64 / d as f64
        }
    }

    pub fn correct_pct(&self) -> f64 {
        self.pct(self.correct)
    }

    pub fn fp_pct(&self) -> f64 {
        self.pct(self.false_pos)
    }

    pub fn fn_pct(&self) -> f64 {
        self.pct(self.false_neg)
    }

    /// `C (FP/FN)` with two decimals.
    pub fn render(&self) -> String {
        format!("{:.2} ({:.2}/{:.2})", self.correct_pct(), self.fp_pct(), self.fn_pct())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random stream for one realization.
pub fn realization_rng(seed: u64, family: Family, index: u64) -> ChaCha8Rng {
    let s = splitmix64(splitmix64(splitmix64(seed) ^ family.index()) ^ index);
    ChaCha8Rng::seed_from_u64(s)
}

/// The instance every estimator sees for `(seed, family, index)`.
pub fn realization(seed: u64, family: Family, index: u64, test_degree: usize) -> TestInstance {
    make_instance(family, test_degree, &mut realization_rng(seed, family, index))
}

/// One estimator application; returns `None` on an evaluation error.
///
/// Relative estimators are compared with `tol_rel` in their own convention,
/// the others with `tol_rel |reference|`. The refined interpolation
/// estimator has no first-interval estimate, so it is applied to both halves;
/// their integrals are summed and the estimate passes only if both halves
/// pass at `tol / sqrt(2)`.
pub fn single_shot(est: &dyn Estimator, inst: &TestInstance, tol_rel: f64) -> Option<Outcome> {
    let f = |x: f64| inst.eval(x);
    let (a, b) = (inst.a, inst.b);
    let tol_abs = tol_rel * inst.reference.abs();
    let mut ctx = Context { tol_abs, global_scale: None };
    if est.needs_global_scale() {
        ctx.global_scale = Some(global_scale(&f, a, b).ok()?.0);
    }
    let top = est.estimate(&f, a, b, &ctx, None).ok()?;
    let (integral, estimate, scale) = match &top.child_state {
        Some(st) if top.error_estimate.is_infinite() => {
            let m = 0.5 * (a + b);
            let child = Context { tol_abs: tol_abs / std::f64::consts::SQRT_2, ..ctx };
            let l = est.estimate(&f, a, m, &child, Some(&Inherited { state: st.clone(), side: Side::Left })).ok()?;
            let r = est.estimate(&f, m, b, &child, Some(&Inherited { state: st.clone(), side: Side::Right })).ok()?;
            // accepted iff both halves pass at tol/sqrt(2), as in the recursive driver
            (l.integral + r.integral, std::f64::consts::SQRT_2 * l.error_estimate.max(r.error_estimate), ErrorScale::Absolute)
        }
        _ => (top.integral, top.native_estimate, top.scale),
    };
    let actual = (integral - inst.reference).abs();
    Some(match scale {
        ErrorScale::Absolute => classify(estimate, actual, tol_abs),
        ErrorScale::LocallyRelative | ErrorScale::GloballyRelative => {
            classify(estimate, actual / inst.reference.abs(), tol_rel)
        }
    })
}

fn map_reduce<T: Send, F>(n: usize, exec: Execution, init: impl Fn() -> T + Sync + Send, f: F, merge: impl Fn(T, T) -> T + Sync + Send) -> T
where
    F: Fn(&mut T, usize) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..n)
            .into_par_iter()
            .fold(&init, |mut acc, i| {
                f(&mut acc, i);
                acc
            })
            .reduce(&init, &merge);
    }
    let _ = (exec, &merge);
    let mut acc = init();
    for i in 0..n {
        f(&mut acc, i);
    }
    acc
}

/// Classify `realizations` single-shot applications at one tolerance.
pub fn run_cell(
    est: &dyn Estimator,
    family: Family,
    tol_rel: f64,
    realizations: usize,
    seed: u64,
    exec: Execution,
) -> BenchCell {
    let degree = est.config().test_degree;
    map_reduce(
        realizations,
        exec,
        || BenchCell::empty(est.name(), family, tol_rel, seed),
        |cell, i| {
            let inst = realization(seed, family, i as u64, degree);
            cell.add(single_shot(est, &inst, tol_rel));
        },
        BenchCell::merge,
    )
}

/// Every `(estimator, family, tolerance)` cell, in that nesting order.
pub fn run_suite(
    estimators: &[Box<dyn Estimator>],
    families: &[Family],
    tols: &[f64],
    realizations: usize,
    seed: u64,
    exec: Execution,
) -> Vec<BenchCell> {
    let jobs: Vec<(usize, Family, f64)> = (0..estimators.len())
        .flat_map(|e| families.iter().flat_map(move |&f| tols.iter().map(move |&t| (e, f, t))))
        .collect();
    let one = |&(e, f, t): &(usize, Family, f64)| run_cell(&*estimators[e], f, t, realizations, seed, Execution::Sequential);
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return jobs.par_iter().map(one).collect();
    }
    let _ = exec;
    jobs.iter().map(one).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Lyness,
    Waldvogel,
}

impl Experiment {
    pub fn family(self) -> Family {
        match self {
            Experiment::Lyness => Family::Lyness,
            Experiment::Waldvogel => Family::Waldvogel,
        }
    }
}

impl FromStr for Experiment {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lyness" => Ok(Experiment::Lyness),
            "waldvogel" => Ok(Experiment::Waldvogel),
            _ => Err(QuadError::InvalidArgument(format!("unknown experiment `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub estimator: String,
    pub function: Family,
    pub realizations: usize,
    /// Runs whose final error exceeds the tolerance, plus runs that stopped
    /// on a budget or an evaluation error.
    pub failures: usize,
    pub mean_evals: f64,
    pub depth_limited: usize,
    pub budget_exhausted: usize,
    pub eval_errors: usize,
}

#[derive(Default, Clone, Copy)]
struct ExpAcc {
    failures: usize,
    evals: usize,
    depth: usize,
    budget: usize,
    errors: usize,
}

/// Full recursive-driver runs on `realizations` random instances.
pub fn run_experiment(
    which: Experiment,
    est: &dyn Estimator,
    realizations: usize,
    tol_rel: f64,
    seed: u64,
    cfg: DriverConfig,
    exec: Execution,
) -> Result<ExperimentSummary> {
    if realizations == 0 {
        return Err(QuadError::InvalidArgument("need at least one realization".into()));
    }
    let family = which.family();
    let acc = map_reduce(
        realizations,
        exec,
        ExpAcc::default,
        |acc, i| {
            let inst = realization(seed, family, i as u64, 0);
            let f = |x: f64| inst.eval(x);
            let cfg = DriverConfig { reference: Some(inst.reference), ..cfg };
            let Ok(r) = integrate_recursive(est, &f, inst.a, inst.b, tol_rel, cfg) else {
                acc.errors += 1;
                acc.failures += 1;
                return;
            };
            acc.evals += r.evals;
            let bad = (r.value - inst.reference).abs() > tol_rel * inst.reference.abs();
            match r.status {
                Status::EvalBudget => acc.budget += 1,
                Status::EvaluationError => acc.errors += 1,
                Status::DepthLimit => acc.depth += 1,
                Status::Converged => {}
            }
            if bad || matches!(r.status, Status::EvalBudget | Status::EvaluationError) {
                acc.failures += 1;
            }
        },
        |x, y| ExpAcc {
            failures: x.failures + y.failures,
            evals: x.evals + y.evals,
            depth: x.depth + y.depth,
            budget: x.budget + y.budget,
            errors: x.errors + y.errors,
        },
    );
    Ok(ExperimentSummary {
        estimator: est.name().to_string(),
        function: family,
        realizations,
        failures: acc.failures,
        mean_evals: acc.evals as f64 / realizations as f64,
        depth_limited: acc.depth,
        budget_exhausted: acc.budget,
        eval_errors: acc.errors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(QuadError::InvalidArgument(format!("unknown format `{s}`"))),
        }
    }
}

pub const CSV_HEADER: &str = "estimator,family,tol,correct,fp,fn,tn,realizations,seed";

fn first_seen<T: PartialEq + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}

/// Render cells as CSV (raw counts) or as one markdown table per estimator.
pub fn emit_report(cells: &[BenchCell], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for c in cells {
                let _ = writeln!(
                    out,
                    "{},{},{:e},{},{},{},{},{},{}",
                    c.estimator,
                    c.family,
                    c.tol_rel,
                    c.correct,
                    c.false_pos,
                    c.false_neg,
                    c.true_neg,
                    c.realizations,
                    c.seed
                );
            }
        }
        ReportFormat::Markdown => {
            out.push_str("# Error estimator benchmark\n");
            for est in first_seen(cells.iter().map(|c| c.estimator.as_str())) {
                let mine: Vec<&BenchCell> = cells.iter().filter(|c| c.estimator == est).collect();
                let tols = first_seen(mine.iter().map(|c| c.tol_rel));
                let fams = first_seen(mine.iter().map(|c| c.family));
                let _ = write!(out, "\n## {est}\n\n| Function |");
                for t in &tols {
                    let _ = write!(out, " τ={t:e} |");
                }
                out.push_str("\n|---|");
                out.push_str(&"---|".repeat(tols.len()));
                out.push('\n');
                for fam in fams {
                    let _ = write!(out, "| {fam} |");
                    for &t in &tols {
                        match mine.iter().find(|c| c.family == fam && c.tol_rel == t) {
                            Some(c) => {
                                let _ = write!(out, " {} |", c.render());
                            }
                            None => out.push_str(" |"),
                        }
                    }
                    out.push('\n');
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::by_name;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1e-8, 1e-8, 1e-6), Outcome::Correct);
        assert_eq!(classify(1e-8, 1e-3, 1e-6), Outcome::FalsePositive);
        assert_eq!(classify(1e-3, 1e-8, 1e-6), Outcome::FalseNegative);
        assert_eq!(classify(1e-3, 1e-3, 1e-6), Outcome::TrueNegative);
    }

    #[test]
    fn render_and_empty_report() {
        let mut c = BenchCell::empty("kuncir", Family::Pn, 0.1, 1);
        c.add(Some(Outcome::Correct));
        assert_eq!(c.render(), "100.00 (0.00/0.00)");
        assert_eq!(emit_report(&[], ReportFormat::Csv), format!("{CSV_HEADER}\n"));
        assert_eq!(emit_report(&[], ReportFormat::Markdown), "# Error estimator benchmark\n");
    }

    #[test]
    fn streams_are_shared_across_estimators() {
        let a = realization(7, Family::D1, 3, 3);
        let b = realization(7, Family::D1, 3, 19);
        assert_eq!(a, b);
        let p = realization(7, Family::Pn, 3, 3);
        let q = realization(7, Family::Pn, 3, 19);
        assert_eq!((p.a, p.b), (q.a, q.b));
        assert_ne!(realization(7, Family::D1, 4, 3), a);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let e = by_name("qag").unwrap();
        let s = run_cell(&*e, Family::D1, 1e-3, 200, 5, Execution::Sequential);
        let p = run_cell(&*e, Family::D1, 1e-3, 200, 5, Execution::Parallel);
        assert_eq!(s, p);
        assert_eq!(s.correct + s.false_pos + s.false_neg + s.true_neg + s.eval_errors, 200);
    }
}
