//! Local error estimators behind a common trait.
//!
//! An estimator sees one interval and returns an integral approximation, an
//! error estimate and the number of integrand calls it made. Kuncir's and
//! Gander–Gautschi's estimates are relative by construction; they report
//! both their native relative value and its absolute equivalent.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{QuadError, Result};
use crate::legendre::Side;

mod berntsen_espelid;
mod gander_gautschi;
mod interp;
mod kuncir;
mod laurie;
mod oliver;
mod qag;

pub use berntsen_espelid::{BerntsenEspelid, NullRuleSet};
pub use gander_gautschi::{global_scale, GanderGautschi};
pub use interp::{NewRefined, NewTrivial, NORM_SCALE};
pub use kuncir::Kuncir;
pub use laurie::Laurie;
pub use oliver::{oliver_threshold, Oliver};
pub use qag::Qag;

/// Registry names, in table order.
pub const NAMES: [&str; 8] = [
    "kuncir",
    "oliver",
    "qag",
    "berntsen-espelid",
    "gander-gautschi",
    "laurie",
    "new-trivial",
    "new-refined",
];

/// How an estimator's native error number relates to the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorScale {
    Absolute,
    /// Divided by the local integral.
    LocallyRelative,
    /// Divided by a rough global integral.
    GloballyRelative,
}

#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub name: &'static str,
    /// Chebyshev degree `n` of the `p_n` benchmark family.
    pub test_degree: usize,
    pub parameters: BTreeMap<&'static str, f64>,
}

impl EstimatorConfig {
    fn new(name: &'static str, test_degree: usize, params: &[(&'static str, f64)]) -> Self {
        Self { name, test_degree, parameters: params.iter().copied().collect() }
    }

    pub fn param(&self, key: &str) -> f64 {
        self.parameters[key]
    }

    pub(crate) fn set(&mut self, key: &'static str, value: f64) {
        self.parameters.insert(key, value);
    }
}

/// Per-call inputs besides the interval.
#[derive(Debug, Clone, Copy, Default)]
pub struct Context {
    /// Absolute local tolerance; only the doubly adaptive cascade reads it.
    pub tol_abs: f64,
    /// `|Î|` for globally relative estimators.
    pub global_scale: Option<f64>,
}

/// Interval data an estimator hands to its two children.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalState {
    pub(crate) coeffs: Vec<f64>,
    pub(crate) values: Vec<f64>,
}

/// Parent state as seen by one child.
#[derive(Debug, Clone)]
pub struct Inherited {
    pub state: Arc<IntervalState>,
    pub side: Side,
}

#[derive(Debug, Clone)]
pub struct EstimatorOutcome {
    pub integral: f64,
    /// Absolute error estimate, `>= 0`, possibly `+inf`.
    pub error_estimate: f64,
    /// The estimator's own number, in the convention given by `scale`.
    pub native_estimate: f64,
    pub scale: ErrorScale,
    pub evals: usize,
    pub child_state: Option<Arc<IntervalState>>,
}

impl EstimatorOutcome {
    pub(crate) fn absolute(integral: f64, error: f64, evals: usize) -> Self {
        Self {
            integral,
            error_estimate: error,
            native_estimate: error,
            scale: ErrorScale::Absolute,
            evals,
            child_state: None,
        }
    }
}

pub trait Estimator: Send + Sync {
    fn config(&self) -> &EstimatorConfig;

    fn name(&self) -> &'static str {
        self.config().name
    }

    /// Whether callers must supply `Context::global_scale`.
    fn needs_global_scale(&self) -> bool {
        false
    }

    /// Whether the outcome depends on `Context::tol_abs`.
    fn uses_tolerance(&self) -> bool {
        false
    }

    fn estimate(
        &self,
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        ctx: &Context,
        parent: Option<&Inherited>,
    ) -> Result<EstimatorOutcome>;
}

pub fn by_name(name: &str) -> Result<Box<dyn Estimator>> {
    Ok(match name {
        "kuncir" => Box::new(Kuncir::new()),
        "oliver" => Box::new(Oliver::new()),
        "qag" => Box::new(Qag::new()),
        "berntsen-espelid" => Box::new(BerntsenEspelid::new()),
        "gander-gautschi" => Box::new(GanderGautschi::new()),
        "laurie" => Box::new(Laurie::new()),
        "new-trivial" => Box::new(NewTrivial::new()),
        "new-refined" => Box::new(NewRefined::new()),
        _ => return Err(QuadError::UnknownEstimator(name.to_string())),
    })
}

pub fn all() -> Vec<Box<dyn Estimator>> {
    NAMES.iter().map(|n| by_name(n).expect("registered")).collect()
}

pub(crate) fn check_interval(a: f64, b: f64) -> Result<()> {
    if a < b && a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(QuadError::InvalidArgument(format!("bad interval [{a}, {b}]")))
    }
}

/// `|num / den|` with `0/0 = 0` and `x/0 = inf`.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).abs()
    }
}
