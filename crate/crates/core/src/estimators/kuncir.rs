use super::{check_interval, Context, ErrorScale, Estimator, EstimatorConfig, EstimatorOutcome, Inherited};
use crate::error::Result;
use crate::rules::{simpson_rule, Sampler, QuadRule};

/// Simpson's rule against its two-panel compound, as a locally relative error.
pub struct Kuncir {
    config: EstimatorConfig,
    rule: QuadRule,
}

impl Kuncir {
    pub fn new() -> Self {
        Self { config: EstimatorConfig::new("kuncir", 3, &[]), rule: simpson_rule() }
    }
}

impl Default for Kuncir {
    fn default() -> Self {
        Self::new()
    }
}

impl Estimator for Kuncir {
    fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    fn estimate(
        &self,
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        _ctx: &Context,
        _parent: Option<&Inherited>,
    ) -> Result<EstimatorOutcome> {
        check_interval(a, b)?;
        let mut s = Sampler::new(f);
        let m = 0.5 * (a + b);
        let x = [a, 0.5 * (a + m), m, 0.5 * (m + b), b];
        let mut v = [0.0; 5];
        for i in 0..5 {
            v[i] = s.eval(x[i], a, b)?;
        }
        let s1 = self.rule.combine(&[v[0], v[2], v[4]], a, b);
        let s2 = self.rule.combine(&[v[0], v[1], v[2]], a, m) + self.rule.combine(&[v[2], v[3], v[4]], m, b);
        let diff = (s1 - s2).abs();
        let native = if s2 == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / s2.abs()
        };
        Ok(EstimatorOutcome {
            integral: s2,
            error_estimate: diff,
            native_estimate: native,
            scale: ErrorScale::LocallyRelative,
            evals: s.evals(),
            child_state: None,
        })
    }
}
