use super::{check_interval, Context, Estimator, EstimatorConfig, EstimatorOutcome, Inherited};
use crate::error::Result;
use crate::rules::{gauss_kronrod_21, EmbeddedPair, Sampler};

/// The 10/21-point Gauss–Kronrod estimate with the QUADPACK scaling.
pub struct Qag {
    config: EstimatorConfig,
    pair: EmbeddedPair,
}

impl Qag {
    pub fn new() -> Self {
        Self {
            config: EstimatorConfig::new("qag", 19, &[("scale", 200.0), ("exponent", 1.5)]),
            pair: gauss_kronrod_21(),
        }
    }

    /// The scaling applied to the raw difference `|G - K|` given `Ĩ`.
    pub fn scaled(&self, diff: f64, i_tilde: f64) -> f64 {
        if i_tilde == 0.0 {
            return diff;
        }
        let c = self.config.param("scale");
        let p = self.config.param("exponent");
        i_tilde * (c * diff / i_tilde).powf(p).min(1.0)
    }
}

impl Default for Qag {
    fn default() -> Self {
        Self::new()
    }
}

impl Estimator for Qag {
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
        let v = s.sample(&self.pair.upper, a, b)?;
        let k = self.pair.upper.combine(&v, a, b);
        let g = self.pair.lower_from_upper(&v, a, b);
        let mean = k / (b - a);
        let dev: Vec<f64> = v.iter().map(|x| (x - mean).abs()).collect();
        let i_tilde = self.pair.upper.combine(&dev, a, b);
        let err = self.scaled((g - k).abs(), i_tilde);
        Ok(EstimatorOutcome::absolute(k, err, s.evals()))
    }
}
