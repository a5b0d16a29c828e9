use super::{check_interval, Context, Estimator, EstimatorConfig, EstimatorOutcome, Inherited};
use crate::error::Result;
use crate::rules::{gauss_kronrod_21, EmbeddedPair, Sampler};

/// Laurie's extrapolated estimate from the 10/21-point Gauss–Kronrod pair on
/// the interval and on its two halves.
pub struct Laurie {
    config: EstimatorConfig,
    pair: EmbeddedPair,
}

impl Laurie {
    pub fn new() -> Self {
        Self { config: EstimatorConfig::new("laurie", 19, &[]), pair: gauss_kronrod_21() }
    }

    fn both(&self, s: &mut Sampler<'_>, a: f64, b: f64) -> Result<(f64, f64)> {
        let v = s.sample(&self.pair.upper, a, b)?;
        Ok((self.pair.lower_from_upper(&v, a, b), self.pair.upper.combine(&v, a, b)))
    }
}

impl Default for Laurie {
    fn default() -> Self {
        Self::new()
    }
}

/// The error from the four approximations, or `None` when the practical
/// validity conditions fail.
pub(crate) fn laurie_error(qb1: f64, qa1: f64, qb2: f64, qa2: f64) -> Option<f64> {
    if !((qa2 - qa1).abs() < (qb2 - qb1).abs()) {
        return None;
    }
    let den1 = qa1 - qb1;
    if den1 == 0.0 {
        return None;
    }
    let q = (qa2 - qb2) / den1;
    if !(0.0..1.0).contains(&q) {
        return None;
    }
    let den = qb2 - qb1 - qa2 + qa1;
    if den == 0.0 {
        return None;
    }
    Some(((qa2 - qb2) * (qa2 - qa1) / den).abs())
}

impl Estimator for Laurie {
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
        let (qb1, qa1) = self.both(&mut s, a, b)?;
        let (gl, kl) = self.both(&mut s, a, m)?;
        let (gr, kr) = self.both(&mut s, m, b)?;
        let (qb2, qa2) = (gl + gr, kl + kr);
        let err = laurie_error(qb1, qa1, qb2, qa2).unwrap_or((qa2 - qb2).abs());
        Ok(EstimatorOutcome::absolute(qa2, err, s.evals()))
    }
}
