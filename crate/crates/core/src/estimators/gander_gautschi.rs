use super::{check_interval, Context, ErrorScale, Estimator, EstimatorConfig, EstimatorOutcome, Inherited};
use crate::error::Result;
use crate::rules::{lobatto_kronrod_7, map_node, EmbeddedPair, Sampler};

/// Left half (including the centre) of the 13-point start-up rule: the
/// Lobatto–Kronrod nodes plus the midpoints `±0.942882415695480`,
/// `±0.641853342345781`, `±0.236383199662150`, with interpolatory weights.
const INIT_NODES: [f64; 7] = [
    -1.0,
    -0.942882415695480,
    -0.816496580927726,
    -0.641853342345781,
    -0.447213595499958,
    -0.236383199662150,
    0.0,
];
const INIT_WEIGHTS: [f64; 7] = [
    0.015827191973480034,
    0.094273840218849924,
    0.155071987336585945,
    0.188821573960182359,
    0.199773405226858232,
    0.224926465333339547,
    0.242611071901407918,
];

/// Rough whole-interval integral `|Î|` and the evaluations it took.
pub fn global_scale(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, usize)> {
    check_interval(a, b)?;
    let mut s = Sampler::new(f);
    let mut sum = 0.0;
    for i in 0..13 {
        let (t, w) = if i < 7 { (INIT_NODES[i], INIT_WEIGHTS[i]) } else { (-INIT_NODES[12 - i], INIT_WEIGHTS[12 - i]) };
        sum += w * s.eval(map_node(t, a, b), a, b)?;
    }
    Ok(((0.5 * (b - a) * sum).abs(), s.evals()))
}

/// 4-point Gauss–Lobatto against its 7-point Kronrod extension, relative to
/// a global integral estimate.
pub struct GanderGautschi {
    config: EstimatorConfig,
    pair: EmbeddedPair,
}

impl GanderGautschi {
    pub fn new() -> Self {
        Self { config: EstimatorConfig::new("gander-gautschi", 5, &[]), pair: lobatto_kronrod_7() }
    }
}

impl Default for GanderGautschi {
    fn default() -> Self {
        Self::new()
    }
}

impl Estimator for GanderGautschi {
    fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    fn needs_global_scale(&self) -> bool {
        true
    }

    fn estimate(
        &self,
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        ctx: &Context,
        _parent: Option<&Inherited>,
    ) -> Result<EstimatorOutcome> {
        check_interval(a, b)?;
        let mut s = Sampler::new(f);
        let v = s.sample(&self.pair.upper, a, b)?;
        let k7 = self.pair.upper.combine(&v, a, b);
        let gl4 = self.pair.lower_from_upper(&v, a, b);
        let diff = (gl4 - k7).abs();
        let scale = ctx.global_scale.unwrap_or(k7.abs());
        let (native, kind) = if scale == 0.0 {
            (diff, ErrorScale::Absolute)
        } else {
            (diff / scale, ErrorScale::GloballyRelative)
        };
        Ok(EstimatorOutcome {
            integral: k7,
            error_estimate: diff,
            native_estimate: native,
            scale: kind,
            evals: s.evals(),
            child_state: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_up_rule_has_degree_nineteen() {
        for j in 0..=20 {
            let (v, n) = global_scale(&|x| x.powi(j), -1.0, 1.0).unwrap();
            assert_eq!(n, 13);
            let want = if j % 2 == 1 { 0.0 } else { 2.0 / (j as f64 + 1.0) };
            if j <= 19 {
                assert!((v - want).abs() < 1e-12, "{j}");
            } else {
                assert!((v - want).abs() > 1e-8);
            }
        }
    }

    #[test]
    fn linear_is_exact() {
        let g = GanderGautschi::new();
        let ctx = Context { tol_abs: 0.0, global_scale: Some(2.0) };
        let o = g.estimate(&|x| 2.0 * x + 1.0, 0.0, 1.0, &ctx, None).unwrap();
        assert!(o.native_estimate < 1e-15);
        assert_eq!(o.evals, 7);
        let o = g.estimate(&|x| x, -1.0, 1.0, &Context { tol_abs: 0.0, global_scale: Some(0.0) }, None).unwrap();
        assert_eq!(o.scale, ErrorScale::Absolute);
    }
}
