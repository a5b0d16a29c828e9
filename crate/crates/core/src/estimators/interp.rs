//! Estimators that compare Legendre interpolants in coefficient space.

use std::sync::Arc;

use super::{check_interval, Context, Estimator, EstimatorConfig, EstimatorOutcome, Inherited, IntervalState};
use crate::error::Result;
use crate::legendre::{
    integral_from_coeffs, l2_distance, l2_norm, mat_vec, newton_coeffs, transform_pair, CoeffVector, Side,
    TransformPair, VandermondeSystem,
};
use crate::rules::{clenshaw_curtis, QuadRule, Sampler};

/// A node set with the inverse of its Legendre–Vandermonde matrix.
struct Interpolator {
    rule: QuadRule,
    inverse: Vec<f64>,
}

impl Interpolator {
    fn cc(n: usize) -> Self {
        let rule = clenshaw_curtis(n).expect("n >= 2");
        let inverse = VandermondeSystem::new(rule.nodes()).expect("distinct nodes").inverse();
        Self { rule, inverse }
    }

    fn coeffs(&self, values: &[f64]) -> Vec<f64> {
        mat_vec(&self.inverse, values)
    }
}

/// Multiplier on `(b - a)/2 * ‖·‖`. The published tables for both
/// estimators are reproduced with 2, i.e. `(b - a) * ‖·‖`.
pub const NORM_SCALE: f64 = 2.0;

/// Interpolants on the 11- and 21-point Clenshaw–Curtis nodes; the error is
/// the L2 distance between them.
pub struct NewTrivial {
    config: EstimatorConfig,
    coarse: Interpolator,
    fine: Interpolator,
}

impl NewTrivial {
    pub fn new() -> Self {
        Self {
            config: EstimatorConfig::new("new-trivial", 10, &[("norm_scale", NORM_SCALE)]),
            coarse: Interpolator::cc(11),
            fine: Interpolator::cc(21),
        }
    }
}

impl NewTrivial {
    pub fn with_norm_scale(mut self, scale: f64) -> Self {
        self.config.set("norm_scale", scale);
        self
    }
}

impl Default for NewTrivial {
    fn default() -> Self {
        Self::new()
    }
}

impl Estimator for NewTrivial {
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
        let v = s.sample(&self.fine.rule, a, b)?;
        let coarse_vals: Vec<f64> = v.iter().step_by(2).copied().collect();
        let c1 = self.coarse.coeffs(&coarse_vals);
        let c2 = self.fine.coeffs(&v);
        let err = self.config.param("norm_scale") * 0.5 * (b - a) * l2_distance(&c1, &c2);
        Ok(EstimatorOutcome::absolute(integral_from_coeffs(&c2, a, b), err, s.evals()))
    }
}

/// One 11-point interpolant per interval, compared against the parent's
/// interpolant restricted to the same half and scaled by the estimated
/// magnitude of the 11th derivative.
pub struct NewRefined {
    config: EstimatorConfig,
    interp: Interpolator,
    transforms: TransformPair,
    /// Newton polynomial of the nodes.
    b: Vec<f64>,
    /// Parent Newton polynomial seen from the left and right child.
    b_old: [Vec<f64>; 2],
    /// Distance `‖b - b_old‖` per side.
    b_gap: [f64; 2],
}

impl NewRefined {
    pub fn new() -> Self {
        let interp = Interpolator::cc(11);
        let n = interp.rule.len();
        let transforms = transform_pair(n);
        let b = newton_coeffs(interp.rule.nodes()).0;
        let ext = transform_pair(n + 1);
        let scale = 2f64.powi(n as i32);
        let side = |s: Side| -> Vec<f64> { ext.apply(s, &b).into_iter().map(|v| v * scale).collect() };
        let b_old = [side(Side::Left), side(Side::Right)];
        let b_gap = [l2_distance(&b, &b_old[0]), l2_distance(&b, &b_old[1])];
        Self {
            config: EstimatorConfig::new("new-refined", 10, &[("theta1", 1.1), ("norm_scale", NORM_SCALE)]),
            interp,
            transforms,
            b,
            b_old,
            b_gap,
        }
    }

    pub fn newton(&self) -> &[f64] {
        &self.b
    }

    pub fn newton_old(&self, side: Side) -> &[f64] {
        &self.b_old[side_index(side)]
    }

    /// `‖c - c_old‖ / ‖b - b_old‖` and whether the pointwise check passed.
    fn derivative_check(&self, c: &[f64], parent: &Inherited, c_old: &[f64]) -> (f64, bool) {
        let gap = self.b_gap[side_index(parent.side)];
        let dist = l2_distance(c, c_old);
        if gap == 0.0 {
            return (0.0, false);
        }
        let d = dist / gap;
        let theta = self.config.param("theta1");
        let g = CoeffVector(c.to_vec());
        let nodes = self.interp.rule.nodes();
        let fmax = parent.state.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let slack = 64.0 * f64::EPSILON * fmax;
        let ok = nodes.iter().zip(&parent.state.values).all(|(&x, &fx)| {
            let y = match parent.side {
                Side::Left if x <= 0.0 => 2.0 * x + 1.0,
                Side::Right if x >= 0.0 => 2.0 * x - 1.0,
                _ => return true,
            };
            let pi: f64 = nodes.iter().map(|&xi| y - xi).product();
            (g.eval(y) - fx).abs() <= theta * d * pi.abs() + slack
        });
        (d, ok)
    }
}

fn side_index(s: Side) -> usize {
    match s {
        Side::Left => 0,
        Side::Right => 1,
    }
}

impl NewRefined {
    pub fn with_norm_scale(mut self, scale: f64) -> Self {
        self.config.set("norm_scale", scale);
        self
    }
}

impl Default for NewRefined {
    fn default() -> Self {
        Self::new()
    }
}

impl Estimator for NewRefined {
    fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    fn estimate(
        &self,
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        _ctx: &Context,
        parent: Option<&Inherited>,
    ) -> Result<EstimatorOutcome> {
        check_interval(a, b)?;
        let mut s = Sampler::new(f);
        let values = s.sample(&self.interp.rule, a, b)?;
        let c = self.interp.coeffs(&values);
        let half = self.config.param("norm_scale") * 0.5 * (b - a);
        let err = match parent {
            None => f64::INFINITY,
            Some(p) => {
                let c_old = self.transforms.apply(p.side, &p.state.coeffs);
                let (d, ok) = self.derivative_check(&c, p, &c_old);
                if ok {
                    half * d * l2_norm(&self.b)
                } else {
                    half * l2_distance(&c, &c_old)
                }
            }
        };
        let integral = integral_from_coeffs(&c, a, b);
        let mut out = EstimatorOutcome::absolute(integral, err, s.evals());
        out.child_state = Some(Arc::new(IntervalState { coeffs: c, values }));
        Ok(out)
    }
}
