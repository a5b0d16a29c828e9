use super::{check_interval, ratio, Context, Estimator, EstimatorConfig, EstimatorOutcome, Inherited};
use crate::error::Result;
use crate::legendre::{l2_norm, legendre_all};
use crate::rules::{clenshaw_curtis, QuadRule, Sampler};

/// Orthogonal null rules over the nodes of a quadrature rule.
#[derive(Debug, Clone)]
pub struct NullRuleSet {
    /// `rules[k]` has degree `k`: it annihilates every polynomial of degree
    /// `<= k` on the nodes.
    rules: Vec<Vec<f64>>,
    quad_weights: Vec<f64>,
}

impl NullRuleSet {
    /// Euclidean Gram–Schmidt on the Legendre–Vandermonde columns; the
    /// column of degree `k + 1` yields the null rule of degree `k`.
    pub fn new(rule: &QuadRule) -> Self {
        let n = rule.len();
        let mut cols = vec![vec![0.0; n]; n];
        let mut row = vec![0.0; n];
        for (i, &x) in rule.nodes().iter().enumerate() {
            legendre_all(x, &mut row);
            for j in 0..n {
                cols[j][i] = row[j];
            }
        }
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
        for mut v in cols {
            for _ in 0..2 {
                for u in &q {
                    let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
                }
            }
            let nv = l2_norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            q.push(v);
        }
        let wn = l2_norm(rule.weights());
        let rules = q.into_iter().skip(1).map(|v| v.into_iter().map(|x| x * wn).collect()).collect();
        Self { rules, quad_weights: rule.weights().to_vec() }
    }

    pub fn rules(&self) -> &[Vec<f64>] {
        &self.rules
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// `e_k` for every rule, on reference-interval values.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.rules.iter().map(|u| u.iter().zip(values).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Null-rule estimate on the 21-point Clenshaw–Curtis rule.
pub struct BerntsenEspelid {
    config: EstimatorConfig,
    rule: QuadRule,
    nulls: NullRuleSet,
}

impl BerntsenEspelid {
    pub fn new() -> Self {
        let rule = clenshaw_curtis(21).expect("21 points");
        let nulls = NullRuleSet::new(&rule);
        Self {
            config: EstimatorConfig::new(
                "berntsen-espelid",
                21,
                &[("K", 3.0), ("r_critical", 0.25), ("alpha", 0.5), ("safety", 10.0)],
            ),
            rule,
            nulls,
        }
    }

    pub fn null_rules(&self) -> &NullRuleSet {
        &self.nulls
    }

    /// Error on the reference interval from the null-rule responses.
    fn reference_error(&self, e: &[f64]) -> f64 {
        let kk = self.config.param("K") as usize;
        let r_crit = self.config.param("r_critical");
        let alpha = self.config.param("alpha");
        let c = self.config.param("safety");
        // pairs from the highest degree down
        let pairs: Vec<f64> = e.rchunks(2).map(|p| l2_norm(p)).collect();
        let r_max = (0..kk).map(|j| ratio(pairs[j], pairs[j + 1])).fold(0.0, f64::max);
        let top = pairs[0];
        if r_max > 1.0 {
            pairs[..=kk].iter().copied().fold(0.0, f64::max)
        } else if r_max > r_crit {
            c * r_max * top
        } else {
            c * r_crit.powf(1.0 - alpha) * r_max.powf(alpha) * top
        }
    }
}

impl Default for BerntsenEspelid {
    fn default() -> Self {
        Self::new()
    }
}

impl Estimator for BerntsenEspelid {
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
        let v = s.sample(&self.rule, a, b)?;
        let integral = self.rule.combine(&v, a, b);
        let e = self.nulls.apply(&v);
        let err = 0.5 * (b - a) * self.reference_error(&e);
        Ok(EstimatorOutcome::absolute(integral, err, s.evals()))
    }
}
