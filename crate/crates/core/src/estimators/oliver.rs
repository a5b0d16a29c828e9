use super::{check_interval, ratio, Context, Estimator, EstimatorConfig, EstimatorOutcome, Inherited};
use crate::error::Result;
use crate::rules::{clenshaw_curtis, map_node, QuadRule, Sampler};

const SIGMAS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];
/// Rule sizes `N` (the rule has `N + 1` points); all nested in the last.
const LEVELS: [usize; 4] = [2, 4, 8, 16];
/// Level whose integral is returned when no estimate passes.
const FALLBACK_LEVEL: usize = 2;

/// Clenshaw–Curtis error on `T_k` for the rule with `n + 1` points.
fn cc_alias_error(n: usize, k: usize) -> f64 {
    let exact = |j: usize| if j % 2 == 1 { 0.0 } else { 2.0 / (1.0 - (j * j) as f64) };
    let m = k % (2 * n);
    let r = m.min(2 * n - m);
    exact(k) - exact(r)
}

/// Largest decay rate `K` for which `sigma` times the first term of the
/// aliasing series still dominates the rest, assuming `|c_{i+2}| = K |c_i|`.
pub fn oliver_threshold(n: usize, sigma: f64) -> f64 {
    let first = cc_alias_error(n, n + 2).abs();
    let holds = |k: f64| {
        let mut tail = 0.0;
        let mut kp = k;
        for j in 2..4000 {
            tail += kp * cc_alias_error(n, n + 2 * j).abs();
            kp *= k;
            if kp < 1e-300 {
                break;
            }
        }
        sigma * first >= tail
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Doubly adaptive Clenshaw–Curtis cascade over 3, 5, 9 and 17 points.
pub struct Oliver {
    config: EstimatorConfig,
    rules: Vec<QuadRule>,
    /// `thresholds[level][s]` is `K_N(SIGMAS[s])`.
    thresholds: Vec<[f64; 4]>,
    grid: Vec<f64>,
}

impl Oliver {
    pub fn new() -> Self {
        let rules = LEVELS.iter().map(|&n| clenshaw_curtis(n + 1).expect("n >= 2")).collect();
        let thresholds = LEVELS.iter().map(|&n| SIGMAS.map(|s| oliver_threshold(n, s))).collect();
        let grid = clenshaw_curtis(17).expect("17 points").nodes().to_vec();
        Self { config: EstimatorConfig::new("oliver", 9, &[("sigma_max", 16.0)]), rules, thresholds, grid }
    }

    pub fn thresholds(&self) -> &[[f64; 4]] {
        &self.thresholds
    }
}

impl Default for Oliver {
    fn default() -> Self {
        Self::new()
    }
}

/// Chebyshev coefficients `c̃_0..=c̃_n` from values at `-cos(j pi / n)`.
fn chebyshev_coeffs(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    (0..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let h = if j == 0 || j == n { 0.5 } else { 1.0 };
                    h * v * (std::f64::consts::PI * ((k * j) % (2 * n)) as f64 / n as f64).cos()
                })
                .sum();
            sign * 2.0 / n as f64 * s
        })
        .collect()
}

impl Estimator for Oliver {
    fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    fn uses_tolerance(&self) -> bool {
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
        let mut grid_vals: [Option<f64>; 17] = [None; 17];
        for (level, &n) in LEVELS.iter().enumerate() {
            let stride = 16 / n;
            let mut vals = Vec::with_capacity(n + 1);
            for j in 0..=n {
                let i = j * stride;
                let v = match grid_vals[i] {
                    Some(v) => v,
                    None => {
                        let v = s.eval(map_node(self.grid[i], a, b), a, b)?;
                        grid_vals[i] = Some(v);
                        v
                    }
                };
                vals.push(v);
            }
            let integral = self.rules[level].combine(&vals, a, b);
            let c: Vec<f64> = chebyshev_coeffs(&vals).iter().map(|v| v.abs()).collect();
            let mut k = 0.0f64;
            for d in [0, 2, 4] {
                if n >= d + 2 {
                    k = k.max(ratio(c[n - d], c[n - d - 2]));
                }
            }
            let Some(si) = (0..SIGMAS.len()).find(|&i| k <= self.thresholds[level][i]) else {
                continue;
            };
            let nf = n as f64;
            let factor = (16.0 * nf / ((nf * nf - 1.0) * (nf * nf - 9.0))).abs();
            let mut m = 0.0f64;
            let mut kp = k;
            for d in [0, 2, 4] {
                if n >= d {
                    m = m.max(kp * c[n - d]);
                }
                kp *= k;
            }
            let err = SIGMAS[si] * (b - a) * factor * m;
            if err <= ctx.tol_abs {
                return Ok(EstimatorOutcome::absolute(integral, err, s.evals()));
            }
        }
        // no level converged: hand back the 9-point value for subdivision
        let stride = 16 / LEVELS[FALLBACK_LEVEL];
        let vals: Vec<f64> = (0..=LEVELS[FALLBACK_LEVEL]).map(|j| grid_vals[j * stride].unwrap_or(0.0)).collect();
        let integral = self.rules[FALLBACK_LEVEL].combine(&vals, a, b);
        Ok(EstimatorOutcome::absolute(integral, 2.0 * ctx.tol_abs, s.evals()))
    }
}
