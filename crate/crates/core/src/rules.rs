//! Interpolatory quadrature rules on the reference interval `[-1, 1]`.
//!
//! Every rule stores nodes in increasing order together with its weights and
//! its degree of exactness. Mapping to `[a, b]` happens only in [`apply`] and
//! [`Sampler`], so all estimators share one affine convention:
//! `x = (a + b)/2 + (b - a)/2 * t`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{QuadError, Result};

/// A quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    name: String,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degree: usize,
}

impl QuadRule {
    fn from_half(name: impl Into<String>, half_nodes: &[f64], half_weights: &[f64], degree: usize, odd: bool) -> Self {
        // `half_*` run from the left endpoint up to (and including) the
        // centre when `odd` is set. The right half is the exact mirror.
        let mut nodes = half_nodes.to_vec();
        let mut weights = half_weights.to_vec();
        let mirror = if odd { half_nodes.len() - 1 } else { half_nodes.len() };
        for i in (0..mirror).rev() {
            nodes.push(-half_nodes[i]);
            weights.push(half_weights[i]);
        }
        Self { name: name.into(), nodes, weights, degree }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when both endpoints are nodes, so adjacent panels share samples.
    pub fn is_closed(&self) -> bool {
        self.nodes.first() == Some(&-1.0) && self.nodes.last() == Some(&1.0)
    }

    /// Weighted sum of values already sampled at this rule's nodes, scaled to
    /// an interval of width `b - a`.
    pub fn combine(&self, values: &[f64], a: f64, b: f64) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        let s: f64 = self.weights.iter().zip(values).map(|(w, v)| w * v).sum();
        0.5 * (b - a) * s
    }

    /// `index,node,weight` CSV with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,node,weight\n");
        for (i, (x, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let _ = writeln!(out, "{i},{x:e},{w:e}");
        }
        out
    }
}

/// A rule compounded over `multiplicity` equal panels.
#[derive(Debug, Clone, Copy)]
pub struct CompoundSpec<'r> {
    pub base: &'r QuadRule,
    pub multiplicity: usize,
}

impl<'r> CompoundSpec<'r> {
    pub fn new(base: &'r QuadRule, multiplicity: usize) -> Result<Self> {
        if multiplicity == 0 {
            return Err(QuadError::InvalidArgument("multiplicity must be at least 1".into()));
        }
        Ok(Self { base, multiplicity })
    }
}

/// Map a reference node onto `[a, b]`.
#[inline]
pub fn map_node(t: f64, a: f64, b: f64) -> f64 {
    let x = 0.5 * (a + b) + 0.5 * (b - a) * t;
    // keep the endpoints exact so neighbouring intervals agree on them
    if t == -1.0 {
        a
    } else if t == 1.0 {
        b
    } else {
        x
    }
}

/// Counting wrapper around an integrand.
///
/// Non-finite values trigger one retry with the node pulled `1e-12 (b - a)`
/// towards the centre of `[a, b]`; that handles nodes landing exactly on an
/// integrable singularity. A second failure is reported as
/// [`QuadError::NonFinite`]. Both attempts are counted.
pub struct Sampler<'f> {
    f: &'f dyn Fn(f64) -> f64,
    evals: usize,
}

impl<'f> Sampler<'f> {
    pub fn new(f: &'f dyn Fn(f64) -> f64) -> Self {
        Self { f, evals: 0 }
    }

    pub fn evals(&self) -> usize {
        self.evals
    }

    pub fn eval(&mut self, x: f64, a: f64, b: f64) -> Result<f64> {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_finite() {
            return Ok(v);
        }
        let shift = 1e-12 * (b - a);
        let mid = 0.5 * (a + b);
        let y = if x < mid { x + shift } else { x - shift };
        self.evals += 1;
        let w = (self.f)(y);
        if w.is_finite() {
            Ok(w)
        } else {
            Err(QuadError::NonFinite { x, value: v })
        }
    }

    /// Sample `f` at every node of `rule` mapped onto `[a, b]`.
    pub fn sample(&mut self, rule: &QuadRule, a: f64, b: f64) -> Result<Vec<f64>> {
        rule.nodes().iter().map(|&t| self.eval(map_node(t, a, b), a, b)).collect()
    }
}

/// Apply a rule (or compound rule) to `f` on `[a, b]`.
///
/// Returns the approximation and the number of integrand calls. Closed rules
/// compounded over several panels evaluate shared panel endpoints once.
pub fn apply(spec: CompoundSpec<'_>, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, usize)> {
    if !(a < b) {
        return Err(QuadError::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let mut sampler = Sampler::new(f);
    let m = spec.multiplicity;
    let rule = spec.base;
    let closed = rule.is_closed();
    let h = (b - a) / m as f64;
    let mut total = 0.0;
    let mut carried: Option<f64> = None;
    for p in 0..m {
        let lo = a + h * p as f64;
        let hi = if p + 1 == m { b } else { a + h * (p + 1) as f64 };
        let mut values = Vec::with_capacity(rule.len());
        for (i, &t) in rule.nodes().iter().enumerate() {
            let v = match (i, carried) {
                (0, Some(v)) if closed => v,
                _ => sampler.eval(map_node(t, lo, hi), lo, hi)?,
            };
            values.push(v);
        }
        carried = if closed { values.last().copied() } else { None };
        total += rule.combine(&values, lo, hi);
    }
    Ok((total, sampler.evals()))
}

/// Convenience wrapper for `apply` with multiplicity 1.
pub fn apply_rule(rule: &QuadRule, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, usize)> {
    apply(CompoundSpec { base: rule, multiplicity: 1 }, f, a, b)
}

pub fn simpson_rule() -> QuadRule {
    QuadRule {
        name: "simpson".into(),
        nodes: vec![-1.0, 0.0, 1.0],
        weights: vec![1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0],
        degree: 3,
    }
}

/// Clenshaw–Curtis rule on the extrema of `T_{n-1}`.
///
/// The recorded degree is the guaranteed `n - 1`; odd `n` is in fact exact
/// one degree higher by symmetry.
pub fn clenshaw_curtis(n_points: usize) -> Result<QuadRule> {
    if n_points < 2 {
        return Err(QuadError::InvalidArgument(format!(
            "Clenshaw-Curtis needs at least 2 points, got {n_points}"
        )));
    }
    let n = n_points - 1;
    let half = n_points.div_ceil(2);
    let mut nodes = Vec::with_capacity(half);
    let mut weights = Vec::with_capacity(half);
    for j in 0..half {
        // -cos(pi j / n) written as a sine so that the centre is exactly 0
        let x = if 2 * j == n { 0.0 } else { ((2.0 * j as f64 - n as f64) * PI / (2.0 * n as f64)).sin() };
        let cj = if j == 0 || j == n { 1.0 } else { 2.0 };
        let mut s = 1.0;
        for k in 1..=n / 2 {
            let bk = if 2 * k == n { 1.0 } else { 2.0 };
            s -= bk / (4.0 * (k * k) as f64 - 1.0) * (2.0 * PI * (j * k) as f64 / n as f64).cos();
        }
        nodes.push(x);
        weights.push(cj / n as f64 * s);
    }
    Ok(QuadRule::from_half(format!("cc{n_points}"), &nodes, &weights, n, n_points % 2 == 1))
}

/// Gauss–Legendre rule, nodes by Newton iteration on the three-term
/// recurrence.
pub fn gauss_legendre(n_points: usize) -> Result<QuadRule> {
    if n_points < 1 {
        return Err(QuadError::InvalidArgument("Gauss-Legendre needs at least 1 point".into()));
    }
    let n = n_points;
    let half = n.div_ceil(2);
    let mut nodes = Vec::with_capacity(half);
    let mut weights = Vec::with_capacity(half);
    for i in 0..half {
        // root i counted from the left end
        let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        if n % 2 == 1 && i == half - 1 {
            x = 0.0;
        }
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    Ok(QuadRule::from_half(format!("gauss{n}"), &nodes, &weights, 2 * n - 1, n % 2 == 1))
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A lower-degree rule whose nodes are a subset of a higher-degree rule's.
#[derive(Debug, Clone)]
pub struct EmbeddedPair {
    pub lower: QuadRule,
    pub upper: QuadRule,
    /// `upper.nodes()[shared[i]] == lower.nodes()[i]`
    pub shared: Vec<usize>,
}

impl EmbeddedPair {
    /// Lower-rule value from samples taken at the upper rule's nodes.
    pub fn lower_from_upper(&self, upper_values: &[f64], a: f64, b: f64) -> f64 {
        let s: f64 = self.shared.iter().zip(self.lower.weights()).map(|(&i, w)| w * upper_values[i]).sum();
        0.5 * (b - a) * s
    }
}

const K21_NODES: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

const K21_WEIGHTS: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const G10_WEIGHTS: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// The 10-point Gauss rule and its 21-point Kronrod extension.
pub fn gauss_kronrod_21() -> EmbeddedPair {
    let kn: Vec<f64> = K21_NODES.iter().map(|x| -x).collect();
    let upper = QuadRule::from_half("k21", &kn, &K21_WEIGHTS, 31, true);
    let gn: Vec<f64> = (0..5).map(|i| kn[2 * i + 1]).collect();
    let lower = QuadRule::from_half("g10", &gn, &G10_WEIGHTS, 19, false);
    let shared = (0..10).map(|i| 2 * i + 1).collect();
    EmbeddedPair { lower, upper, shared }
}

/// The 4-point Gauss–Lobatto rule and its 7-point Kronrod extension.
pub fn lobatto_kronrod_7() -> EmbeddedPair {
    let r5 = 1.0 / 5f64.sqrt();
    let r23 = (2.0f64 / 3.0).sqrt();
    let lower = QuadRule::from_half("gl4", &[-1.0, -r5], &[1.0 / 6.0, 5.0 / 6.0], 5, false);
    let upper = QuadRule::from_half(
        "k7",
        &[-1.0, -r23, -r5, 0.0],
        &[11.0 / 210.0, 72.0 / 245.0, 125.0 / 294.0, 16.0 / 35.0],
        9,
        true,
    );
    EmbeddedPair { lower, upper, shared: vec![0, 2, 4, 6] }
}

/// Look up a rule by the names accepted on the command line: `simpson`,
/// `g10`, `k21`, `gl4`, `k7`, `ccN`, `gaussN`.
pub fn by_name(name: &str) -> Result<QuadRule> {
    let bad = || QuadError::InvalidArgument(format!("unknown rule `{name}`"));
    match name {
        "simpson" => Ok(simpson_rule()),
        "g10" => Ok(gauss_kronrod_21().lower),
        "k21" => Ok(gauss_kronrod_21().upper),
        "gl4" => Ok(lobatto_kronrod_7().lower),
        "k7" => Ok(lobatto_kronrod_7().upper),
        _ => {
            if let Some(n) = name.strip_prefix("cc") {
                clenshaw_curtis(n.parse().map_err(|_| bad())?)
            } else if let Some(n) = name.strip_prefix("gauss") {
                gauss_legendre(n.parse().map_err(|_| bad())?)
            } else {
                Err(bad())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_examples() {
        let s = simpson_rule();
        assert_relative_eq!(apply_rule(&s, &|_| 1.0, 0.0, 2.0).unwrap().0, 2.0, max_relative = 1e-15);
        assert_eq!(apply_rule(&s, &|x| x * x * x, -1.0, 1.0).unwrap().0, 0.0);
        let s1 = apply_rule(&s, &|x| x.powi(4), 0.0, 1.0).unwrap().0;
        let (s2, n) = apply(CompoundSpec::new(&s, 2).unwrap(), &|x| x.powi(4), 0.0, 1.0).unwrap();
        assert_eq!(n, 5);
        assert_relative_eq!(s1, 0.2083333333333333, max_relative = 1e-15);
        assert_relative_eq!(s2, 0.20052083333333333, max_relative = 1e-15);
        assert_relative_eq!((s1 - s2) / (s2 - 0.2), 15.0, max_relative = 1e-10);
    }

    #[test]
    fn clenshaw_curtis_examples() {
        assert_eq!(clenshaw_curtis(3).unwrap().nodes(), &[-1.0, 0.0, 1.0]);
        assert!(clenshaw_curtis(1).is_err());
        let cc5 = clenshaw_curtis(5).unwrap();
        assert_relative_eq!(apply_rule(&cc5, &|x| x.powi(4), -1.0, 1.0).unwrap().0, 0.4, max_relative = 1e-14);
        let cc21 = clenshaw_curtis(21).unwrap();
        let t20 = |x: f64| (20.0 * x.acos()).cos() + 1.0;
        let v = apply_rule(&cc21, &t20, -1.0, 1.0).unwrap().0;
        assert_relative_eq!(v, 2.0 + 2.0 / (1.0 - 400.0), max_relative = 1e-13);
    }

    #[test]
    fn gauss_examples() {
        let g1 = gauss_legendre(1).unwrap();
        assert_eq!(g1.nodes(), &[0.0]);
        assert_eq!(g1.weights(), &[2.0]);
        let g10 = gauss_legendre(10).unwrap();
        assert_relative_eq!(g10.nodes()[9], 0.97390652851717, epsilon = 1e-13);
        let v = apply_rule(&g10, &|x| x.powi(18), -1.0, 1.0).unwrap().0;
        assert_relative_eq!(v, 2.0 / 19.0, max_relative = 1e-13);
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn generated_gauss_matches_embedded_g10() {
        let g = gauss_legendre(10).unwrap();
        let e = gauss_kronrod_21().lower;
        for i in 0..10 {
            assert_relative_eq!(g.nodes()[i], e.nodes()[i], epsilon = 1e-15);
            assert_relative_eq!(g.weights()[i], e.weights()[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn kronrod_pairs() {
        let gk = gauss_kronrod_21();
        assert_eq!(gk.upper.len(), 21);
        assert_eq!(gk.shared.len(), 10);
        for (i, &j) in gk.shared.iter().enumerate() {
            assert!((gk.lower.nodes()[i] - gk.upper.nodes()[j]).abs() < 1e-14);
        }
        let v = apply_rule(&gk.upper, &|x| x.powi(30), -1.0, 1.0).unwrap().0;
        assert_relative_eq!(v, 2.0 / 31.0, max_relative = 1e-12);

        let gl = lobatto_kronrod_7();
        assert_eq!(apply_rule(&gl.lower, &|x| x.powi(5), -1.0, 1.0).unwrap().0.abs() < 1e-16, true);
        let v6 = apply_rule(&gl.lower, &|x| x.powi(6), -1.0, 1.0).unwrap().0;
        assert!((v6 - 2.0 / 7.0).abs() > 1e-3);
        let v8 = apply_rule(&gl.upper, &|x| x.powi(8), -1.0, 1.0).unwrap().0;
        assert_relative_eq!(v8, 2.0 / 9.0, max_relative = 1e-13);
    }

    #[test]
    fn lyness_on_k21() {
        let f = |x: f64| 0.1 / (0.01 + (x - 1.5) * (x - 1.5));
        let v = apply_rule(&gauss_kronrod_21().upper, &f, 1.0, 2.0).unwrap().0;
        assert!((v - 2.0 * 5f64.atan()).abs() < 1e-3 * v);
    }

    #[test]
    fn apply_constant_and_discontinuity() {
        for r in [simpson_rule(), clenshaw_curtis(21).unwrap(), gauss_kronrod_21().upper] {
            assert_relative_eq!(apply_rule(&r, &|_| 1.0, 3.0, 7.0).unwrap().0, 4.0, max_relative = 1e-14);
        }
        let d0 = |x: f64| if x < 0.0 { 0.0 } else { 1.0 };
        let v = apply_rule(&clenshaw_curtis(21).unwrap(), &d0, -1.0, 1.0).unwrap().0;
        assert!((v - 1.0).abs() < 0.2 && v != 1.0);
    }

    #[test]
    fn compound_counts_shared_endpoints_once() {
        let cc = clenshaw_curtis(5).unwrap();
        let (_, n) = apply(CompoundSpec::new(&cc, 3).unwrap(), &|x| x, 0.0, 1.0).unwrap();
        assert_eq!(n, 13);
        let g = gauss_legendre(4).unwrap();
        let (_, n) = apply(CompoundSpec::new(&g, 3).unwrap(), &|x| x, 0.0, 1.0).unwrap();
        assert_eq!(n, 12);
        assert!(CompoundSpec::new(&g, 0).is_err());
    }

    #[test]
    fn non_finite_is_an_error_and_nudge_recovers() {
        let r = simpson_rule();
        assert!(matches!(apply_rule(&r, &|_| f64::NAN, 0.0, 1.0), Err(QuadError::NonFinite { .. })));
        let s = |x: f64| 1.0 / x.abs().sqrt();
        let (v, n) = apply_rule(&r, &s, 0.0, 1.0).unwrap();
        assert!(v.is_finite());
        assert_eq!(n, 4);
    }

    #[test]
    fn csv_dump() {
        let csv = simpson_rule().to_csv();
        assert!(csv.starts_with("index,node,weight\n0,-1e0,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
