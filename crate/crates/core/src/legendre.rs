//! Orthonormal Legendre polynomials `p_k = sqrt((2k+1)/2) P_k` on `[-1, 1]`
//! and the coefficient-space tools built on them.
//!
//! Matrices are dense row-major `Vec<f64>`; sizes here never exceed ~32.

use crate::error::{QuadError, Result};
use crate::rules::gauss_legendre;

/// Value of `p_k(x)`.
pub fn legendre_eval(k: usize, x: f64) -> f64 {
    let mut out = vec![0.0; k + 1];
    legendre_all(x, &mut out);
    out[k]
}

/// Fill `out[k] = p_k(x)` for `k < out.len()`.
pub fn legendre_all(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    // classical recurrence, normalised at the end
    let (mut p0, mut p1) = (1.0, x);
    out[0] = p0;
    if n > 1 {
        out[1] = p1;
    }
    for k in 2..n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        out[k] = p2;
        p0 = p1;
        p1 = p2;
    }
    for (k, v) in out.iter_mut().enumerate() {
        *v *= ((2 * k + 1) as f64 / 2.0).sqrt();
    }
}

/// Coefficients of a polynomial in the orthonormal Legendre basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffVector(pub Vec<f64>);

impl CoeffVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Evaluate `sum c_k p_k(x)` with Clenshaw's algorithm.
    pub fn eval(&self, x: f64) -> f64 {
        let c = &self.0;
        let n = c.len();
        if n == 0 {
            return 0.0;
        }
        // p_{k+1} = (A_k x) p_k - B_k p_{k-1} with the orthonormal constants
        let alpha = |k: usize| {
            let k = k as f64;
            ((2.0 * k + 1.0) * (2.0 * k + 3.0)).sqrt() / (k + 1.0)
        };
        let beta = |k: usize| {
            let k = k as f64;
            k / (k + 1.0) * ((2.0 * k + 3.0) / (2.0 * k - 1.0)).sqrt()
        };
        let (mut b1, mut b2) = (0.0, 0.0);
        for k in (1..n).rev() {
            let b0 = c[k] + alpha(k) * x * b1 - beta(k + 1) * b2;
            b2 = b1;
            b1 = b0;
        }
        let p0 = 1.0 / 2f64.sqrt();
        // c_0 p_0 + b1 p_1 - beta(1) b2 p_0
        (c[0] - beta(1) * b2) * p0 + b1 * p0 * alpha(0) * x
    }

    /// Copy padded with zeros (or truncated) to length `n`.
    pub fn resized(&self, n: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(n, 0.0);
        Self(v)
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.0)
    }
}

/// Euclidean norm, which by Parseval is the L2 norm of the polynomial.
pub fn l2_norm(c: &[f64]) -> f64 {
    // scaled to avoid overflow on huge coefficients
    let m = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * c.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

/// `‖x - y‖` with the shorter vector zero-padded.
pub fn l2_distance(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().max(y.len());
    let d: Vec<f64> = (0..n).map(|i| x.get(i).unwrap_or(&0.0) - y.get(i).unwrap_or(&0.0)).collect();
    l2_norm(&d)
}

/// `∫_a^b` of the polynomial with coefficients `c` on the reference interval.
pub fn integral_from_coeffs(c: &[f64], a: f64, b: f64) -> f64 {
    // ω_0 = ∫ p_0 over [-1,1]; the other moments vanish
    let omega0 = 2.0 * legendre_eval(0, 0.0);
    0.5 * (b - a) * omega0 * c.first().copied().unwrap_or(0.0)
}

/// LU factorisation with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let (p, piv) = (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if piv <= scale * 1e-15 * n as f64 || piv == 0.0 {
                return Err(QuadError::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = a[k * n + k];
            for i in k + 1..n {
                let l = a[i * n + k] / d;
                a[i * n + k] = l;
                for j in k + 1..n {
                    a[i * n + j] -= l * a[k * n + j];
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

/// The matrix `P[i][j] = p_j(x_i)` for a node set, factorised once.
#[derive(Debug, Clone)]
pub struct VandermondeSystem {
    nodes: Vec<f64>,
    p_matrix: Vec<f64>,
    lu: Lu,
}

impl VandermondeSystem {
    pub fn new(nodes: &[f64]) -> Result<Self> {
        let n = nodes.len();
        for i in 0..n {
            for j in i + 1..n {
                if nodes[i] == nodes[j] {
                    return Err(QuadError::DuplicateNodes);
                }
            }
        }
        let mut p_matrix = vec![0.0; n * n];
        for (i, &x) in nodes.iter().enumerate() {
            legendre_all(x, &mut p_matrix[i * n..(i + 1) * n]);
        }
        let lu = Lu::factor(p_matrix.clone(), n)?;
        Ok(Self { nodes: nodes.to_vec(), p_matrix, lu })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn p_matrix(&self) -> &[f64] {
        &self.p_matrix
    }

    pub fn solve(&self, values: &[f64]) -> Result<CoeffVector> {
        if values.len() != self.nodes.len() {
            return Err(QuadError::InvalidArgument("values and nodes differ in length".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(QuadError::NonFinite { x: f64::NAN, value: *v });
        }
        Ok(CoeffVector(self.lu.solve(values)))
    }

    /// Row-major `P^{-1}`, so coefficients are a plain matrix-vector product.
    pub fn inverse(&self) -> Vec<f64> {
        let n = self.nodes.len();
        let mut inv = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.lu.solve(&e);
            for i in 0..n {
                inv[i * n + j] = col[i];
            }
        }
        inv
    }
}

/// Legendre coefficients of the interpolant of `values` at `nodes`.
pub fn solve_coeffs(nodes: &[f64], values: &[f64]) -> Result<CoeffVector> {
    VandermondeSystem::new(nodes)?.solve(values)
}

/// Row-major square matrix-vector product.
pub fn mat_vec(m: &[f64], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    debug_assert_eq!(m.len(), n * n);
    m.chunks_exact(n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Maps parent coefficients to the coefficients of the left or right half,
/// each half stretched back onto `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct TransformPair {
    n: usize,
    t_left: Vec<f64>,
    t_right: Vec<f64>,
}

impl TransformPair {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn t_left(&self) -> &[f64] {
        &self.t_left
    }

    pub fn t_right(&self) -> &[f64] {
        &self.t_right
    }

    pub fn apply_left(&self, c: &[f64]) -> Vec<f64> {
        mat_vec(&self.t_left, c)
    }

    pub fn apply_right(&self, c: &[f64]) -> Vec<f64> {
        mat_vec(&self.t_right, c)
    }

    pub fn apply(&self, side: Side, c: &[f64]) -> Vec<f64> {
        match side {
            Side::Left => self.apply_left(c),
            Side::Right => self.apply_right(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// `T[i][j] = ∫ p_i(x) p_j((x ∓ 1)/2) dx`, by a Gauss rule exact for the
/// degree `2n - 2` integrands.
pub fn transform_pair(n: usize) -> TransformPair {
    let g = gauss_legendre(n + 1).expect("n + 1 >= 1");
    let mut t_left = vec![0.0; n * n];
    let mut t_right = vec![0.0; n * n];
    let mut pi = vec![0.0; n];
    let mut pl = vec![0.0; n];
    let mut pr = vec![0.0; n];
    for (&x, &w) in g.nodes().iter().zip(g.weights()) {
        legendre_all(x, &mut pi);
        legendre_all(0.5 * (x - 1.0), &mut pl);
        legendre_all(0.5 * (x + 1.0), &mut pr);
        for i in 0..n {
            for j in 0..n {
                t_left[i * n + j] += w * pi[i] * pl[j];
                t_right[i * n + j] += w * pi[i] * pr[j];
            }
        }
    }
    TransformPair { n, t_left, t_right }
}

/// Legendre coefficients (length `n + 1`) of `Π (x - x_i)`.
pub fn newton_coeffs(nodes: &[f64]) -> CoeffVector {
    let n = nodes.len();
    // x p_k = a_{k+1} p_{k+1} + a_k p_{k-1}
    let a = |k: usize| {
        let k = k as f64;
        k / ((2.0 * k - 1.0) * (2.0 * k + 1.0)).sqrt()
    };
    let mut b = vec![0.0; n + 1];
    b[0] = 1.0 / legendre_eval(0, 0.0);
    for (m, &xi) in nodes.iter().enumerate() {
        // b currently has degree m
        let mut next = vec![0.0; n + 1];
        for k in 0..=m {
            next[k + 1] += a(k + 1) * b[k];
            if k > 0 {
                next[k - 1] += a(k) * b[k];
            }
            next[k] -= xi * b[k];
        }
        b = next;
    }
    CoeffVector(b)
}
