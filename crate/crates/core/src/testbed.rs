//! Randomised test integrands with closed-form integrals.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{QuadError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Chebyshev `T_n + 1` on `[-alpha, beta]`.
    Pn,
    Pn1,
    Pn2,
    /// Step at `alpha`.
    D0,
    /// Kink at `alpha`.
    D1,
    /// Jump in the second derivative at `alpha`.
    D2,
    /// `|x - alpha|^{-1/2}`.
    S,
    Lyness,
    Waldvogel,
}

impl Family {
    /// The families of the FP/FN tables, in row order.
    pub const TABLE: [Family; 7] =
        [Family::Pn, Family::Pn1, Family::Pn2, Family::D0, Family::D1, Family::D2, Family::S];

    pub fn name(self) -> &'static str {
        match self {
            Family::Pn => "p_n",
            Family::Pn1 => "p_n1",
            Family::Pn2 => "p_n2",
            Family::D0 => "d0",
            Family::D1 => "d1",
            Family::D2 => "d2",
            Family::S => "s",
            Family::Lyness => "lyness",
            Family::Waldvogel => "waldvogel",
        }
    }

    /// Stable index used to derive random streams.
    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "p_n" | "pn" => Family::Pn,
            "p_n1" | "pn1" => Family::Pn1,
            "p_n2" | "pn2" => Family::Pn2,
            "d0" => Family::D0,
            "d1" => Family::D1,
            "d2" => Family::D2,
            "s" => Family::S,
            "lyness" => Family::Lyness,
            "waldvogel" => Family::Waldvogel,
            _ => return Err(QuadError::UnknownFamily(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    Chebyshev { degree: usize, alpha: f64, beta: f64 },
    Jump { alpha: f64 },
    Singular { alpha: f64 },
    Lyness { lambda: f64 },
    Waldvogel { upper: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestInstance {
    pub family: Family,
    pub params: Params,
    pub a: f64,
    pub b: f64,
    pub reference: f64,
}

/// Uniform draw from `(0, 1]`.
fn unit_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Draw an instance of `family`; `test_degree` is the `n` of the p-families.
pub fn make_instance<R: Rng + ?Sized>(family: Family, test_degree: usize, rng: &mut R) -> TestInstance {
    match family {
        Family::Pn | Family::Pn1 | Family::Pn2 => {
            let alpha = unit_open_closed(rng);
            let beta = unit_open_closed(rng);
            let extra = match family {
                Family::Pn => 0,
                Family::Pn1 => 1,
                _ => 2,
            };
            TestInstance::chebyshev(family, test_degree + extra, alpha, beta)
        }
        Family::D0 | Family::D1 | Family::D2 => {
            let alpha = -1.0 + 2.0 * rng.random::<f64>();
            TestInstance::jump(family, alpha).expect("d family")
        }
        Family::S => loop {
            let alpha = -1.0 + 2.0 * rng.random::<f64>();
            if alpha > -1.0 {
                break TestInstance::singular(alpha);
            }
        },
        Family::Lyness => TestInstance::lyness(1.0 + rng.random::<f64>()),
        Family::Waldvogel => TestInstance::waldvogel(2.5 + rng.random::<f64>()),
    }
}

/// `T_k(x)` by the three-term recurrence.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if k == 0 {
        return 1.0;
    }
    for _ in 1..k {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

fn chebyshev_antiderivative(k: usize, x: f64) -> f64 {
    match k {
        0 => x,
        1 => 0.5 * x * x,
        _ => {
            let kf = k as f64;
            0.5 * (chebyshev_t(k + 1, x) / (kf + 1.0) - chebyshev_t(k - 1, x) / (kf - 1.0))
        }
    }
}

/// `floor(e^t)` with exact jumps at `t = ln k`: the value is the largest
/// `k` with `ln k <= t` in floating point.
pub fn floor_exp(t: f64) -> f64 {
    let mut k = t.exp().floor().max(1.0);
    while k > 1.0 && (k).ln() > t {
        k -= 1.0;
    }
    while (k + 1.0).ln() <= t {
        k += 1.0;
    }
    k
}

fn waldvogel_integral(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut k = 1.0f64;
    loop {
        let lo = k.ln();
        if lo >= x {
            break;
        }
        let hi = (k + 1.0).ln().min(x);
        sum += k * (hi - lo);
        k += 1.0;
    }
    sum
}

impl TestInstance {
    pub fn chebyshev(family: Family, degree: usize, alpha: f64, beta: f64) -> Self {
        let (a, b) = (-alpha, beta);
        let reference = chebyshev_antiderivative(degree, b) - chebyshev_antiderivative(degree, a) + (b - a);
        Self { family, params: Params::Chebyshev { degree, alpha, beta }, a, b, reference }
    }

    pub fn jump(family: Family, alpha: f64) -> Result<Self> {
        let reference = match family {
            Family::D0 => 1.0 - alpha,
            Family::D1 => 0.5 * (1.0 - alpha).powi(2),
            Family::D2 => (1.0 - alpha).powi(3) / 3.0,
            _ => return Err(QuadError::InvalidArgument(format!("{family} is not a d family"))),
        };
        Ok(Self { family, params: Params::Jump { alpha }, a: -1.0, b: 1.0, reference })
    }

    pub fn singular(alpha: f64) -> Self {
        let reference = 2.0 * (1.0 - alpha).sqrt() + 2.0 * (1.0 + alpha).sqrt();
        Self { family: Family::S, params: Params::Singular { alpha }, a: -1.0, b: 1.0, reference }
    }

    pub fn lyness(lambda: f64) -> Self {
        let reference = (10.0 * (2.0 - lambda)).atan() - (10.0 * (1.0 - lambda)).atan();
        Self { family: Family::Lyness, params: Params::Lyness { lambda }, a: 1.0, b: 2.0, reference }
    }

    pub fn waldvogel(upper: f64) -> Self {
        Self {
            family: Family::Waldvogel,
            params: Params::Waldvogel { upper },
            a: 0.0,
            b: upper,
            reference: waldvogel_integral(upper),
        }
    }

    /// Build from `key=value` parameters (`degree`, `alpha`, `beta`,
    /// `lambda`, `x`), as used on the command line.
    pub fn from_params(family: Family, params: &[(String, f64)]) -> Result<Self> {
        let get = |k: &str| params.iter().rev().find(|(n, _)| n == k).map(|(_, v)| *v);
        let need = |k: &str| get(k).ok_or_else(|| QuadError::InvalidArgument(format!("{family} needs `{k}`")));
        let inst = match family {
            Family::Pn | Family::Pn1 | Family::Pn2 => {
                let d = need("degree")?;
                if d < 0.0 || d.fract() != 0.0 {
                    return Err(QuadError::InvalidArgument(format!("bad degree {d}")));
                }
                Self::chebyshev(family, d as usize, need("alpha")?, need("beta")?)
            }
            Family::D0 | Family::D1 | Family::D2 => Self::jump(family, need("alpha")?)?,
            Family::S => Self::singular(need("alpha")?),
            Family::Lyness => Self::lyness(need("lambda")?),
            Family::Waldvogel => Self::waldvogel(need("x")?),
        };
        if !(inst.a < inst.b) || !inst.reference.is_finite() {
            return Err(QuadError::InvalidArgument("parameters give an empty or invalid domain".into()));
        }
        Ok(inst)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.params {
            Params::Chebyshev { degree, .. } => chebyshev_t(degree, x) + 1.0,
            Params::Jump { alpha } => {
                if x < alpha {
                    0.0
                } else {
                    match self.family {
                        Family::D0 => 1.0,
                        Family::D1 => x - alpha,
                        _ => (x - alpha) * (x - alpha),
                    }
                }
            }
            Params::Singular { alpha } => 1.0 / (x - alpha).abs().sqrt(),
            Params::Lyness { lambda } => 0.1 / (0.01 + (x - lambda) * (x - lambda)),
            Params::Waldvogel { .. } => floor_exp(x),
        }
    }

    /// Points where the integrand is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.params {
            Params::Jump { alpha } | Params::Singular { alpha } => vec![alpha],
            Params::Waldvogel { upper } => {
                (2..).map(|k| (k as f64).ln()).take_while(|&t| t < upper).collect()
            }
            _ => vec![],
        }
    }
}

impl fmt::Display for TestInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family={}", self.family)?;
        match self.params {
            Params::Chebyshev { degree, alpha, beta } => write!(f, " degree={degree} alpha={alpha:e} beta={beta:e}")?,
            Params::Jump { alpha } | Params::Singular { alpha } => write!(f, " alpha={alpha:e}")?,
            Params::Lyness { lambda } => write!(f, " lambda={lambda:e}")?,
            Params::Waldvogel { upper } => write!(f, " x={upper:e}")?,
        }
        write!(f, " a={:e} b={:e} reference={:e}", self.a, self.b, self.reference)
    }
}

impl FromStr for TestInstance {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut params = Vec::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| QuadError::Parse(tok.to_string()))?;
            if k == "family" {
                family = Some(v.parse::<Family>()?);
            } else {
                let v: f64 = v.parse().map_err(|_| QuadError::Parse(tok.to_string()))?;
                params.push((k.to_string(), v));
            }
        }
        let family = family.ok_or_else(|| QuadError::Parse("missing family".into()))?;
        let inst = Self::from_params(family, &params)?;
        // the stored reference must agree with the recomputed one
        if let Some((_, r)) = params.iter().find(|(k, _)| k == "reference") {
            if *r != inst.reference {
                return Err(QuadError::Parse(format!("reference {r} does not match {}", inst.reference)));
            }
        }
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn examples() {
        assert_eq!(TestInstance::jump(Family::D1, 0.0).unwrap().reference, 0.5);
        assert_eq!(TestInstance::singular(0.0).reference, 4.0);
        assert_relative_eq!(TestInstance::waldvogel(1.0).reference, 2.0 - 2f64.ln(), max_relative = 1e-15);
        let d0 = TestInstance::jump(Family::D0, 0.25).unwrap();
        assert_eq!(d0.eval(0.2), 0.0);
        assert_eq!(d0.eval(0.25), 1.0);
        let p = TestInstance::chebyshev(Family::Pn, 4, 1.0, 1.0);
        assert_relative_eq!(p.eval(0.5), 0.5, max_relative = 1e-15);
        assert_eq!(floor_exp(2f64.ln()), 2.0);
        assert_eq!(floor_exp(2f64.ln() - 1e-16), 1.0);
        assert_relative_eq!(TestInstance::lyness(1.5).reference, 2.0 * 5f64.atan(), max_relative = 1e-15);
        let d2 = TestInstance::jump(Family::D2, 0.3).unwrap();
        assert_relative_eq!(d2.reference, 0.7f64.powi(3) / 3.0);
        let c0 = TestInstance::chebyshev(Family::Pn, 0, 0.3, 0.6);
        assert_relative_eq!(c0.reference, 2.0 * 0.9, max_relative = 1e-15);
    }

    #[test]
    fn record_round_trip() {
        let i = TestInstance::chebyshev(Family::Pn2, 7, 0.123456789, 0.9);
        let back: TestInstance = i.to_string().parse().unwrap();
        assert_eq!(i, back);
        let w = TestInstance::waldvogel(3.14);
        assert_eq!(w, w.to_string().parse().unwrap());
        assert!("family=d0".parse::<TestInstance>().is_err());
        assert!("family=zz alpha=0".parse::<TestInstance>().is_err());
    }

    #[test]
    fn waldvogel_jumps_at_logs() {
        for k in 2..40 {
            let t = (k as f64).ln();
            assert_eq!(floor_exp(t), k as f64);
            assert_eq!(floor_exp(t.next_down()), (k - 1) as f64);
        }
    }
}
