//! Recipes that turn non-polynomial objectives into [`Polynomial`] values:
//! interpolation, piecewise selection with slack variables, truncated
//! Maclaurin series, Fourier fitting and a few penalty patterns.

use std::f64::consts::{LN_2, PI};
use std::str::FromStr;

use thiserror::Error;

use crate::poly::{Polynomial, Powers, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("interpolation needs at least one data point")]
    NoPoints,
    #[error("duplicate x value {0} in interpolation points")]
    DuplicateX(f64),
    #[error("spline needs at least one piece")]
    EmptyPieces,
    #[error("spline point {0} appears in more than one piece")]
    OverlappingPieces(f64),
    #[error("unknown series `{0}` (expected ln1p, exp, sin, cos or log_softplus)")]
    UnknownSeries(String),
    #[error("series degree must be at least 1")]
    ZeroDegree,
    #[error("log shift constants must be nonzero (got C = {c}, D = {d})")]
    ZeroShift { c: f64, d: f64 },
    #[error("{samples} samples are too few for {terms} Fourier terms (need at least {needed})")]
    TooFewSamples {
        samples: usize,
        terms: usize,
        needed: usize,
    },
    #[error("period must be positive and finite, got {0}")]
    BadPeriod(f64),
    #[error("penalty needs at least one variable")]
    EmptyVariableList,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub x: f64,
    pub y: f64,
}

impl DataPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Interpolating polynomial through `points` in the Lagrange basis.
pub fn lagrange_interpolate(points: &[DataPoint], var: &Var) -> Result<Polynomial, ApproxError> {
    if points.is_empty() {
        return Err(ApproxError::NoPoints);
    }
    for (i, a) in points.iter().enumerate() {
        if points[..i].iter().any(|b| b.x == a.x) {
            return Err(ApproxError::DuplicateX(a.x));
        }
    }
    let x = Polynomial::var(var);
    let mut result = Polynomial::zero();
    for (i, pi) in points.iter().enumerate() {
        let mut basis = Polynomial::constant(1.0);
        let mut denom = 1.0;
        for (j, pj) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = &basis * &(&x - &Polynomial::constant(pj.x));
            denom *= pi.x - pj.x;
        }
        result = &result + &basis.scale(pi.y / denom);
    }
    Ok(result)
}

/// One spline piece: a polynomial valid on a finite set of points.
#[derive(Debug, Clone)]
pub struct SplinePiece {
    pub points: Vec<f64>,
    pub polynomial: Polynomial,
}

/// Piecewise objective over a target variable. One binary slack variable is
/// generated per point of the union of all piece point sets.
#[derive(Debug, Clone)]
pub struct SplineSpec {
    pieces: Vec<SplinePiece>,
    target: Var,
    slack: Vec<(f64, Var)>,
}

impl SplineSpec {
    pub fn new(target: Var, pieces: Vec<SplinePiece>) -> Result<Self, ApproxError> {
        if pieces.is_empty() {
            return Err(ApproxError::EmptyPieces);
        }
        let mut slack: Vec<(f64, Var)> = Vec::new();
        for piece in &pieces {
            for &p in &piece.points {
                if slack.iter().any(|(q, _)| *q == p) {
                    return Err(ApproxError::OverlappingPieces(p));
                }
                let name = format!("{}_y{}", target.name(), slack.len());
                slack.push((p, Var::binary(name)));
            }
        }
        Ok(Self {
            pieces,
            target,
            slack,
        })
    }

    pub fn target(&self) -> &Var {
        &self.target
    }

    pub fn pieces(&self) -> &[SplinePiece] {
        &self.pieces
    }

    /// `(point, slack variable)` pairs in piece order.
    pub fn slack_vars(&self) -> &[(f64, Var)] {
        &self.slack
    }

    fn slack_for(&self, point: f64) -> &Var {
        &self.slack.iter().find(|(p, _)| *p == point).unwrap().1
    }
}

/// Builds `Σ_i P_i(x)·Σ_{j∈I_i} y_j + Σ_j y_j (j − x)² + (Σ_j y_j − 1)²`.
pub fn spline_objective(spec: &SplineSpec) -> Polynomial {
    let x = Polynomial::var(&spec.target);
    let mut selector = Polynomial::zero();
    for piece in &spec.pieces {
        let ys: Polynomial = piece
            .points
            .iter()
            .map(|&p| Polynomial::var(spec.slack_for(p)))
            .sum();
        selector = &selector + &(&piece.polynomial * &ys);
    }
    let matching: Polynomial = spec
        .slack
        .iter()
        .map(|(j, y)| Polynomial::var(y) * (&Polynomial::constant(*j) - &x).pow(2))
        .sum();
    let vars: Vec<Var> = spec.slack.iter().map(|(_, y)| y.clone()).collect();
    let one_of = sum_minus_one_squared(&vars);
    selector + matching + one_of
}

/// The closed catalog of functions with a built-in Maclaurin expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFunction {
    /// `ln(1 + x)`
    Ln1p,
    Exp,
    Sin,
    Cos,
    /// `ln(1 + e^(−x))`
    LogSoftplus,
}

impl FromStr for SeriesFunction {
    type Err = ApproxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ln1p" => Self::Ln1p,
            "exp" => Self::Exp,
            "sin" => Self::Sin,
            "cos" => Self::Cos,
            "log_softplus" => Self::LogSoftplus,
            other => return Err(ApproxError::UnknownSeries(other.into())),
        })
    }
}

/// Maclaurin coefficients `c_0..=c_degree` of `f`.
pub fn maclaurin_coefficients(f: SeriesFunction, degree: u32) -> Vec<f64> {
    let n = degree as usize;
    let mut c = vec![0.0; n + 1];
    match f {
        SeriesFunction::Ln1p => {
            for (k, ck) in c.iter_mut().enumerate().skip(1) {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                *ck = sign / k as f64;
            }
        }
        SeriesFunction::Exp => {
            let mut fact = 1.0;
            for (k, ck) in c.iter_mut().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                }
                *ck = 1.0 / fact;
            }
        }
        SeriesFunction::Sin | SeriesFunction::Cos => {
            let parity = usize::from(f == SeriesFunction::Sin);
            let mut fact = 1.0;
            for (k, ck) in c.iter_mut().enumerate() {
                if k > 0 {
                    fact *= k as f64;
                }
                if k % 2 == parity {
                    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    *ck = sign / fact;
                }
            }
        }
        SeriesFunction::LogSoftplus => {
            // g(x) = ln(1 + e^-x), g' = -s with s = 1/(1 + e^x) and s' = s^2 - s.
            let mut s = vec![0.0; n];
            if n > 0 {
                s[0] = 0.5;
            }
            for k in 0..n.saturating_sub(1) {
                let sq: f64 = (0..=k).map(|i| s[i] * s[k - i]).sum();
                s[k + 1] = (sq - s[k]) / (k + 1) as f64;
            }
            c[0] = LN_2;
            for k in 0..n {
                c[k + 1] = -s[k] / (k + 1) as f64;
            }
        }
    }
    c
}

fn power_series(coeffs: &[f64], scale: f64, var: &Var) -> Polynomial {
    let mut factor = 1.0;
    let mut terms = Vec::with_capacity(coeffs.len());
    for (k, c) in coeffs.iter().enumerate() {
        terms.push((c * factor, Powers::single(var.clone(), k as u32)));
        factor *= scale;
    }
    Polynomial::from_terms(terms)
}

/// Truncated Maclaurin series of a catalog function.
pub fn taylor_series(f: SeriesFunction, degree: u32, var: &Var) -> Result<Polynomial, ApproxError> {
    if degree == 0 {
        return Err(ApproxError::ZeroDegree);
    }
    Ok(power_series(&maclaurin_coefficients(f, degree), 1.0, var))
}

/// Constants of the shifted logarithm `ln(x) = ln(C) + ln((x/C − D) + D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogShiftParams {
    c: f64,
    d: f64,
}

impl LogShiftParams {
    pub fn new(c: f64, d: f64) -> Result<Self, ApproxError> {
        if c == 0.0 || d == 0.0 || !c.is_finite() || !d.is_finite() {
            return Err(ApproxError::ZeroShift { c, d });
        }
        Ok(Self { c, d })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }
}

/// Second-order expansion of `ln` around `x = C·D` with additive constants
/// removed: `(x/C − D)/D − (x/C − D)²/(2D²)`. Only argmins are preserved.
pub fn shifted_log_approx(params: LogShiftParams, var: &Var) -> Polynomial {
    let (c, d) = (params.c, params.d);
    let u = &Polynomial::var(var).scale(1.0 / c) - &Polynomial::constant(d);
    &u.scale(1.0 / d) - &u.pow(2).scale(1.0 / (2.0 * d * d))
}

/// `f(x) ≈ a0 + Σ_n a_n cos(2πnx/T) + b_n sin(2πnx/T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    pub period: f64,
    pub a0: f64,
    /// `(a_n, b_n)` for `n = 1..=N`.
    pub terms: Vec<(f64, f64)>,
}

impl FourierSeries {
    pub fn new(period: f64, a0: f64, terms: Vec<(f64, f64)>) -> Result<Self, ApproxError> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(ApproxError::BadPeriod(period));
        }
        Ok(Self { period, a0, terms })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = 2.0 * PI / self.period;
        self.a0
            + self
                .terms
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let arg = w * (k + 1) as f64 * x;
                    a * arg.cos() + b * arg.sin()
                })
                .sum::<f64>()
    }
}

/// Samples `f(start + k·T/N)` for `k = 0..N`, covering one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSamples {
    pub start: f64,
    pub period: f64,
    pub values: Vec<f64>,
}

impl PeriodicSamples {
    pub fn from_fn(f: impl Fn(f64) -> f64, start: f64, period: f64, count: usize) -> Self {
        let h = period / count as f64;
        Self {
            start,
            period,
            values: (0..count).map(|k| f(start + k as f64 * h)).collect(),
        }
    }
}

/// Fourier coefficients by the composite trapezoid rule on one period. With
/// periodic samples the rule reduces to an equally weighted sum.
pub fn fourier_fit(samples: &PeriodicSamples, n_terms: usize) -> Result<FourierSeries, ApproxError> {
    let period = samples.period;
    if !(period > 0.0 && period.is_finite()) {
        return Err(ApproxError::BadPeriod(period));
    }
    let count = samples.values.len();
    let needed = 4 * n_terms.max(1);
    if count < needed {
        return Err(ApproxError::TooFewSamples {
            samples: count,
            terms: n_terms,
            needed,
        });
    }
    let h = period / count as f64;
    let w = 2.0 * PI / period;
    let a0 = samples.values.iter().sum::<f64>() / count as f64;
    let terms = (1..=n_terms)
        .map(|n| {
            let (mut a, mut b) = (0.0, 0.0);
            for (k, fx) in samples.values.iter().enumerate() {
                let arg = w * n as f64 * (samples.start + k as f64 * h);
                a += fx * arg.cos();
                b += fx * arg.sin();
            }
            (2.0 * a / count as f64, 2.0 * b / count as f64)
        })
        .collect();
    FourierSeries::new(period, a0, terms)
}

/// Replaces each harmonic by the Maclaurin truncation of its sine/cosine.
pub fn fourier_to_polynomial(series: &FourierSeries, taylor_degree: u32, var: &Var) -> Polynomial {
    let sin = maclaurin_coefficients(SeriesFunction::Sin, taylor_degree);
    let cos = maclaurin_coefficients(SeriesFunction::Cos, taylor_degree);
    let mut out = Polynomial::constant(series.a0);
    for (k, (a, b)) in series.terms.iter().enumerate() {
        let w = 2.0 * PI * (k + 1) as f64 / series.period;
        out = out + power_series(&cos, w, var).scale(*a) + power_series(&sin, w, var).scale(*b);
    }
    out
}

/// `(x·y·…)²`: zero exactly when some variable is zero.
pub fn penalty_at_least_one_zero(vars: &[Var]) -> Result<Polynomial, ApproxError> {
    if vars.is_empty() {
        return Err(ApproxError::EmptyVariableList);
    }
    let product = Polynomial::monomial(1.0, Powers::from_pairs(vars.iter().map(|v| (v.clone(), 1))));
    Ok(product.pow(2))
}

/// `(Σ vars − 1)²`: zero exactly when one binary variable is set.
pub fn penalty_exactly_one(vars: &[Var]) -> Result<Polynomial, ApproxError> {
    if vars.is_empty() {
        return Err(ApproxError::EmptyVariableList);
    }
    Ok(sum_minus_one_squared(vars))
}

fn sum_minus_one_squared(vars: &[Var]) -> Polynomial {
    let sum: Polynomial = vars.iter().map(Polynomial::var).sum();
    (&sum - &Polynomial::constant(1.0)).pow(2)
}
