//! Smooth scalar functions `g : R → C` with evaluable derivatives.
//!
//! Function spec documents (JSON):
//!
//! | kind                     | fields                                          | g(t)             |
//! |--------------------------|-------------------------------------------------|------------------|
//! | `exp`                    |                                                 | `e^t`            |
//! | `sin`, `cos`             |                                                 | `sin t`, `cos t` |
//! | `gaussian`               |                                                 | `e^{-t²/2}`      |
//! | `monomial`               | `k` (top level or `params.k`)                   | `t^k`            |
//! | `poly` / `polynomial`    | `coeffs: [c0, c1, …]`                           | `Σ c_j t^j`      |
//! | `identity`               |                                                 | `t`              |
//! | `constant`               | `params.value` or `coeffs: [c]`                 | `c`              |
//! | `tabulated`              | `params.t: [...]`, `params.values: [...]`       | natural cubic spline, derivative order ≤ 1 |
//! | `exp_scaled`             | `params.re`, `params.im`                        | `e^{(re + i im) t}` |

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// `max_order` of functions with derivatives of every order.
pub const UNBOUNDED_ORDER: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFunction {
    Exp,
    Sin,
    Cos,
    Gaussian,
    Monomial(u32),
    Polynomial(Vec<f64>),
    Tabulated(CubicSpline),
    /// `t ↦ e^{z t}` for complex `z`.
    ExpScaled(Complex64),
}

impl ScalarFunction {
    pub fn identity() -> Self {
        ScalarFunction::Polynomial(vec![0.0, 1.0])
    }

    pub fn constant(c: f64) -> Self {
        ScalarFunction::Polynomial(vec![c])
    }

    /// `t ↦ e^{ist}`.
    pub fn imaginary_exp(s: f64) -> Self {
        ScalarFunction::ExpScaled(Complex64::new(0.0, s))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ScalarFunction::Exp => "exp",
            ScalarFunction::Sin => "sin",
            ScalarFunction::Cos => "cos",
            ScalarFunction::Gaussian => "gaussian",
            ScalarFunction::Monomial(_) => "monomial",
            ScalarFunction::Polynomial(_) => "poly",
            ScalarFunction::Tabulated(_) => "tabulated",
            ScalarFunction::ExpScaled(_) => "exp_scaled",
        }
    }

    pub fn max_order(&self) -> usize {
        match self {
            ScalarFunction::Tabulated(_) => 1,
            _ => UNBOUNDED_ORDER,
        }
    }

    /// True when `g` is real-valued on the real line.
    pub fn is_real(&self) -> bool {
        match self {
            ScalarFunction::ExpScaled(z) => z.im == 0.0,
            _ => true,
        }
    }

    pub fn value(&self, t: f64) -> Complex64 {
        self.eval(t, 0).expect("order 0 is always supported")
    }

    /// The `order`-th derivative at `t`.
    pub fn eval(&self, t: f64, order: usize) -> Result<Complex64> {
        if order > self.max_order() {
            return Err(Error::InsufficientOrder {
                kind: self.kind_name().to_string(),
                max_order: self.max_order(),
                requested: order,
            });
        }
        let real = |v: f64| Ok(Complex64::new(v, 0.0));
        match self {
            ScalarFunction::Exp => real(t.exp()),
            ScalarFunction::Sin => real(shifted_sin(t, order)),
            ScalarFunction::Cos => real(shifted_sin(t, order + 1)),
            ScalarFunction::Gaussian => real(gaussian_derivative(t, order)),
            ScalarFunction::Monomial(k) => real(monomial_derivative(*k as usize, t, order)),
            ScalarFunction::Polynomial(c) => real(polynomial_derivative(c, t, order)),
            ScalarFunction::Tabulated(spline) => real(spline.eval(t, order)),
            ScalarFunction::ExpScaled(z) => Ok(z.powu(order as u32) * (z * t).exp()),
        }
    }

    /// Parses a function spec: inline JSON, or a bare kind name such as `exp`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            let value: Value = serde_json::from_str(trimmed)
                .map_err(|e| Error::parse("function", e.to_string()))?;
            Self::from_json_value(&value)
        } else {
            Self::from_json_value(&json!({ "kind": trimmed }))
        }
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::parse("function", "expected a JSON object"))?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("kind", "missing or not a string"))?;
        let params = obj.get("params").and_then(Value::as_object);
        let field = |name: &str| obj.get(name).or_else(|| params.and_then(|p| p.get(name)));
        let number = |name: &str| -> Result<f64> {
            field(name)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::parse(name, "missing or not a number"))
        };
        let numbers = |name: &str| -> Result<Vec<f64>> {
            let arr = field(name)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse(name, "missing or not an array"))?;
            arr.iter()
                .map(|v| v.as_f64().ok_or_else(|| Error::parse(name, "entries must be numbers")))
                .collect()
        };

        let f = match kind {
            "exp" => ScalarFunction::Exp,
            "sin" => ScalarFunction::Sin,
            "cos" => ScalarFunction::Cos,
            "gaussian" => ScalarFunction::Gaussian,
            "identity" => ScalarFunction::identity(),
            "monomial" => {
                let k = field("k")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::parse("k", "missing or not a nonnegative integer"))?;
                let k = u32::try_from(k).map_err(|_| Error::parse("k", "too large"))?;
                ScalarFunction::Monomial(k)
            }
            "poly" | "polynomial" => {
                let coeffs = numbers("coeffs")?;
                if coeffs.is_empty() {
                    return Err(Error::parse("coeffs", "must not be empty"));
                }
                ScalarFunction::Polynomial(coeffs)
            }
            "constant" => {
                let c = match field("value") {
                    Some(_) => number("value")?,
                    None => *numbers("coeffs")?
                        .first()
                        .ok_or_else(|| Error::parse("coeffs", "must not be empty"))?,
                };
                ScalarFunction::constant(c)
            }
            "tabulated" => ScalarFunction::Tabulated(CubicSpline::new(numbers("t")?, numbers("values")?)?),
            "exp_scaled" => ScalarFunction::ExpScaled(Complex64::new(
                field("re").map(|_| number("re")).transpose()?.unwrap_or(0.0),
                field("im").map(|_| number("im")).transpose()?.unwrap_or(0.0),
            )),
            other => {
                return Err(Error::parse(
                    "kind",
                    format!("unknown function kind `{other}`"),
                ))
            }
        };
        Ok(f)
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            ScalarFunction::Monomial(k) => json!({ "kind": "monomial", "k": k }),
            ScalarFunction::Polynomial(c) => json!({ "kind": "poly", "coeffs": c }),
            ScalarFunction::Tabulated(s) => {
                json!({ "kind": "tabulated", "params": { "t": s.knots, "values": s.values } })
            }
            ScalarFunction::ExpScaled(z) => {
                json!({ "kind": "exp_scaled", "params": { "re": z.re, "im": z.im } })
            }
            other => json!({ "kind": other.kind_name() }),
        }
    }
}

/// `sin(t + order·π/2)` with the phase reduced modulo 4.
fn shifted_sin(t: f64, order: usize) -> f64 {
    match order % 4 {
        0 => t.sin(),
        1 => t.cos(),
        2 => -t.sin(),
        _ => -t.cos(),
    }
}

/// `d^m/dt^m e^{-t²/2} = (-1)^m He_m(t) e^{-t²/2}`.
fn gaussian_derivative(t: f64, order: usize) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0); // He_{-1}, He_0
    for m in 0..order {
        let next = t * cur - m as f64 * prev;
        prev = cur;
        cur = next;
    }
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * cur * (-0.5 * t * t).exp()
}

fn falling_factorial(k: usize, m: usize) -> f64 {
    (0..m).map(|i| (k - i) as f64).product()
}

fn monomial_derivative(k: usize, t: f64, order: usize) -> f64 {
    if order > k {
        return 0.0;
    }
    falling_factorial(k, order) * t.powi((k - order) as i32)
}

fn polynomial_derivative(coeffs: &[f64], t: f64, order: usize) -> f64 {
    if order >= coeffs.len() {
        return 0.0;
    }
    coeffs
        .iter()
        .enumerate()
        .skip(order)
        .rev()
        .fold(0.0, |acc, (j, &c)| acc * t + c * falling_factorial(j, order))
}

/// Natural cubic spline through `(knots[i], values[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    moments: Vec<f64>,
}

impl CubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::parse(
                "values",
                format!("expected {} values, found {}", knots.len(), values.len()),
            ));
        }
        if knots.len() < 2 {
            return Err(Error::parse("t", "need at least two knots"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::parse("t", "knots must be strictly increasing"));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::parse("values", "entries must be finite"));
        }
        let n = knots.len();
        let mut moments = vec![0.0; n];
        if n > 2 {
            // Tridiagonal solve for interior moments, natural end conditions.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            let mut upper = vec![0.0; m];
            for i in 0..m {
                let h0 = knots[i + 1] - knots[i];
                let h1 = knots[i + 2] - knots[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((values[i + 2] - values[i + 1]) / h1 - (values[i + 1] - values[i]) / h0);
            }
            for i in 1..m {
                let lower = knots[i + 1] - knots[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; m];
            for i in (0..m).rev() {
                let next = if i + 1 < m { sol[i + 1] } else { 0.0 };
                sol[i] = (rhs[i] - upper[i] * next) / diag[i];
            }
            moments[1..n - 1].copy_from_slice(&sol);
        }
        Ok(CubicSpline {
            knots,
            values,
            moments,
        })
    }

    fn eval(&self, t: f64, order: usize) -> f64 {
        let n = self.knots.len();
        let seg = match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let (x0, x1) = (self.knots[seg], self.knots[seg + 1]);
        let (y0, y1) = (self.values[seg], self.values[seg + 1]);
        let (m0, m1) = (self.moments[seg], self.moments[seg + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        match order {
            0 => {
                a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0
            }
            _ => {
                (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0
                    + (3.0 * b * b - 1.0) * h * m1 / 6.0
            }
        }
    }
}
