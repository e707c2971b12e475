//! Airy function `Ai` and its derivative for real arguments, and their negative zeros.
//!
//! Evaluation is split into three regions:
//!
//! * `-7.5 ≤ x ≤ 6`: the Maclaurin pair `Ai(x) = c₁ f(x) - c₂ g(x)` with
//!   `c₁ = Ai(0)`, `c₂ = -Ai'(0)`.
//! * `x > 6`: the exponentially decaying asymptotic expansion, optimally truncated.
//! * `x < -7.5`: the oscillatory asymptotic expansion, optimally truncated.
//!
//! Each evaluation carries an error bound made of the truncation remainder and a
//! rounding estimate driven by the largest summed term (the cancellation floor).
//! Across `|x| ≤ 50` the bound stays below `1e-10`.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::error::{domain, Error, Result};

#[allow(clippy::excessive_precision)]
const GAMMA_ONE_THIRD: f64 = 2.6789385347077476337;
#[allow(clippy::excessive_precision)]
const GAMMA_TWO_THIRDS: f64 = 1.3541179394264004169;

const SERIES_MIN: f64 = -7.5;
const SERIES_MAX: f64 = 6.0;
const SERIES_REL_TOL: f64 = 1e-18;
const MAX_SERIES_TERMS: usize = 250;
const ASYMPTOTIC_TERMS: usize = 80;

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

/// `Ai(0) = 3^{-2/3} / Γ(2/3)`.
pub fn ai_at_zero() -> f64 {
    3f64.powf(-2.0 / 3.0) / GAMMA_TWO_THIRDS
}

/// `Ai'(0) = -3^{-1/3} / Γ(1/3)`.
pub fn ai_prime_at_zero() -> f64 {
    -(3f64.powf(-1.0 / 3.0)) / GAMMA_ONE_THIRD
}

/// A function value together with a conservative absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryEval {
    pub value: f64,
    pub abs_error_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Value,
    Derivative,
}

/// `Ai(x)` with an error bound.
pub fn airy_ai(x: f64) -> Result<AiryEval> {
    check_finite(x)?;
    Ok(evaluate(x, Kind::Value))
}

/// `Ai'(x)` with an error bound.
pub fn airy_ai_prime(x: f64) -> Result<AiryEval> {
    check_finite(x)?;
    Ok(evaluate(x, Kind::Derivative))
}

/// Fast path for `Ai(x)`; returns NaN for non-finite input.
pub fn ai(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    evaluate(x, Kind::Value).value
}

/// Fast path for `Ai'(x)`; returns NaN for non-finite input.
pub fn ai_prime(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    evaluate(x, Kind::Derivative).value
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("Airy argument must be finite, got {x}")))
    }
}

fn evaluate(x: f64, kind: Kind) -> AiryEval {
    if x > SERIES_MAX {
        decaying_asymptotic(x, kind)
    } else if x < SERIES_MIN {
        oscillatory_asymptotic(x, kind)
    } else {
        maclaurin(x, kind)
    }
}

/// Sums one of the two Maclaurin series, returning `(sum, max |term|, last |term|)`.
///
/// `first` is the k = 0 term and `ratio(k)` the factor turning term k-1 into term k
/// (with `x³` already folded in).
fn power_series(first: f64, ratio: impl Fn(f64) -> f64) -> (f64, f64, f64) {
    let mut term = first;
    let mut sum = first;
    let mut max_term = first.abs();
    let mut k = 1.0;
    for _ in 0..MAX_SERIES_TERMS {
        term *= ratio(k);
        sum += term;
        max_term = max_term.max(term.abs());
        if term.abs() <= SERIES_REL_TOL * sum.abs() || term == 0.0 {
            break;
        }
        k += 1.0;
    }
    (sum, max_term, term.abs())
}

fn maclaurin(x: f64, kind: Kind) -> AiryEval {
    let c1 = ai_at_zero();
    let c2 = -ai_prime_at_zero();
    let x3 = x * x * x;
    let ((f, f_max, f_last), (g, g_max, g_last)) = match kind {
        Kind::Value => (
            power_series(1.0, |k| x3 / ((3.0 * k - 1.0) * (3.0 * k))),
            power_series(x, |k| x3 / ((3.0 * k) * (3.0 * k + 1.0))),
        ),
        Kind::Derivative => (
            // f' starts at x²/2 (k = 1 of f), g' at 1.
            power_series(x * x / 2.0, |k| x3 / ((3.0 * k) * (3.0 * k + 2.0))),
            power_series(1.0, |k| x3 / ((3.0 * k - 2.0) * (3.0 * k))),
        ),
    };
    let value = c1 * f - c2 * g;
    let rounding = 4.0 * f64::EPSILON * (c1 * f_max + c2 * g_max + value.abs());
    // The terms decay faster than geometrically once below the stopping tolerance.
    let truncation = 2.0 * (c1 * f_last + c2 * g_last);
    AiryEval {
        value,
        abs_error_bound: rounding + truncation,
    }
}

/// Coefficients `u_k` and `v_k` of the standard Airy asymptotic expansions.
fn asymptotic_coefficients() -> &'static (Vec<f64>, Vec<f64>) {
    static COEFFS: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut u = vec![1.0; ASYMPTOTIC_TERMS];
        let mut v = vec![1.0; ASYMPTOTIC_TERMS];
        for k in 1..ASYMPTOTIC_TERMS {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
        }
        (u, v)
    })
}

fn decaying_asymptotic(x: f64, kind: Kind) -> AiryEval {
    let (u, v) = asymptotic_coefficients();
    let coeffs = match kind {
        Kind::Value => u,
        Kind::Derivative => v,
    };
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut omitted = 0.0;
    let mut power = 1.0;
    for (k, c) in coeffs.iter().enumerate() {
        let signed = c * power;
        let term = signed.abs();
        if term > prev {
            omitted = prev;
            break;
        }
        sum += if k % 2 == 0 { signed } else { -signed };
        prev = term;
        omitted = term;
        if term <= 1e-17 * sum.abs() {
            break;
        }
        power /= zeta;
    }
    // exp turns the rounding of zeta into a relative error of order zeta·ε
    let envelope = (-zeta).exp() / (2.0 * PI.sqrt());
    let prefactor = match kind {
        Kind::Value => envelope / x.powf(0.25),
        Kind::Derivative => -envelope * x.powf(0.25),
    };
    let value = prefactor * sum;
    AiryEval {
        value,
        abs_error_bound: prefactor.abs() * omitted
            + (8.0 + 2.0 * zeta) * f64::EPSILON * value.abs(),
    }
}

fn oscillatory_asymptotic(x: f64, kind: Kind) -> AiryEval {
    let (u, v) = asymptotic_coefficients();
    let coeffs = match kind {
        Kind::Value => u,
        Kind::Derivative => v,
    };
    let t = -x;
    let zeta = 2.0 / 3.0 * t * t.sqrt();
    // even part (P or R) and odd part (Q or S)
    let (mut even, mut odd) = (0.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut omitted = 0.0;
    let mut sign = 1.0;
    let inv_zeta = 1.0 / zeta;
    let mut power = 1.0;
    for k in 0..ASYMPTOTIC_TERMS / 2 {
        let te = coeffs[2 * k].abs() * power;
        let to = coeffs[2 * k + 1].abs() * power * inv_zeta;
        let largest = te.max(to);
        if largest > prev {
            omitted = prev;
            break;
        }
        // v_k alternates in sign against u_k; fold the sign of the coefficient back in.
        even += sign * coeffs[2 * k].signum() * te;
        odd += sign * coeffs[2 * k + 1].signum() * to;
        prev = largest;
        omitted = largest;
        if largest <= 1e-17 {
            break;
        }
        sign = -sign;
        power *= inv_zeta * inv_zeta;
    }
    let theta = zeta + FRAC_PI_4;
    let (s, c) = theta.sin_cos();
    let (value, amplitude) = match kind {
        Kind::Value => {
            let amp = 1.0 / (PI.sqrt() * t.powf(0.25));
            (amp * (s * even - c * odd), amp)
        }
        Kind::Derivative => {
            let amp = t.powf(0.25) / PI.sqrt();
            (-amp * (c * even + s * odd), amp)
        }
    };
    // phase rounding grows with zeta
    let rounding = 4.0 * f64::EPSILON * amplitude * (1.0 + zeta);
    AiryEval {
        value,
        abs_error_bound: 2.0 * amplitude * omitted + rounding,
    }
}

/// Negative zeros of `Ai` and `Ai'`, ordered from the origin outwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    pub ai_zeros: Vec<f64>,
    pub ai_prime_zeros: Vec<f64>,
}

impl ZeroTable {
    /// The first `count` zeros of both `Ai` and `Ai'`.
    pub fn new(count: usize) -> Result<Self> {
        let ai_zeros = (1..=count).map(airy_zero).collect::<Result<Vec<_>>>()?;
        let ai_prime_zeros = (1..=count)
            .map(airy_prime_zero)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ai_zeros,
            ai_prime_zeros,
        })
    }

    pub fn len(&self) -> usize {
        self.ai_zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ai_zeros.is_empty()
    }
}

/// Evaluates `t^{2/3} Σ c_j t^{-2j}`, truncating once the terms stop shrinking.
fn zero_expansion(t: f64, coeffs: &[f64]) -> f64 {
    let inv2 = 1.0 / (t * t);
    let mut sum = 0.0;
    let mut power = 1.0;
    let mut prev = f64::INFINITY;
    for c in coeffs {
        let term = c * power;
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        power *= inv2;
    }
    t.powf(2.0 / 3.0) * sum
}

fn zero_seed(n: usize) -> f64 {
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    -zero_expansion(
        t,
        &[
            1.0,
            5.0 / 48.0,
            -5.0 / 36.0,
            77125.0 / 82944.0,
            -108056875.0 / 6967296.0,
        ],
    )
}

fn prime_zero_seed(n: usize) -> f64 {
    let t = 3.0 * PI * (4.0 * n as f64 - 3.0) / 8.0;
    -zero_expansion(
        t,
        &[
            1.0,
            -7.0 / 48.0,
            35.0 / 288.0,
            -181223.0 / 207360.0,
            18683371.0 / 1244160.0,
        ],
    )
}

fn newton(mut x: f64, label: &str, step: impl Fn(f64) -> f64) -> Result<f64> {
    for _ in 0..NEWTON_MAX_ITER {
        let dx = step(x);
        x -= dx;
        if dx.abs() < NEWTON_TOL {
            return Ok(x);
        }
    }
    Err(Error::Convergence(format!(
        "Newton iteration for {label} did not converge in {NEWTON_MAX_ITER} steps"
    )))
}

/// The n-th (1-based) negative zero `a_n` of `Ai`.
pub fn airy_zero(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("Airy zeros are indexed from n = 1"));
    }
    newton(zero_seed(n), "a zero of Ai", |x| ai(x) / ai_prime(x))
}

/// The n-th (1-based) negative zero `a'_n` of `Ai'`.
///
/// Newton uses `Ai''(x) = x Ai(x)` from the Airy equation.
pub fn airy_prime_zero(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("Airy derivative zeros are indexed from n = 1"));
    }
    newton(prime_zero_seed(n), "a zero of Ai'", |x| {
        ai_prime(x) / (x * ai(x))
    })
}
