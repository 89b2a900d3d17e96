//! Series expansions of products and powers of Bessel functions.
//!
//! A product `Π J_{νᵢ}(aᵢ x)` expands as
//!
//! ```text
//! (x/2)^{Σνᵢ} · Π aᵢ^{νᵢ} · Σ_r (-1)^r/r! · l_r^{(ν)}(a₁², …, aₙ²) · (x/2)^{2r}
//! ```
//!
//! [`product_expansion`] builds that series from the l-polynomials, while
//! [`oracle_cauchy_product`] multiplies the individual factor series by brute
//! force; the two must agree coefficient for coefficient.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::besselfam::{bessel_j, tricomi_c};
use crate::error::{domain, Error, Result};
use crate::lpoly::{l_poly_nu_sequence, l_poly_nu_with, l_sequence, LPolySpec, Method};
use crate::scalarkit::{factorial, recip_gamma};
use crate::types::{as_nonneg_int, rational_to_f64, EvalReport, ExactRational, Number, OrderSpec, ScaleSpec};

/// Coefficients `c_0 ..= c_R` of a truncated series in `u = (x/2)²`.
#[derive(Clone, Debug, PartialEq)]
pub enum SeriesCoeffs {
    Exact(Vec<ExactRational>),
    Real(Vec<f64>),
}

impl SeriesCoeffs {
    pub fn len(&self) -> usize {
        match self {
            SeriesCoeffs::Exact(v) => v.len(),
            SeriesCoeffs::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SeriesCoeffs::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&[ExactRational]> {
        match self {
            SeriesCoeffs::Exact(v) => Some(v),
            SeriesCoeffs::Real(_) => None,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            SeriesCoeffs::Exact(v) => v.iter().map(rational_to_f64).collect(),
            SeriesCoeffs::Real(v) => v.clone(),
        }
    }

    pub fn get(&self, r: usize) -> Option<Number> {
        match self {
            SeriesCoeffs::Exact(v) => v.get(r).cloned().map(Number::Exact),
            SeriesCoeffs::Real(v) => v.get(r).copied().map(Number::Real),
        }
    }
}

/// `scalar · (x/2)^prefactor_exponent · Σ_r c_r (x/2)^{2r}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    pub coeffs: SeriesCoeffs,
    pub prefactor_exponent: f64,
    pub scalar: f64,
}

impl TruncatedSeries {
    /// Truncation order `R` (the series holds `R + 1` coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

fn validate(orders: &OrderSpec, scales: &ScaleSpec) -> Result<()> {
    if orders.is_empty() {
        return domain("at least one factor is required");
    }
    if orders.len() != scales.len() {
        return domain(format!("{} orders but {} scales", orders.len(), scales.len()));
    }
    if let Some(nu) = orders.iter().find(|nu| !(*nu > -1.0) || !nu.is_finite()) {
        return domain(format!("every order must satisfy ν > -1, got {nu}"));
    }
    Ok(())
}

/// `Π aᵢ^{νᵢ}`; a negative scale needs an integer order.
fn order_scalar(orders: &OrderSpec, scales: &ScaleSpec) -> Result<f64> {
    let mut acc = 1.0;
    for (nu, s) in orders.iter().zip(scales.iter()) {
        let a = s.value();
        acc *= if nu.fract() == 0.0 {
            a.powi(nu as i32)
        } else if a > 0.0 {
            a.powf(nu)
        } else {
            return domain(format!("negative scale {a} with non-integer order {nu}"));
        };
    }
    Ok(acc)
}

fn signed_over_factorial(r: u32) -> ExactRational {
    let sign = if r % 2 == 0 { 1 } else { -1 };
    ExactRational::new(BigInt::from(sign), factorial(r))
}

fn alternating(values: Vec<Number>, shift: usize, count: usize) -> SeriesCoeffs {
    // c_r = (-1)^r l_{r+shift} / r!
    if values.iter().all(Number::is_exact) {
        SeriesCoeffs::Exact(
            (0..count)
                .map(|r| signed_over_factorial(r as u32) * values[r + shift].as_exact().unwrap())
                .collect(),
        )
    } else {
        SeriesCoeffs::Real(
            (0..count)
                .map(|r| {
                    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
                    sign * values[r + shift].to_f64() * recip_gamma(r as f64 + 1.0)
                })
                .collect(),
        )
    }
}

fn lpoly_spec(orders: &OrderSpec, scales: &ScaleSpec) -> Result<LPolySpec> {
    LPolySpec::new(orders.clone(), scales.iter().map(|s| s.squared().clone()).collect())
}

/// Expansion of `Π J_{νᵢ}(aᵢ x)` through order `trunc` in `(x/2)²`.
pub fn product_expansion(orders: &OrderSpec, scales: &ScaleSpec, trunc: u32) -> Result<TruncatedSeries> {
    product_expansion_with(orders, scales, trunc, Method::Recursion)
}

/// [`product_expansion`] with an explicit l-polynomial evaluation route.
pub fn product_expansion_with(
    orders: &OrderSpec,
    scales: &ScaleSpec,
    trunc: u32,
    method: Method,
) -> Result<TruncatedSeries> {
    validate(orders, scales)?;
    let spec = lpoly_spec(orders, scales)?;
    let values = match method {
        Method::Recursion => l_poly_nu_sequence(trunc, &spec)?,
        Method::ClosedForm => (0..=trunc)
            .map(|r| l_poly_nu_with(r, &spec, method).map(|v| v.value))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(TruncatedSeries {
        coeffs: alternating(values, 0, trunc as usize + 1),
        prefactor_exponent: orders.sum(),
        scalar: order_scalar(orders, scales)?,
    })
}

/// Brute-force truncated multiplication of the individual factor series
/// `J_ν(a x) = a^ν (x/2)^ν Σ_k (-1)^k a^{2k} / (k! Γ(ν+k+1)) (x/2)^{2k}`.
pub fn oracle_cauchy_product(orders: &OrderSpec, scales: &ScaleSpec, trunc: u32) -> Result<TruncatedSeries> {
    validate(orders, scales)?;
    let len = trunc as usize + 1;
    let exact = orders.as_nonneg_integers().zip(scales.exact_squares());
    let coeffs = match exact {
        Some((nus, squares)) => {
            let mut acc: Vec<ExactRational> = (0..len).map(|r| if r == 0 { One::one() } else { Zero::zero() }).collect();
            for (nu, a2) in nus.iter().zip(&squares) {
                let mut factor = Vec::with_capacity(len);
                let mut power = ExactRational::one();
                for k in 0..len as u32 {
                    let denom = factorial(k) * factorial(nu + k);
                    let sign = if k % 2 == 0 { 1 } else { -1 };
                    factor.push(&power * ExactRational::new(BigInt::from(sign), denom));
                    power *= a2;
                }
                acc = (0..len)
                    .map(|r| (0..=r).fold(ExactRational::zero(), |s, j| s + &acc[j] * &factor[r - j]))
                    .collect();
            }
            SeriesCoeffs::Exact(acc)
        }
        None => {
            let mut acc: Vec<f64> = (0..len).map(|r| if r == 0 { 1.0 } else { 0.0 }).collect();
            for (nu, a2) in orders.iter().zip(scales.real_squares()) {
                let factor: Vec<f64> = (0..len)
                    .map(|k| {
                        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                        sign * a2.powi(k as i32) * recip_gamma(k as f64 + 1.0) * recip_gamma(nu + k as f64 + 1.0)
                    })
                    .collect();
                acc = (0..len)
                    .map(|r| (0..=r).map(|j| acc[j] * factor[r - j]).sum())
                    .collect();
            }
            SeriesCoeffs::Real(acc)
        }
    };
    Ok(TruncatedSeries {
        coeffs,
        prefactor_exponent: orders.sum(),
        scalar: order_scalar(orders, scales)?,
    })
}

/// Evaluates a truncated series at `x`, using the last retained term as the
/// tail estimate; `converged` holds when it is below `tol · max(1, |value|)`.
pub fn eval_product(series: &TruncatedSeries, x: f64, tol: f64) -> Result<EvalReport> {
    if !x.is_finite() {
        return domain("evaluation point must be finite");
    }
    let h = 0.5 * x;
    let mu = series.prefactor_exponent;
    let pre = if mu == 0.0 {
        1.0
    } else if mu.fract() == 0.0 {
        h.powi(mu as i32)
    } else if h >= 0.0 {
        h.powf(mu)
    } else {
        return domain(format!("(x/2)^{mu} is not real at x = {x}"));
    };
    let u = h * h;
    let coeffs = series.coeffs.to_f64();
    // Horner from the top
    let sum = coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c);
    let factor = series.scalar * pre;
    let value = factor * sum;
    let last_term = coeffs
        .last()
        .map(|c| (factor * c * u.powi(coeffs.len() as i32 - 1)).abs())
        .unwrap_or(0.0);
    Ok(EvalReport {
        value,
        terms_used: coeffs.len(),
        last_term,
        converged: last_term <= tol * value.abs().max(1.0),
    })
}

/// `Π J_{νᵢ}(aᵢ x)` from the individual reference series.
pub fn direct_product(orders: &OrderSpec, scales: &ScaleSpec, x: f64, tol: f64) -> Result<EvalReport> {
    validate(orders, scales)?;
    let mut value = 1.0;
    let mut rel_tail = 0.0;
    let mut terms = 0;
    let mut converged = true;
    for (nu, s) in orders.iter().zip(scales.iter()) {
        let rep = bessel_j(nu, s.value() * x, tol)?;
        value *= rep.value;
        rel_tail += rep.last_term / rep.value.abs().max(f64::MIN_POSITIVE);
        terms = terms.max(rep.terms_used);
        converged &= rep.converged;
    }
    Ok(EvalReport {
        value,
        terms_used: terms,
        last_term: (rel_tail * value).abs(),
        converged,
    })
}

/// `(Ĩ_ν(x))^k` as a series: `c_r = Γ(ν+1)^k l_r^{{ν}}(k) / r!`, all positive.
pub fn power_mod_i(nu: f64, k: usize, trunc: u32) -> Result<TruncatedSeries> {
    if !(nu > -1.0) || !nu.is_finite() {
        return domain(format!("power_mod_i requires ν > -1, got {nu}"));
    }
    if k == 0 {
        return domain("power_mod_i requires k >= 1");
    }
    // Γ(ν+1)^k l_r^{{ν}}(k) is the same l-sum with every weight 1/Γ(ν+j+1)
    // replaced by Γ(ν+1)/Γ(ν+j+1) = 1/((ν+1)(ν+2)…(ν+j)).
    let coeffs = match as_nonneg_int(nu) {
        Some(n) => {
            let mut w = Vec::with_capacity(trunc as usize + 1);
            let mut acc = ExactRational::one();
            for j in 0..=trunc {
                if j > 0 {
                    acc /= ExactRational::from_integer(BigInt::from(n + j));
                }
                w.push(acc.clone());
            }
            let ones = vec![ExactRational::one(); k];
            let l = l_sequence(trunc, &ones, &vec![w; k]);
            SeriesCoeffs::Exact(
                l.iter()
                    .enumerate()
                    .map(|(r, v)| v / ExactRational::from_integer(factorial(r as u32)))
                    .collect(),
            )
        }
        None => {
            let mut w = Vec::with_capacity(trunc as usize + 1);
            let mut acc = 1.0;
            for j in 0..=trunc {
                if j > 0 {
                    acc /= nu + j as f64;
                }
                w.push(acc);
            }
            let l = l_sequence(trunc, &vec![1.0; k], &vec![w; k]);
            SeriesCoeffs::Real(
                l.iter()
                    .enumerate()
                    .map(|(r, v)| v * recip_gamma(r as f64 + 1.0))
                    .collect(),
            )
        }
    };
    Ok(TruncatedSeries {
        coeffs,
        prefactor_exponent: 0.0,
        scalar: 1.0,
    })
}

/// Shifted product series `_s f(x) = Σ_r (-1)^r/r! · l_{r+s}(a₁², …) (x/2)^{2r}`
/// for a product of zeroth-order factors.
pub fn shifted_f(s: u32, scales: &ScaleSpec, trunc: u32) -> Result<TruncatedSeries> {
    let orders = OrderSpec::zeros(scales.len());
    validate(&orders, scales)?;
    let values = l_poly_nu_sequence(trunc + s, &lpoly_spec(&orders, scales)?)?;
    Ok(TruncatedSeries {
        coeffs: alternating(values, s as usize, trunc as usize + 1),
        prefactor_exponent: 0.0,
        scalar: 1.0,
    })
}

/// Weight of `x^{n-2r} · _{n-r}f` in the n-th derivative:
/// `(-1)^n n!/2^n · (-1)^r / (r! (n-2r)!)`.
fn derivative_weight(n: u32, r: u32) -> ExactRational {
    let sign = if (n + r) % 2 == 0 { 1 } else { -1 };
    ExactRational::new(
        BigInt::from(sign) * factorial(n),
        (BigInt::one() << n as usize) * factorial(r) * factorial(n - 2 * r),
    )
}

/// n-th derivative of a product of zeroth-order Bessel functions at `x`,
/// assembled from the shifted series.
pub fn derivative_product(n: u32, scales: &ScaleSpec, x: f64, trunc: u32, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for r in 0..=n / 2 {
        let series = shifted_f(n - r, scales, trunc)?;
        let rep = eval_product(&series, x, tol)?;
        if !rep.converged {
            return Err(Error::NonConvergence {
                best: rep.value,
                error_estimate: rep.last_term,
                iterations: rep.terms_used,
            });
        }
        let w = rational_to_f64(&derivative_weight(n, r));
        total += w * x.powi((n - 2 * r) as i32) * rep.value;
    }
    Ok(total)
}

/// Exact coefficients in powers of `x` of the n-th derivative, assembled from
/// the shifted series. Entries up to degree `2·trunc - n` are complete.
pub fn derivative_coefficients(n: u32, scales: &ScaleSpec, trunc: u32) -> Result<Vec<ExactRational>> {
    let mut out = vec![ExactRational::zero(); (n + 2 * trunc + 1) as usize];
    for r in 0..=n / 2 {
        let series = shifted_f(n - r, scales, trunc)?;
        let poly = x_polynomial(&series)?;
        let w = derivative_weight(n, r);
        let shift = (n - 2 * r) as usize;
        for (d, c) in poly.iter().enumerate() {
            out[d + shift] += &w * c;
        }
    }
    Ok(out)
}

/// Rewrites an exact series in `u = (x/2)²` (with no prefactor) as
/// coefficients of plain powers of `x`.
pub fn x_polynomial(series: &TruncatedSeries) -> Result<Vec<ExactRational>> {
    let coeffs = match series.coeffs.as_exact() {
        Some(c) if series.prefactor_exponent == 0.0 && series.scalar == 1.0 => c,
        _ => return domain("x_polynomial needs exact coefficients without a prefactor"),
    };
    let mut out = vec![ExactRational::zero(); 2 * coeffs.len().max(1) - 1];
    for (q, c) in coeffs.iter().enumerate() {
        out[2 * q] = c / ExactRational::from_integer(BigInt::one() << (2 * q));
    }
    Ok(out)
}

/// Differentiates an exact polynomial in `x` term by term, `n` times.
pub fn differentiate(poly: &[ExactRational], n: u32) -> Vec<ExactRational> {
    let n = n as usize;
    (n..poly.len())
        .map(|d| {
            let falling = ((d - n + 1)..=d).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
            &poly[d] * ExactRational::from_integer(falling)
        })
        .collect()
}

/// `|Σ_{r≤R} tʳ/r! l_r^{(ν)}(x) − Π C_{νⱼ}(t xⱼ)|`.
pub fn generating_check(orders: &OrderSpec, args: &[f64], t: f64, trunc: u32) -> Result<f64> {
    if orders.len() != args.len() || orders.is_empty() {
        return domain("generating_check needs one argument per order");
    }
    let spec = LPolySpec::new(orders.clone(), args.iter().map(|&x| Number::Real(x)).collect())?;
    let values = l_poly_nu_sequence(trunc, &spec)?;
    let mut lhs = 0.0;
    let mut tr_over_fact = 1.0;
    for (r, v) in values.iter().enumerate() {
        if r > 0 {
            tr_over_fact *= t / r as f64;
        }
        lhs += tr_over_fact * v.to_f64();
    }
    let mut rhs = 1.0;
    for (nu, x) in orders.iter().zip(args) {
        rhs *= tricomi_c(nu, t * x, 1e-18)?.value;
    }
    Ok((lhs - rhs).abs())
}
