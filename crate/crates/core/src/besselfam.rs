//! Reference power series for the Bessel-type functions: `J_ν`, the normalized
//! modified function `Ĩ_ν`, the Tricomi function `C_ν`, two-variable Hermite
//! polynomials, Humbert functions and two-index Bessel-Wright functions.
//!
//! Every series is summed directly with adaptive truncation: summation stops
//! once three consecutive terms satisfy `|t| ≤ tol · max(1, |sum|)`. Arguments
//! are meant to stay at desk scale, where the direct series is trustworthy.

use num_bigint::BigInt;

use crate::error::{domain, Result};
use crate::lpoly::Coef;
use crate::scalarkit::{binomial_int, factorial, recip_gamma};
use crate::types::{EvalReport, ExactRational};

/// Largest `|x|` accepted by [`bessel_j`].
pub const DESK_SCALE: f64 = 30.0;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 1000;

/// Sums `term(0), term(1), …` with the three-small-terms stopping rule.
/// Terms with index below `skip` never count towards stopping.
pub(crate) fn sum_series<F: FnMut(usize) -> f64>(mut term: F, tol: f64, skip: usize) -> EvalReport {
    let mut sum = 0.0;
    let mut run = 0;
    let mut last = 0.0;
    for r in 0..MAX_SERIES_TERMS {
        let t = term(r);
        sum += t;
        last = t.abs();
        if r >= skip && last <= tol * sum.abs().max(1.0) {
            run += 1;
            if run >= 3 {
                return EvalReport {
                    value: sum,
                    terms_used: r + 1,
                    last_term: last,
                    converged: true,
                };
            }
        } else {
            run = 0;
        }
    }
    EvalReport {
        value: sum,
        terms_used: MAX_SERIES_TERMS,
        last_term: last,
        converged: false,
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        domain(format!("tolerance must be positive, got {tol}"))
    }
}

/// `(x/2)^ν` on the real line; negative bases only for integer `ν`.
fn half_power(x: f64, nu: f64) -> Result<f64> {
    let h = 0.5 * x;
    if nu.fract() == 0.0 {
        Ok(h.powi(nu as i32))
    } else if h < 0.0 {
        domain(format!("(x/2)^ν is not real for x = {x}, ν = {nu}"))
    } else {
        Ok(h.powf(nu))
    }
}

/// `J_ν(x) = Σ_r (-1)^r (x/2)^{2r+ν} / (r! Γ(ν+r+1))`.
pub fn bessel_j(nu: f64, x: f64, tol: f64) -> Result<EvalReport> {
    check_tol(tol)?;
    if !(nu > -1.0) {
        return domain(format!("bessel_j requires ν > -1, got {nu}"));
    }
    if !(x.abs() <= DESK_SCALE) {
        return domain(format!(
            "|x| = {} exceeds the desk-scale bound {DESK_SCALE} for the alternating series",
            x.abs()
        ));
    }
    let u = 0.25 * x * x;
    let mut t = half_power(x, nu)? * recip_gamma(nu + 1.0);
    Ok(sum_series(
        |r| {
            if r > 0 {
                let rf = r as f64;
                t *= -u / (rf * (nu + rf));
            }
            t
        },
        tol,
        0,
    ))
}

/// `Ĩ_ν(x) = Σ_r Γ(ν+1) / (r! Γ(r+ν+1)) (x/2)^{2r}`, so `Ĩ_ν(0) = 1`.
pub fn mod_i_tilde(nu: f64, x: f64, tol: f64) -> Result<EvalReport> {
    check_tol(tol)?;
    if !(nu > -1.0) {
        return domain(format!("mod_i_tilde requires ν > -1, got {nu}"));
    }
    let u = 0.25 * x * x;
    let mut t = 1.0;
    Ok(sum_series(
        |r| {
            if r > 0 {
                let rf = r as f64;
                t *= u / (rf * (rf + nu));
            }
            t
        },
        tol,
        0,
    ))
}

/// Tricomi function `C_ν(x) = Σ_r x^r / (r! Γ(ν+r+1))`, entire in `x` for any real `ν`.
pub fn tricomi_c(nu: f64, x: f64, tol: f64) -> Result<EvalReport> {
    check_tol(tol)?;
    if !nu.is_finite() {
        return domain("tricomi_c order must be finite");
    }
    // leading terms vanish at the poles of Γ(ν+r+1)
    let skip = if nu < 0.0 { (-nu).ceil() as usize } else { 0 };
    let mut power = 1.0;
    Ok(sum_series(
        |r| {
            if r > 0 {
                power *= x / r as f64;
            }
            power * recip_gamma(nu + r as f64 + 1.0)
        },
        tol,
        skip,
    ))
}

fn hermite_sum<T: Coef>(n: u32, x: T, y: T) -> T {
    let n_fact = factorial(n);
    (0..=n / 2).fold(T::zero(), |acc, r| {
        let c = &n_fact / (factorial(n - 2 * r) * factorial(r));
        acc + T::from_big(c) * x.pow(n - 2 * r) * y.pow(r)
    })
}

/// Two-variable Hermite polynomial `H_n(x,y) = n! Σ_r x^{n-2r} y^r / ((n-2r)! r!)`.
pub fn hermite2(n: u32, x: f64, y: f64) -> f64 {
    hermite_sum(n, x, y)
}

pub fn hermite2_exact(n: u32, x: &ExactRational, y: &ExactRational) -> ExactRational {
    hermite_sum(n, x.clone(), y.clone())
}

/// Humbert function `I_{m₁,m₂}(x) = Σ_r x^r / (r! (m₁+r)! (m₂+r)!)`.
pub fn humbert(m1: u32, m2: u32, x: f64, tol: f64) -> Result<EvalReport> {
    check_tol(tol)?;
    let first = num_traits::ToPrimitive::to_f64(&(factorial(m1) * factorial(m2))).unwrap_or(f64::INFINITY);
    let mut t = 1.0 / first;
    let (a, b) = (m1 as f64, m2 as f64);
    Ok(sum_series(
        |r| {
            if r > 0 {
                let rf = r as f64;
                t *= x / (rf * (a + rf) * (b + rf));
            }
            t
        },
        tol,
        0,
    ))
}

/// Two-index Bessel-Wright function `I_{m₁,m₂}(x|k) = Σ_r x^r / (r! Γ(kr+1+m₁) Γ(kr+1+m₂))`.
pub fn bessel_wright(m1: u32, m2: u32, x: f64, k: f64, tol: f64) -> Result<EvalReport> {
    check_tol(tol)?;
    if !(k > 0.0) || !k.is_finite() {
        return domain(format!("bessel_wright requires k > 0, got {k}"));
    }
    let mut power = 1.0;
    Ok(sum_series(
        |r| {
            if r > 0 {
                power *= x / r as f64;
            }
            let kr = k * r as f64;
            power * recip_gamma(kr + 1.0 + m1 as f64) * recip_gamma(kr + 1.0 + m2 as f64)
        },
        tol,
        0,
    ))
}

/// Coefficient of `(x/2)^{2r}` in the series of `J_0(x)`: `(-1)^r/(r!)²`.
pub fn j0_coefficient(r: u32) -> ExactRational {
    let f = factorial(r);
    let sign = if r % 2 == 0 { 1 } else { -1 };
    ExactRational::new(BigInt::from(sign), &f * &f)
}

/// `Σ_s C(r,s)²`, the central binomial `C(2r,r)`, as an exact integer.
pub fn central_binomial(r: u32) -> BigInt {
    binomial_int(2 * r, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    const TOL: f64 = 1e-16;

    fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(lo) < 0.0) == (f(mid) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn bessel_j_values() {
        let j = bessel_j(0.0, 0.0, TOL).unwrap();
        assert_eq!(j.value, 1.0);
        assert!(j.converged);
        let zero = bisect(|x| bessel_j(0.0, x, TOL).unwrap().value, 2.0, 3.0);
        assert!((zero - 2.404_825_557_695_773).abs() < 1e-9);
        assert!(bessel_j(0.0, 2.404_825_557_695_773, TOL).unwrap().value.abs() < 1e-9);
        // J_{1/2}(x) = √(2/(πx)) sin x
        let x = 1.7f64;
        let expected = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
        assert!((bessel_j(0.5, x, TOL).unwrap().value - expected).abs() < 1e-15);
        assert!(bessel_j(0.0, 31.0, TOL).is_err());
        assert!(bessel_j(-1.0, 1.0, TOL).is_err());
        assert!(bessel_j(0.5, -1.0, TOL).is_err());
    }

    #[test]
    fn j0_series_coefficients() {
        assert_eq!(j0_coefficient(0), BigRational::from_integer(1.into()));
        assert_eq!(j0_coefficient(2), BigRational::new(1.into(), 4.into()));
        assert_eq!(j0_coefficient(3), BigRational::new((-1).into(), 36.into()));
    }

    #[test]
    fn modified_and_tricomi() {
        assert_eq!(mod_i_tilde(0.7, 0.0, TOL).unwrap().value, 1.0);
        let i0 = mod_i_tilde(0.0, 1.0, TOL).unwrap().value;
        // independent order: sum the 20-term series backwards
        let backwards: f64 = (0..20u32)
            .rev()
            .map(|r| {
                let f = (1..=r).map(f64::from).product::<f64>();
                0.25f64.powi(r as i32) / (f * f)
            })
            .sum();
        assert!((i0 - backwards).abs() < 1e-15);
        assert!((i0 - 1.266_065_877_752_008_4).abs() < 1e-15);

        for nu in [0.0, 0.5, 2.0] {
            let c0 = tricomi_c(nu, 0.0, TOL).unwrap().value;
            assert!((c0 - recip_gamma(nu + 1.0)).abs() < 1e-16);
            let x = 1.3;
            let lhs = mod_i_tilde(nu, x, TOL).unwrap().value;
            let rhs = crate::scalarkit::gamma(nu + 1.0) * tricomi_c(nu, 0.25 * x * x, TOL).unwrap().value;
            assert!((lhs - rhs).abs() < 1e-14);
        }
        assert!((tricomi_c(0.0, 1.0, TOL).unwrap().value - 2.279_585_302_336_067).abs() < 1e-14);
        let j = bessel_j(0.0, 1.0, TOL).unwrap().value;
        assert!((tricomi_c(0.0, -0.25, TOL).unwrap().value - j).abs() < 1e-15);
        // J_ν(x) = (x/2)^ν C_ν(-x²/4)
        let (nu, x) = (1.5, 2.2f64);
        let lhs = bessel_j(nu, x, TOL).unwrap().value;
        let rhs = (0.5 * x).powf(nu) * tricomi_c(nu, -0.25 * x * x, TOL).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn tricomi_past_poles() {
        // C_{-2}(x) = x² C_2(x)
        let x = 0.8;
        let lhs = tricomi_c(-2.0, x, TOL).unwrap().value;
        let rhs = x * x * tricomi_c(2.0, x, TOL).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn parity() {
        for x in [0.3, 1.1, 4.5] {
            for nu in [0.0, 1.0, 2.0] {
                let p = bessel_j(nu, x, TOL).unwrap().value / (0.5 * x).powi(nu as i32);
                let m = bessel_j(nu, -x, TOL).unwrap().value / (-0.5 * x).powi(nu as i32);
                assert!((p - m).abs() < 1e-15);
            }
            let a = mod_i_tilde(0.5, x, TOL).unwrap().value;
            let b = mod_i_tilde(0.5, -x, TOL).unwrap().value;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn hermite_values() {
        assert_eq!(hermite2(0, 3.0, 1.0), 1.0);
        assert_eq!(hermite2(2, 3.0, 1.0), 11.0);
        assert_eq!(hermite2(3, 2.0, 1.0), 20.0);
    }

    #[test]
    fn hermite_recurrence_exact() {
        let x = BigRational::new(3.into(), 2.into());
        let y = BigRational::new((-2).into(), 5.into());
        for n in 1..=10u32 {
            let lhs = hermite2_exact(n + 1, &x, &y);
            let rhs = &x * hermite2_exact(n, &x, &y)
                + BigRational::from_integer((2 * n).into()) * &y * hermite2_exact(n - 1, &x, &y);
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn humbert_and_wright() {
        assert_eq!(humbert(0, 0, 0.0, TOL).unwrap().value, 1.0);
        assert_eq!(humbert(1, 2, 0.0, TOL).unwrap().value, 0.5);
        for x in [-2.0, 0.4, 3.0] {
            let h = humbert(0, 0, x, TOL).unwrap().value;
            let w = bessel_wright(0, 0, x, 1.0, TOL).unwrap().value;
            assert!((h - w).abs() < 1e-15);
        }
        assert!((bessel_wright(2, 3, 0.0, 1.7, TOL).unwrap().value - 1.0 / 12.0).abs() < 1e-16);
        // 1 + 1/16 + 1/18432 + …
        let w = bessel_wright(0, 0, 0.25, 2.0, TOL).unwrap().value;
        let hand = 1.0 + 1.0 / 16.0 + 1.0 / 18432.0 + 0.25f64.powi(3) / (6.0 * 720.0 * 720.0);
        assert!((w - hand).abs() < 1e-12);
        assert!((w - 1.062_554).abs() < 1e-6);
        assert!(bessel_wright(0, 0, 1.0, 0.0, TOL).is_err());
    }

    #[test]
    fn humbert_derivative_by_finite_difference() {
        let h = 1e-3;
        for (m1, m2) in [(0, 0), (1, 2), (3, 1)] {
            let f = |x: f64| humbert(m1, m2, x, TOL).unwrap().value;
            let d = |h: f64| (f(0.5 + h) - f(0.5 - h)) / (2.0 * h);
            let richardson = (4.0 * d(h / 2.0) - d(h)) / 3.0;
            let target = humbert(m1 + 1, m2 + 1, 0.5, TOL).unwrap().value;
            assert!(((richardson - target) / target).abs() < 1e-9);
        }
    }

    #[test]
    fn truncation_contract() {
        let tol = 1e-12;
        for x in [0.5, 3.0, 12.0] {
            let rep = bessel_j(0.0, x, tol).unwrap();
            assert!(rep.converged);
            assert!(rep.last_term <= tol * rep.value.abs().max(1.0));
            let n = rep.terms_used;
            let u = 0.25 * x * x;
            let mut t = 1.0;
            let mut doubled = 0.0;
            for r in 0..2 * n {
                if r > 0 {
                    t *= -u / (r as f64 * r as f64);
                }
                doubled += t;
            }
            assert!((doubled - rep.value).abs() < 10.0 * tol * rep.value.abs().max(1.0));
        }
    }

    #[test]
    fn central_binomials() {
        assert_eq!(central_binomial(3), BigInt::from(20));
    }
}
