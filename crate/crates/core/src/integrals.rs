//! Integrals over the real line of products of zeroth-order Bessel functions,
//! and the Gaussian transform of the Humbert function.
//!
//! Each closed form comes with an independent quadrature route so the two can
//! be compared.

use std::f64::consts::PI;

use crate::besselfam::{bessel_wright, humbert};
use crate::error::{domain, Error, Result};
use crate::lpoly::{l_frac, L_FRAC_MAX_TERMS};
use crate::scalarkit::{adaptive_integral, elliptic_2f1_half, oscillatory_integral, QuadratureResult};
use crate::types::EvalReport;

/// `J_n(x)` from Bessel's integral `(1/2π) ∫_0^{2π} cos(nθ − x sin θ) dθ`,
/// by the trapezoidal rule. The integrand is periodic and analytic, so the
/// rule converges geometrically once the node count exceeds `|x| + n`.
/// Accurate at any argument, which the power series is not.
pub fn bessel_jn_integral(n: i32, x: f64) -> f64 {
    let nodes = (1.3 * x.abs() + n.unsigned_abs() as f64 + 50.0).ceil() as usize;
    let step = 2.0 * PI / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|j| {
            let theta = j as f64 * step;
            (n as f64 * theta - x * theta.sin()).cos()
        })
        .sum();
    sum / nodes as f64
}

/// `∫_ℝ J_0(a x) J_0(b x) dx = (2/|a|) ₂F₁(1/2, 1/2; 1; b²/a²)` for `|a| > |b|`.
pub fn integral_two_j0(a: f64, b: f64) -> Result<f64> {
    let (a, b) = (a.abs(), b.abs());
    if !(a > b) {
        return Err(Error::Divergence {
            rho: if a > 0.0 { (b / a).powi(2) } else { f64::INFINITY },
            condition: "|a| > |b| required".into(),
        });
    }
    Ok(2.0 / a * elliptic_2f1_half((b / a).powi(2))?)
}

/// `2√π · l_{-1/2}(b², a²)`, the series route to [`integral_two_j0`].
pub fn integral_two_j0_series(a: f64, b: f64, tol: f64) -> Result<EvalReport> {
    integral_n_bessel(&[b, a], tol)
}

/// Quadrature of `J_0(a x) J_0(b x)` over the real line.
pub fn integral_two_j0_quadrature(a: f64, b: f64, tol: f64) -> Result<QuadratureResult> {
    integral_n_bessel_quadrature(&[a, b], tol)
}

fn nonzero_sorted(scales: &[f64]) -> Result<Vec<f64>> {
    if scales.is_empty() {
        return domain("at least one scale is required");
    }
    if let Some(bad) = scales.iter().find(|a| !a.is_finite()) {
        return domain(format!("scale {bad} is not finite"));
    }
    // J_0(0·x) = 1 contributes nothing but a constant factor
    let mut abs: Vec<f64> = scales.iter().map(|a| a.abs()).filter(|a| *a > 0.0).collect();
    if abs.is_empty() {
        return domain("at least one scale must be nonzero");
    }
    abs.sort_by(f64::total_cmp);
    Ok(abs)
}

/// `∫_ℝ Π J_0(aᵢ x) dx = 2√π · l_{-1/2}(a₁², …, aₙ²)` with the largest scale
/// dominant. Converges iff `(Σ_{i<n} |aᵢ|)² < aₙ²`; the mere ordering
/// `|aₙ| > … > |a₁|` is not enough.
pub fn integral_n_bessel(scales: &[f64], tol: f64) -> Result<EvalReport> {
    let sorted = nonzero_sorted(scales)?;
    let squares: Vec<f64> = sorted.iter().map(|a| a * a).collect();
    let rep = l_frac(-0.5, &squares, L_FRAC_MAX_TERMS, tol).map_err(|e| match e {
        Error::Divergence { rho, .. } => Error::Divergence {
            rho,
            condition: format!(
                "(Σ_{{i<n}} |a_i|)² < a_n² required for convergence; the ordering |a_n| > … > |a_1| alone is insufficient (scales {sorted:?})"
            ),
        },
        other => other,
    })?;
    let factor = 2.0 * PI.sqrt();
    Ok(EvalReport {
        value: factor * rep.value,
        last_term: factor * rep.last_term,
        ..rep
    })
}

/// Budget-limited oscillatory quadrature of `Π J_0(aᵢ x)` with quasi-period
/// `2π / Σ|aᵢ|`.
pub fn integral_n_bessel_quadrature(scales: &[f64], tol: f64) -> Result<QuadratureResult> {
    let sorted = nonzero_sorted(scales)?;
    let total: f64 = sorted.iter().sum();
    oscillatory_integral(
        |x| sorted.iter().map(|a| bessel_jn_integral(0, a * x)).product(),
        2.0 * PI / total,
        tol,
    )
}

/// `F(a₁,a₂,a₃) = Σ_s [(2s)!/(2^{2s}(s!)²)]² · s! l_s(a₁,a₂) / a₃^s`, so that
/// `l_{-1/2}(a₁,a₂,a₃) = F / √(π a₃)`. Arguments are the (already squared)
/// l-arguments; convergence needs `(√a₁ + √a₂)² < a₃`.
pub fn elliptic_f3(a1: f64, a2: f64, a3: f64, tol: f64) -> Result<EvalReport> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    if !(a1 >= 0.0 && a2 >= 0.0 && a3 > 0.0) || !(a1 + a2 + a3).is_finite() {
        return domain(format!("elliptic_f3 needs a1, a2 >= 0 and a3 > 0, got ({a1}, {a2}, {a3})"));
    }
    let (y1, y2) = (a1 / a3, a2 / a3);
    let rho = (y1.sqrt() + y2.sqrt()).powi(2);
    if rho >= 1.0 {
        return Err(Error::Divergence {
            rho,
            condition: "(√a1 + √a2)² < a3 required".into(),
        });
    }
    let mut ln_fact = vec![0.0f64; L_FRAC_MAX_TERMS + 1];
    for s in 1..=L_FRAC_MAX_TERMS {
        ln_fact[s] = ln_fact[s - 1] + (s as f64).ln();
    }
    // s! l_s(y1, y2) = Σ_k C(s,k)² y1^k y2^{s-k}
    let inner = |s: usize| -> f64 {
        match (y1 == 0.0, y2 == 0.0) {
            (true, true) => f64::from(s == 0),
            (true, false) => y2.powi(s as i32),
            (false, true) => y1.powi(s as i32),
            (false, false) => {
                let (l1, l2) = (y1.ln(), y2.ln());
                (0..=s)
                    .map(|k| {
                        let lb = ln_fact[s] - ln_fact[k] - ln_fact[s - k];
                        (2.0 * lb + k as f64 * l1 + (s - k) as f64 * l2).exp()
                    })
                    .sum()
            }
        }
    };
    let mut c = 1.0;
    let mut sum = 0.0;
    let mut run = 0;
    let mut last = 0.0;
    for s in 0..L_FRAC_MAX_TERMS {
        if s > 0 {
            let sf = s as f64;
            c *= (2.0 * sf - 1.0) / (2.0 * sf);
        }
        let term = c * c * inner(s);
        sum += term;
        last = term.abs();
        if last <= tol * sum.abs() {
            run += 1;
            if run >= 3 {
                return Ok(EvalReport {
                    value: sum,
                    terms_used: s + 1,
                    last_term: last,
                    converged: true,
                });
            }
        } else {
            run = 0;
        }
    }
    Err(Error::NonConvergence {
        best: sum,
        error_estimate: last,
        iterations: L_FRAC_MAX_TERMS,
    })
}

/// Both sides of `∫_ℝ I_{0,0}(x) e^{-βx²} dx = √(π/β) · I_{0,0}(1/(4β) | 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussTransform {
    /// Quadrature of the left-hand side.
    pub lhs: f64,
    /// Bessel-Wright closed form.
    pub rhs: f64,
}

impl GaussTransform {
    pub fn relative_residual(&self) -> f64 {
        ((self.lhs - self.rhs) / self.rhs).abs()
    }
}

pub fn humbert_gauss_transform(beta: f64, tol: f64) -> Result<GaussTransform> {
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("β must be positive, got {beta}"));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let rhs = (PI / beta).sqrt() * bessel_wright(0, 0, 0.25 / beta, 2.0, 1e-17)?.value;
    // the Gaussian is below e^{-80} past this point, far outweighing the growth of I_{0,0}
    let half_width = (80.0 / beta).sqrt();
    let integrand = |x: f64| {
        let h = humbert(0, 0, x, 1e-17).map(|r| r.value).unwrap_or(f64::NAN);
        h * (-beta * x * x).exp()
    };
    let lhs = adaptive_integral(integrand, -half_width, half_width, 0.1 * tol * rhs.abs(), 2000)?.value;
    Ok(GaussTransform { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besselfam::bessel_j;

    #[test]
    fn trapezoid_bessel_matches_series() {
        for n in 0..3 {
            for (x, eps) in [(0.0, 1e-15), (0.7, 1e-14), (5.0, 1e-13), (19.0, 1e-8)] {
                let series = bessel_j(n as f64, x, 1e-17).unwrap().value;
                assert!((bessel_jn_integral(n, x) - series).abs() < eps, "n = {n}, x = {x}");
            }
        }
        // large argument: J_0(x) ~ √(2/(πx)) [cos(x - π/4) + sin(x - π/4)/(8x)]
        let x = 800.0f64;
        let asym = (2.0 / (PI * x)).sqrt() * ((x - PI / 4.0).cos() + (x - PI / 4.0).sin() / (8.0 * x));
        assert!((bessel_jn_integral(0, x) - asym).abs() < 1e-7);
    }

    #[test]
    fn two_factor_closed_form() {
        assert!((integral_two_j0(1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((integral_two_j0(2.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let v = integral_two_j0(1.0, 0.5).unwrap();
        assert!((v - 2.146_364_014_298_73).abs() < 1e-12);
        assert!(matches!(integral_two_j0(1.0, 1.0), Err(Error::Divergence { .. })));
        assert!(matches!(integral_two_j0(1.0, -2.0), Err(Error::Divergence { .. })));
    }

    #[test]
    fn closed_form_and_series_agree() {
        for (a, b) in [(1.0, 0.0), (1.0, 0.5), (2.0, 1.0), (3.0, 2.0)] {
            let closed = integral_two_j0(a, b).unwrap();
            let series = integral_two_j0_series(a, b, 1e-16).unwrap().value;
            assert!((closed - series).abs() < 1e-10, "({a}, {b})");
        }
    }

    #[test]
    fn quadrature_agrees_with_series() {
        let q = integral_two_j0_quadrature(1.0, 0.5, 1e-9).unwrap();
        assert!((q.value - integral_two_j0(1.0, 0.5).unwrap()).abs() < 1e-5, "{q:?}");
        let q = integral_n_bessel_quadrature(&[1.0, 1.0, 3.0], 1e-9).unwrap();
        let s = integral_n_bessel(&[1.0, 1.0, 3.0], 1e-15).unwrap().value;
        assert!((q.value - s).abs() < 1e-5, "{q:?} vs {s}");
    }

    #[test]
    fn scaling_law() {
        for lambda in [0.5, 2.0, 7.0] {
            let base = integral_two_j0(3.0, 2.0).unwrap();
            let scaled = integral_two_j0(3.0 * lambda, 2.0 * lambda).unwrap();
            assert!((scaled - base / lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn n_factor_reduces_and_rejects() {
        let two = integral_n_bessel(&[1.0, 2.0], 1e-16).unwrap().value;
        assert!((two - integral_two_j0(2.0, 1.0).unwrap()).abs() < 1e-12);
        match integral_n_bessel(&[1.0, 2.0, 3.0], 1e-14) {
            Err(Error::Divergence { rho, condition }) => {
                assert!((rho - 1.0).abs() < 1e-12);
                assert!(condition.contains("insufficient"));
            }
            other => panic!("{other:?}"),
        }
        assert!(integral_n_bessel(&[], 1e-12).is_err());
    }

    #[test]
    fn elliptic_f3_reductions() {
        assert_eq!(elliptic_f3(0.0, 0.0, 5.0, 1e-15).unwrap().value, 1.0);
        for a1 in [0.1, 0.3, 0.6] {
            let f = elliptic_f3(a1, 0.0, 1.0, 1e-16).unwrap().value;
            let k = elliptic_2f1_half(a1).unwrap();
            assert!((f - k).abs() < 1e-13 * k);
        }
        let f = elliptic_f3(1.0, 1.0, 9.0, 1e-16).unwrap().value;
        let l = l_frac(-0.5, &[1.0, 1.0, 9.0], L_FRAC_MAX_TERMS, 1e-16).unwrap().value;
        assert!((l - f / (9.0 * PI).sqrt()).abs() < 1e-10);
        assert!(matches!(elliptic_f3(1.0, 4.0, 9.0, 1e-12), Err(Error::Divergence { .. })));
    }

    #[test]
    fn gauss_transform() {
        let t = humbert_gauss_transform(1.0, 1e-10).unwrap();
        assert!((t.rhs - PI.sqrt() * 1.062_554).abs() < 1e-5);
        assert!(t.relative_residual() < 1e-8);
        let big = humbert_gauss_transform(1e6, 1e-10).unwrap();
        assert!((big.rhs / (PI / 1e6).sqrt() - 1.0).abs() < 1e-6);
        let quarter = humbert_gauss_transform(0.25, 1e-10).unwrap();
        let w = bessel_wright(0, 0, 1.0, 2.0, 1e-17).unwrap().value;
        assert!((quarter.rhs - 2.0 * PI.sqrt() * w).abs() < 1e-14);
        assert!(humbert_gauss_transform(0.0, 1e-10).is_err());
    }
}
