//! Scalar building blocks: the reciprocal gamma function, exact combinatorics,
//! the quarter-period elliptic integral through the arithmetic-geometric mean,
//! and quadrature used as an independent numerical oracle.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{domain, Error, Result};
use crate::types::ExactRational;

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// `sin(πx)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let n = (2.0 * x).round();
    let r = x - 0.5 * n;
    let s = (PI * r).sin();
    let c = (PI * r).cos();
    match (n as i64).rem_euclid(4) {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    }
}

/// `ln Γ(x)` for `x ≥ 1/2`.
fn ln_gamma_right(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// `1/Γ(x)` for `x ≥ 1/2`.
fn recip_gamma_right(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return 1.0 / f;
    }
    if x > 170.0 {
        return (-ln_gamma_right(x)).exp();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power so that it cannot overflow before the exponential damps it
    let half = t.powf(0.5 * (z + 0.5));
    let gamma = (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z);
    1.0 / gamma
}

/// The reciprocal gamma function `1/Γ(x)`.
///
/// This is an entire function: it returns exactly `0` at the poles of `Γ`
/// (the non-positive integers), which lets coefficient formulas of the form
/// `1/Γ(ν + k + 1)` run over negative and fractional orders unguarded.
pub fn recip_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    if x >= 0.5 {
        recip_gamma_right(x)
    } else {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        let g1mx = 1.0 / recip_gamma_right(1.0 - x);
        sin_pi(x) * g1mx / PI
    }
}

/// `Γ(x)`; infinite at the poles.
pub fn gamma(x: f64) -> f64 {
    1.0 / recip_gamma(x)
}

/// Exact `n!`.
pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub(crate) fn binomial_int(n: u32, k: u32) -> BigInt {
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact binomial coefficient `n!/(k!(n-k)!)`.
pub fn binomial(n: u32, k: u32) -> Result<ExactRational> {
    if k > n {
        return domain(format!("binomial({n}, {k}) requires k <= n"));
    }
    Ok(ExactRational::from_integer(binomial_int(n, k)))
}

/// Arithmetic-geometric mean of two nonnegative numbers.
pub fn agm(a: f64, b: f64) -> f64 {
    let (mut a, mut g) = (a, b);
    for _ in 0..64 {
        if (a - g).abs() <= 1e-15 * a.abs() {
            break;
        }
        let next_a = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next_a;
    }
    a
}

/// `₂F₁(1/2, 1/2; 1; m) = 1/AGM(1, √(1-m))`, the normalized quarter period
/// of the complete elliptic integral of the first kind with parameter `m = k²`.
pub fn elliptic_2f1_half(m: f64) -> Result<f64> {
    if m.is_nan() || m < 0.0 {
        return domain(format!("elliptic parameter m = {m} must satisfy 0 <= m < 1"));
    }
    if m >= 1.0 {
        return Err(Error::Divergence {
            rho: m,
            condition: "elliptic parameter m must be below 1".into(),
        });
    }
    Ok(1.0 / agm(1.0, (1.0 - m).sqrt()))
}

/// The defining power series `∑ [(2s)!/(2^{2s}(s!)²)]² m^s`, summed to `terms` terms.
pub fn elliptic_2f1_half_series(m: f64, terms: usize) -> f64 {
    let mut coef = 1.0;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for s in 0..terms {
        sum += coef * coef * pow;
        let sf = s as f64;
        coef *= (2.0 * sf + 1.0) / (2.0 * sf + 2.0);
        pow *= m;
    }
    sum
}

/// Result of a numerical integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub intervals_used: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// 7-point Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Gauss-Kronrod rule; returns (Kronrod value, |Kronrod - Gauss|).
fn gauss_kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`,
/// bisecting the worst subinterval until the summed error estimate is below `tol`.
pub fn adaptive_integral<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain("adaptive_integral needs finite bounds and tol > 0");
    }
    let (v, e) = gauss_kronrod15(&f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: err,
                intervals_used: parts.len(),
            });
        }
        if parts.len() >= max_intervals {
            return Err(Error::NonConvergence {
                best: value,
                error_estimate: err,
                iterations: parts.len(),
            });
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod15(&f, lo, mid);
        let (v2, e2) = gauss_kronrod15(&f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Wynn's epsilon algorithm on a sequence of partial sums.
///
/// Returns the even-column entry whose two most recent values agree best,
/// together with that disagreement as an error estimate.
pub fn wynn_epsilon(seq: &[f64]) -> (f64, f64) {
    let n = seq.len();
    let last = *seq.last().unwrap_or(&0.0);
    if n < 3 {
        let err = if n == 2 { (seq[1] - seq[0]).abs() } else { f64::INFINITY };
        return (last, err);
    }
    let mut best = (last, (seq[n - 1] - seq[n - 2]).abs());
    let mut prev = vec![0.0; n + 1];
    let mut cur = seq.to_vec();
    let mut column = 0;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == 0.0 {
                break;
            }
            next.push(prev[i + 1] + 1.0 / diff);
        }
        if next.len() < cur.len() - 1 || next.iter().any(|v| !v.is_finite()) {
            break;
        }
        column += 1;
        if column % 2 == 0 && next.len() >= 2 {
            let m = next.len();
            let err = (next[m - 1] - next[m - 2]).abs();
            if err < best.1 {
                best = (next[m - 1], err);
            }
        }
        prev = cur;
        cur = next;
    }
    best
}

/// Maximum number of partition intervals for [`oscillatory_integral`].
pub const OSCILLATORY_BUDGET: usize = 200;

/// `∫_{-∞}^{∞} f = 2∫_0^∞ f` for an even, oscillatory, slowly decaying `f`.
///
/// The half line is cut at multiples of half the quasi-period `period_hint`,
/// so that the dominant oscillation alternates in sign from one piece to the
/// next; each piece is integrated adaptively and the sequence of partial sums
/// is extrapolated with the epsilon algorithm.
pub fn oscillatory_integral<F: Fn(f64) -> f64>(
    f: F,
    period_hint: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    oscillatory_integral_with_budget(f, period_hint, tol, OSCILLATORY_BUDGET)
}

pub fn oscillatory_integral_with_budget<F: Fn(f64) -> f64>(
    f: F,
    period_hint: f64,
    tol: f64,
    budget: usize,
) -> Result<QuadratureResult> {
    if !(period_hint > 0.0) || !(tol > 0.0) {
        return domain("oscillatory_integral needs period_hint > 0 and tol > 0");
    }
    let step = 0.5 * period_hint;
    let piece_tol = (tol * 1e-3).max(1e-15);
    let mut partial = Vec::with_capacity(budget);
    let mut running = 0.0;
    let mut quad_err = 0.0;
    let mut history: Vec<f64> = Vec::new();
    let mut best = (0.0, f64::INFINITY);
    for k in 0..budget {
        let lo = k as f64 * step;
        let piece = match adaptive_integral(&f, lo, lo + step, piece_tol, 256) {
            Ok(q) => q,
            Err(Error::NonConvergence { best, error_estimate, .. }) => QuadratureResult {
                value: best,
                abs_error_estimate: error_estimate,
                intervals_used: 256,
            },
            Err(e) => return Err(e),
        };
        running += piece.value;
        quad_err += piece.abs_error_estimate;
        partial.push(running);
        if partial.len() < 4 {
            continue;
        }
        let window = &partial[partial.len().saturating_sub(50)..];
        let (estimate, table_err) = wynn_epsilon(window);
        history.push(estimate);
        let h = history.len();
        let drift = if h >= 3 {
            (history[h - 1] - history[h - 2]).abs() + (history[h - 2] - history[h - 3]).abs()
        } else {
            f64::INFINITY
        };
        let err = 2.0 * (drift.max(table_err.min(drift)) + quad_err);
        if err < best.1 {
            best = (2.0 * estimate, err);
        }
        if err <= tol && k >= 8 {
            return Ok(QuadratureResult {
                value: 2.0 * estimate,
                abs_error_estimate: err,
                intervals_used: k + 1,
            });
        }
    }
    Err(Error::NonConvergence {
        best: best.0,
        error_estimate: best.1,
        iterations: budget,
    })
}
