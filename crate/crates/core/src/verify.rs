//! Self-check suites over every module, reported case by case.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::besselfam::{central_binomial, humbert};
use crate::error::{Error, Result};
use crate::integrals::{
    humbert_gauss_transform, integral_n_bessel, integral_n_bessel_quadrature, integral_two_j0,
    integral_two_j0_quadrature, integral_two_j0_series,
};
use crate::lpoly::{
    b_poly, b_poly_nu, jacobi_poly, l_frac, l_homog, l_poly, l_poly_coefficients, laguerre_derivative, trim,
    HomogIndex, Method, L_FRAC_MAX_TERMS,
};
use crate::products::{
    derivative_coefficients, differentiate, direct_product, eval_product, generating_check, oracle_cauchy_product,
    product_expansion, product_expansion_with, x_polynomial,
};
use crate::scalarkit::{binomial, elliptic_2f1_half, recip_gamma};
use crate::types::{rational_to_f64, rint, ExactRational, LValue, Number, OrderSpec, Scale, ScaleSpec};

/// Which group of checks to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lpoly,
    Products,
    Integrals,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lpoly => "lpoly",
            Suite::Products => "products",
            Suite::Integrals => "integrals",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lpoly" => Ok(Suite::Lpoly),
            "products" => Ok(Suite::Products),
            "integrals" => Ok(Suite::Integrals),
            "all" => Ok(Suite::All),
            other => Err(Error::Domain(format!(
                "unknown suite {other:?}; expected lpoly, products, integrals or all"
            ))),
        }
    }
}

/// One verified case. Exact cases carry tolerance 0 and pass only on equality.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseDetail {
    pub id: String,
    pub expected: f64,
    pub got: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
    pub worst_residual: f64,
    /// The loosest tolerance among the cases.
    pub tolerance: f64,
    pub details: Vec<CaseDetail>,
}

impl VerifyReport {
    fn from_details(suite: &str, details: Vec<CaseDetail>) -> Self {
        let failures = details.iter().filter(|d| !d.passed).count();
        let worst_residual = details.iter().map(|d| d.residual).fold(0.0, f64::max);
        let tolerance = details.iter().map(|d| d.tolerance).fold(0.0, f64::max);
        VerifyReport {
            suite: suite.to_string(),
            cases: details.len(),
            failures,
            worst_residual,
            tolerance,
            details,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub fn run_suite(suite: Suite) -> VerifyReport {
    let details = match suite {
        Suite::Lpoly => lpoly_cases(),
        Suite::Products => products_cases(),
        Suite::Integrals => integrals_cases(),
        Suite::All => [
            (Suite::Lpoly, lpoly_cases()),
            (Suite::Products, products_cases()),
            (Suite::Integrals, integrals_cases()),
        ]
        .into_iter()
        .flat_map(|(s, cases)| {
            cases.into_iter().map(move |mut c| {
                c.id = format!("{s}/{}", c.id);
                c
            })
        })
        .collect(),
    };
    VerifyReport::from_details(suite.name(), details)
}

fn failed(id: String, expected: f64, err: Error) -> CaseDetail {
    CaseDetail {
        id: format!("{id} [error: {err}]"),
        expected,
        got: f64::NAN,
        residual: f64::INFINITY,
        tolerance: 0.0,
        passed: false,
    }
}

/// Relative residual against `expected`, absolute when `expected` is zero.
fn relative(id: impl Into<String>, expected: f64, got: Result<f64>, tol: f64) -> CaseDetail {
    let id = id.into();
    match got {
        Ok(got) => {
            let scale = if expected == 0.0 { 1.0 } else { expected.abs() };
            let residual = (got - expected).abs() / scale;
            CaseDetail { id, expected, got, residual, tolerance: tol, passed: residual <= tol }
        }
        Err(e) => failed(id, expected, e),
    }
}

fn absolute(id: impl Into<String>, expected: f64, got: Result<f64>, tol: f64) -> CaseDetail {
    let id = id.into();
    match got {
        Ok(got) => {
            let residual = (got - expected).abs();
            CaseDetail { id, expected, got, residual, tolerance: tol, passed: residual <= tol }
        }
        Err(e) => failed(id, expected, e),
    }
}

fn exact(id: impl Into<String>, expected: &ExactRational, got: Result<ExactRational>) -> CaseDetail {
    let id = id.into();
    match got {
        Ok(got) => {
            let residual = rational_to_f64(&(&got - expected).abs());
            CaseDetail {
                id,
                expected: rational_to_f64(expected),
                got: rational_to_f64(&got),
                passed: &got == expected,
                residual,
                tolerance: 0.0,
            }
        }
        Err(e) => failed(id, rational_to_f64(expected), e),
    }
}

/// Counts mismatches over a family of exact comparisons; expects zero.
fn mismatches(id: impl Into<String>, found: Result<usize>) -> CaseDetail {
    let id = id.into();
    match found {
        Ok(n) => CaseDetail {
            id,
            expected: 0.0,
            got: n as f64,
            residual: n as f64,
            tolerance: 0.0,
            passed: n == 0,
        },
        Err(e) => failed(id, 0.0, e),
    }
}

fn exact_value(v: LValue) -> Result<ExactRational> {
    v.exact()
        .cloned()
        .ok_or_else(|| Error::Domain("expected an exact value".into()))
}

/// Compares two values on the exact path when both are exact, otherwise by
/// relative residual.
fn compare(id: String, expected: Number, got: Number, tol: f64) -> CaseDetail {
    match (&expected, &got) {
        (Number::Exact(e), Number::Exact(g)) => exact(id, e, Ok(g.clone())),
        _ => relative(id, expected.to_f64(), Ok(got.to_f64()), tol),
    }
}

fn sum_numbers(values: impl IntoIterator<Item = Number>) -> Number {
    values.into_iter().fold(Number::Exact(ExactRational::zero()), |acc, v| match (acc, v) {
        (Number::Exact(a), Number::Exact(b)) => Number::Exact(a + b),
        (a, b) => Number::Real(a.to_f64() + b.to_f64()),
    })
}

fn scale_number(v: Number, by: &ExactRational) -> Number {
    match v {
        Number::Exact(q) => Number::Exact(q * by),
        Number::Real(x) => Number::Real(x * rational_to_f64(by)),
    }
}

fn mul_numbers(a: Number, b: Number) -> Number {
    match (a, b) {
        (Number::Exact(a), Number::Exact(b)) => Number::Exact(a * b),
        (a, b) => Number::Real(a.to_f64() * b.to_f64()),
    }
}

const RECURSION_NUS: [(f64, &str); 3] = [(0.0, "0"), (0.5, "1/2"), (1.0, "1")];

fn homog(r: u32, nu: f64, k: usize) -> Result<Number> {
    Ok(l_homog(r, &HomogIndex::uniform(nu, k)?)?.value)
}

fn index_raise(nu: f64, k: usize, r: u32) -> Result<(Number, Number)> {
    let lhs = homog(r + 1, nu, k)?;
    let rhs = (0..k)
        .map(|j| Ok(l_homog(r, &HomogIndex::raised(nu, k, j)?)?.value))
        .collect::<Result<Vec<_>>>()?;
    Ok((lhs, sum_numbers(rhs)))
}

fn split(nu: f64, k: usize, r: u32) -> Result<(Number, Number)> {
    let lhs = homog(r, nu, k + 1)?;
    let exact_weights = nu.fract() == 0.0;
    let mut terms = Vec::new();
    for j in 0..=r {
        let base = scale_number(homog(j, nu, k)?, &binomial(r, j)?);
        let g = (r - j) as f64 + nu + 1.0;
        terms.push(if exact_weights {
            // 1/Γ(m+1) = 1/m! for integral m
            let m = g as u32 - 1;
            mul_numbers(base, Number::Exact(ExactRational::new(1.into(), crate::scalarkit::factorial(m))))
        } else {
            Number::Real(base.to_f64() * recip_gamma(g))
        });
    }
    Ok((lhs, sum_numbers(terms)))
}

fn convolution(nu: f64, k: usize, s: usize, r: u32) -> Result<(Number, Number)> {
    let lhs = homog(r, nu, k + s)?;
    let terms = (0..=r)
        .map(|j| {
            let prod = mul_numbers(homog(r - j, nu, s)?, homog(j, nu, k)?);
            Ok(scale_number(prod, &binomial(r, j)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((lhs, sum_numbers(terms)))
}

fn lpoly_cases() -> Vec<CaseDetail> {
    let mut out = Vec::new();

    let b_mismatch = (0..=20u32)
        .filter(|&r| b_poly(r, 2) != ExactRational::from_integer(central_binomial(r)))
        .count();
    out.push(mismatches("B_r(2)=binom(2r,r), r≤20", Ok(b_mismatch)));
    for r in [5u32, 10, 20] {
        out.push(exact(
            format!("B_{r}(2)"),
            &ExactRational::from_integer(central_binomial(r)),
            Ok(b_poly(r, 2)),
        ));
    }
    for k in 1..=4usize {
        for r in 0..=10u32 {
            let expected = rational_to_f64(&b_poly(r, k as u32));
            out.push(relative(format!("b_poly_nu({r},0,{k})=b_poly({r},{k})"), expected, b_poly_nu(r, 0.0, k), 1e-12));
        }
    }

    for (nu, label) in RECURSION_NUS {
        for k in 1..=4usize {
            for r in 0..=10u32 {
                let case = |res: Result<(Number, Number)>, id: String| match res {
                    Ok((lhs, rhs)) => compare(id, lhs, rhs, 1e-12),
                    Err(e) => failed(id, f64::NAN, e),
                };
                out.push(case(index_raise(nu, k, r), format!("index-raise ν={label} k={k} r={r}")));
                out.push(case(split(nu, k, r), format!("split ν={label} k={k} r={r}")));
                for s in 1..=(4 - k).max(1) {
                    out.push(case(convolution(nu, k, s, r), format!("convolution ν={label} k={k} s={s} r={r}")));
                }
            }
        }
    }

    let points = [
        ExactRational::new((-2).into(), 1.into()),
        ExactRational::new((-1).into(), 3.into()),
        ExactRational::zero(),
        ExactRational::new(1.into(), 2.into()),
        rint(3),
    ];
    for r in 0..=10u32 {
        for x in &points {
            let two = rint(2);
            let args = [(x - ExactRational::one()) / &two, (x + ExactRational::one()) / &two];
            let got = l_poly(r, &args, Method::ClosedForm)
                .and_then(exact_value)
                .map(|v| v * ExactRational::from_integer(crate::scalarkit::factorial(r)));
            let expected = jacobi_poly(r, 0.0, 0.0, &Number::Exact(x.clone()));
            out.push(exact(
                format!("r!·l_r((x-1)/2,(x+1)/2)=P_r(x) r={r} x={x}"),
                expected.as_exact().unwrap(),
                got,
            ));
        }
    }

    let args = [ExactRational::new(1.into(), 2.into()), rint(3), rint(2)];
    for var in 0..args.len() {
        let lowered = (1..=10u32)
            .map(|r| {
                let hi = l_poly_coefficients(r, &args, var)?;
                let lo = l_poly_coefficients(r - 1, &args, var)?;
                let scaled: Vec<_> = lo.iter().map(|c| c * rint(i64::from(r))).collect();
                Ok(trim(laguerre_derivative(&hi)) != trim(scaled))
            })
            .collect::<Result<Vec<bool>>>()
            .map(|v| v.into_iter().filter(|m| *m).count());
        out.push(mismatches(format!("Laguerre lowering in x{} r≤10", var + 1), lowered));
    }

    for m in [0.1, 0.25, 0.5, 0.81] {
        let expected = elliptic_2f1_half(m).map(|k| k / std::f64::consts::PI.sqrt());
        let got = l_frac(-0.5, &[m, 1.0], L_FRAC_MAX_TERMS, 1e-16).map(|r| r.value);
        match expected {
            Ok(e) => out.push(relative(format!("l_-1/2({m},1)=2F1/√π"), e, got, 1e-12)),
            Err(err) => out.push(failed(format!("l_-1/2({m},1)"), f64::NAN, err)),
        }
    }
    out
}

const ORACLE_ORDERS: [u32; 3] = [0, 1, 2];
const ORACLE_SQUARES: [i64; 4] = [1, 2, 4, 9];
const ORACLE_TRUNC: u32 = 10;

/// Nondecreasing index sequences of length `n` over `0..base`.
fn multisets(n: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    loop {
        out.push(cur.clone());
        let Some(pos) = (0..n).rev().find(|&i| cur[i] + 1 < base) else {
            return out;
        };
        let next = cur[pos] + 1;
        for v in &mut cur[pos..] {
            *v = next;
        }
    }
}

fn grid_factor(idx: usize) -> (f64, i64) {
    (ORACLE_ORDERS[idx / ORACLE_SQUARES.len()] as f64, ORACLE_SQUARES[idx % ORACLE_SQUARES.len()])
}

/// Counts coefficient mismatches between an expansion route and the oracle
/// across every multiset of factors.
fn oracle_grid(n: usize, method: Method) -> Result<usize> {
    let mut bad = 0;
    for combo in multisets(n, ORACLE_ORDERS.len() * ORACLE_SQUARES.len()) {
        let (orders, squares): (Vec<f64>, Vec<i64>) = combo.into_iter().map(grid_factor).unzip();
        let orders = OrderSpec(orders);
        let scales = ScaleSpec(
            squares
                .iter()
                .map(|&s| Scale::from_square(rint(s)))
                .collect::<Result<Vec<_>>>()?,
        );
        let got = product_expansion_with(&orders, &scales, ORACLE_TRUNC, method)?;
        let want = oracle_cauchy_product(&orders, &scales, ORACLE_TRUNC)?;
        match (got.coeffs.as_exact(), want.coeffs.as_exact()) {
            (Some(g), Some(w)) => bad += g.iter().zip(w).filter(|(a, b)| a != b).count(),
            _ => bad += got.coeffs.len(),
        }
    }
    Ok(bad)
}

fn series_u2(orders: &[f64], scales: ScaleSpec) -> Result<ExactRational> {
    let s = product_expansion(&OrderSpec(orders.to_vec()), &scales, 4)?;
    s.coeffs
        .as_exact()
        .map(|c| c[2].clone())
        .ok_or_else(|| Error::Domain("expected exact coefficients".into()))
}

fn products_cases() -> Vec<CaseDetail> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for (method, label) in [(Method::Recursion, "recursion"), (Method::ClosedForm, "closed form")] {
            out.push(mismatches(
                format!("oracle-equivalence grid n={n} ({label}), orders {{0,1,2}}, a² ∈ {{1,2,4,9}}, r≤{ORACLE_TRUNC}"),
                oracle_grid(n, method),
            ));
        }
    }

    out.push(exact(
        "J0(x)² u² coefficient = 3/2",
        &ExactRational::new(3.into(), 2.into()),
        ScaleSpec::from_ints(&[1, 1]).and_then(|s| series_u2(&[0.0, 0.0], s)),
    ));
    out.push(exact(
        "J0(√2x) u² coefficient = 1",
        &ExactRational::one(),
        Scale::from_square(rint(2)).and_then(|s| series_u2(&[0.0], ScaleSpec(vec![s]))),
    ));

    let pointwise = [(vec![0.0, 1.0], vec![1, 2]), (vec![2.0, 0.0, 1.0], vec![1, 3, 2]), (vec![0.5, 1.5], vec![2, 1])];
    for (nus, a) in pointwise {
        let orders = OrderSpec(nus.clone());
        for x in [0.3, 0.7, 1.5] {
            let id = format!("eval vs direct product ν={nus:?} a={a:?} x={x}");
            let res = (|| {
                let scales = ScaleSpec::from_ints(&a)?;
                let series = product_expansion(&orders, &scales, 40)?;
                let e = eval_product(&series, x, 1e-15)?.value;
                let d = direct_product(&orders, &scales, x, 1e-17)?.value;
                Ok((d, e))
            })();
            out.push(match res {
                Ok((d, e)) => relative(id, d, Ok(e), 1e-12),
                Err(err) => failed(id, f64::NAN, err),
            });
        }
    }

    for a in [vec![1, 2], vec![1, 1, 3]] {
        let trunc = 8;
        let res = (|| {
            let scales = ScaleSpec::from_ints(&a)?;
            let poly = x_polynomial(&product_expansion(&OrderSpec::zeros(a.len()), &scales, trunc)?)?;
            (0..=6u32)
                .map(|n| {
                    let termwise = differentiate(&poly, n);
                    let hermite = derivative_coefficients(n, &scales, trunc)?;
                    let complete = (2 * trunc - n) as usize;
                    Ok(termwise[..=complete] != hermite[..=complete])
                })
                .collect::<Result<Vec<bool>>>()
                .map(|v| v.into_iter().filter(|m| *m).count())
        })();
        out.push(mismatches(format!("Hermite-route derivative = termwise, a={a:?}, n≤6"), res));
    }

    let orders_set = [(vec![0.0, 0.0], "(0,0)"), (vec![1.0, 0.0], "(1,0)"), (vec![0.5, 0.5], "(1/2,1/2)")];
    for (nus, label) in orders_set {
        let orders = OrderSpec(nus);
        for t in [0.25, 1.0, 2.0] {
            for x in [[0.5, 1.0], [1.0, 2.0], [2.0, 0.25]] {
                out.push(absolute(
                    format!("generating function ν={label} t={t} x={x:?} R=25"),
                    0.0,
                    generating_check(&orders, &x, t, 25),
                    1e-12,
                ));
            }
        }
    }
    out
}

fn integrals_cases() -> Vec<CaseDetail> {
    let mut out = Vec::new();
    let closed = integral_two_j0(1.0, 0.5);
    if let Ok(c) = closed {
        out.push(absolute(
            "∫J0(x)J0(x/2): closed form vs quadrature",
            c,
            integral_two_j0_quadrature(1.0, 0.5, 1e-9).map(|q| q.value),
            1e-5,
        ));
        out.push(relative(
            "∫J0(x)J0(x/2): closed form vs 2√π·l_-1/2(1/4,1)",
            c,
            integral_two_j0_series(1.0, 0.5, 1e-16).map(|r| r.value),
            1e-10,
        ));
    } else if let Err(e) = closed {
        out.push(failed("∫J0(x)J0(x/2) closed form".into(), f64::NAN, e));
    }

    match integral_n_bessel(&[1.0, 1.0, 3.0], 1e-15) {
        Ok(series) => out.push(absolute(
            "∫J0(x)J0(x)J0(3x): series vs quadrature",
            series.value,
            integral_n_bessel_quadrature(&[1.0, 1.0, 3.0], 1e-9).map(|q| q.value),
            1e-5,
        )),
        Err(e) => out.push(failed("∫J0(x)J0(x)J0(3x) series".into(), f64::NAN, e)),
    }
    let rejected = matches!(integral_n_bessel(&[1.0, 2.0, 3.0], 1e-12), Err(Error::Divergence { .. }));
    out.push(mismatches("scales (1,2,3) rejected as divergent", Ok(usize::from(!rejected))));
    let rejected = matches!(integral_two_j0(1.0, 1.0), Err(Error::Divergence { .. }));
    out.push(mismatches("scales (1,1) rejected as divergent", Ok(usize::from(!rejected))));

    for lambda in [0.5, 2.0, 7.0] {
        let base = integral_two_j0(3.0, 2.0);
        let scaled = integral_two_j0(3.0 * lambda, 2.0 * lambda);
        match base {
            Ok(b) => out.push(relative(format!("scaling law λ={lambda}"), b / lambda, scaled, 1e-12)),
            Err(e) => out.push(failed(format!("scaling law λ={lambda}"), f64::NAN, e)),
        }
    }

    for beta in [0.25, 1.0, 4.0] {
        let id = format!("Gaussian transform of I_0,0, β={beta}");
        match humbert_gauss_transform(beta, 1e-10) {
            Ok(t) => out.push(relative(id, t.rhs, Ok(t.lhs), 1e-8)),
            Err(e) => out.push(failed(id, f64::NAN, e)),
        }
    }

    let tol = 1e-17;
    for (m1, m2) in [(0, 0), (1, 2), (3, 1)] {
        for x in [-1.0, 0.5, 2.0] {
            let id = format!("d/dx I_{m1},{m2} = I_{},{} at x={x}", m1 + 1, m2 + 1);
            let res = (|| {
                let f = |x: f64| humbert(m1, m2, x, tol).map(|r| r.value);
                let h = 1e-3;
                let d = |h: f64| Ok::<f64, Error>((f(x + h)? - f(x - h)?) / (2.0 * h));
                let richardson = (4.0 * d(h / 2.0)? - d(h)?) / 3.0;
                Ok((humbert(m1 + 1, m2 + 1, x, tol)?.value, richardson))
            })();
            out.push(match res {
                Ok((target, fd)) => relative(id, target, Ok(fd), 1e-6),
                Err(e) => failed(id, f64::NAN, e),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_counts() {
        assert_eq!(multisets(1, 12).len(), 12);
        assert_eq!(multisets(2, 12).len(), 78);
        assert_eq!(multisets(4, 12).len(), 1365);
        assert!(multisets(3, 4).iter().all(|m| m.windows(2).all(|w| w[0] <= w[1])));
    }

    #[test]
    fn suites_pass() {
        for suite in [Suite::Lpoly, Suite::Products, Suite::Integrals] {
            let report = run_suite(suite);
            let bad: Vec<_> = report.details.iter().filter(|d| !d.passed).collect();
            assert!(bad.is_empty(), "{suite}: {bad:#?}");
            assert!(report.worst_residual <= report.tolerance);
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::Lpoly, Suite::Products, Suite::Integrals, Suite::All] {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        let lp = run_suite(Suite::Lpoly);
        assert!(lp.details.iter().any(|d| d.id == "B_r(2)=binom(2r,r), r≤20"));
    }
}
