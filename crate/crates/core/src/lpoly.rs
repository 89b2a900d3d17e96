//! The l-polynomial family and the classical polynomials it connects to.
//!
//! All forms share one normalization:
//!
//! ```text
//! l_r^{(ν₁…νₙ)}(x₁…xₙ) = Σ_{k₁+…+kₙ=r} r!/(k₁!…kₙ!) · Π xᵢ^{kᵢ}/Γ(νᵢ+kᵢ+1)
//! ```
//!
//! which for all `νᵢ = 0` is `l_r(x) = r! Σ Π xᵢ^{kᵢ}/(kᵢ!)²`. With this
//! normalization `Σ_r tʳ/r! · l_r^{(ν)}(x) = Π C_{νᵢ}(t xᵢ)`, and the product
//! `Π J_{νᵢ}(aᵢ x)` has the coefficients `(-1)^r/r! · l_r^{(ν)}(a²)` in `(x/2)^{2r}`.
//!
//! Values are exact rationals whenever every order is a nonnegative integer
//! and every argument is rational; otherwise they are doubles.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::scalarkit::{binomial_int, factorial, gamma, recip_gamma};
use crate::types::{
    as_nonneg_int, rint, EvalReport, ExactRational, LIndex, LValue, Number, OrderSpec, Provenance,
};

/// Arithmetic needed by the coefficient kernels; implemented for exact
/// rationals and doubles.
pub(crate) trait Coef:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_big(n: BigInt) -> Self;

    fn from_u64(n: u64) -> Self {
        Self::from_big(BigInt::from(n))
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Coef for ExactRational {
    fn from_big(n: BigInt) -> Self {
        ExactRational::from_integer(n)
    }

    fn pow(&self, e: u32) -> Self {
        num_traits::pow::Pow::pow(self, e)
    }
}

impl Coef for f64 {
    fn from_big(n: BigInt) -> Self {
        num_traits::ToPrimitive::to_f64(&n).unwrap_or(f64::INFINITY)
    }

    fn pow(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

/// Evaluation route for the integer-index l-polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Multinomial sum over all compositions of `r`.
    ClosedForm,
    /// Peel off the last variable: `l_r(x) = Σ_s C(r,s) x_n^{r-s}/Γ(ν_n+r-s+1) · l_s(x₁…x_{n-1})`.
    Recursion,
}

impl Method {
    fn provenance(self) -> Provenance {
        match self {
            Method::ClosedForm => Provenance::ClosedForm,
            Method::Recursion => Provenance::Recursion,
        }
    }
}

/// Orders and arguments of an l-polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct LPolySpec {
    orders: OrderSpec,
    args: Vec<Number>,
}

impl LPolySpec {
    pub fn new(orders: OrderSpec, args: Vec<Number>) -> Result<Self> {
        if orders.is_empty() {
            return domain("an l-polynomial needs at least one variable");
        }
        if orders.len() != args.len() {
            return domain(format!(
                "{} orders but {} arguments",
                orders.len(),
                args.len()
            ));
        }
        Ok(LPolySpec { orders, args })
    }

    /// All orders zero, exact arguments.
    pub fn plain(args: &[ExactRational]) -> Result<Self> {
        Self::new(
            OrderSpec::zeros(args.len()),
            args.iter().cloned().map(Number::Exact).collect(),
        )
    }

    pub fn orders(&self) -> &OrderSpec {
        &self.orders
    }

    pub fn args(&self) -> &[Number] {
        &self.args
    }

    pub fn len(&self) -> usize {
        self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.args.is_empty()
    }

    fn exact_parts(&self) -> Option<(Vec<u32>, Vec<ExactRational>)> {
        let orders = self.orders.as_nonneg_integers()?;
        let args = self
            .args
            .iter()
            .map(|a| a.as_exact().cloned())
            .collect::<Option<Vec<_>>>()?;
        Some((orders, args))
    }
}

/// `1/Γ(ν+k+1)` for `k = 0..=max`, exact.
fn exact_recip_gamma_table(nu: u32, max: u32) -> Vec<ExactRational> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut fact = factorial(nu);
    for k in 0..=max {
        if k > 0 {
            fact *= BigInt::from(nu + k);
        }
        out.push(ExactRational::new(BigInt::one(), fact.clone()));
    }
    out
}

/// `1/Γ(ν+k+1)` for `k = 0..=max`, floating.
fn real_recip_gamma_table(nu: f64, max: u32) -> Vec<f64> {
    (0..=max).map(|k| recip_gamma(nu + k as f64 + 1.0)).collect()
}

/// Multinomial closed form for a single index.
pub(crate) fn l_closed<T: Coef>(r: u32, args: &[T], weights: &[Vec<T>]) -> T {
    let n = args.len();
    let powers: Vec<Vec<T>> = args
        .iter()
        .map(|x| {
            let mut p = Vec::with_capacity(r as usize + 1);
            let mut acc = T::one();
            for _ in 0..=r {
                p.push(acc.clone());
                acc = acc * x.clone();
            }
            p
        })
        .collect();
    let r_fact = factorial(r);
    let mut total = T::zero();
    let mut parts = vec![0u32; n];
    // odometer over compositions (k₁..kₙ) with Σk = r; the last part absorbs the remainder
    loop {
        let used: u32 = parts[..n - 1].iter().sum();
        if used <= r {
            parts[n - 1] = r - used;
            let denom = parts.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
            let mut term = T::from_big(&r_fact / denom);
            for (i, &k) in parts.iter().enumerate() {
                term = term * powers[i][k as usize].clone() * weights[i][k as usize].clone();
            }
            total = total + term;
        }
        // advance the first n-1 digits
        let mut i = 0;
        loop {
            if i + 1 >= n {
                return total;
            }
            parts[i] += 1;
            let used: u32 = parts[..n - 1].iter().sum();
            if used <= r {
                break;
            }
            parts[i] = 0;
            i += 1;
        }
    }
}

/// Exact multinomial closed form. Each variable's factor `aᵏ/(k!(ν+k)!)` is
/// put over one denominator per variable so the sum over compositions runs
/// on integers and is normalized once.
fn l_closed_exact(r: u32, args: &[ExactRational], orders: &[u32]) -> ExactRational {
    let n = args.len();
    let r_fact = factorial(r);
    let mut denominator = BigInt::one();
    let numerators: Vec<Vec<BigInt>> = args
        .iter()
        .zip(orders)
        .map(|(a, &nu)| {
            let (p, q) = (a.numer(), a.denom());
            let top = factorial(nu + r);
            denominator *= num_traits::pow(q.clone(), r as usize) * &r_fact * &top;
            let mut p_pow = BigInt::one();
            (0..=r)
                .map(|k| {
                    if k > 0 {
                        p_pow *= p;
                    }
                    let q_pow = num_traits::pow(q.clone(), (r - k) as usize);
                    &p_pow * q_pow * (&r_fact / factorial(k)) * (&top / factorial(nu + k))
                })
                .collect()
        })
        .collect();
    let mut total = BigInt::zero();
    let mut parts = vec![0u32; n];
    loop {
        let used: u32 = parts[..n - 1].iter().sum();
        if used <= r {
            parts[n - 1] = r - used;
            let term = parts
                .iter()
                .enumerate()
                .fold(BigInt::one(), |acc, (i, &k)| acc * &numerators[i][k as usize]);
            total += term;
        }
        let mut i = 0;
        loop {
            if i + 1 >= n {
                return ExactRational::new(total * r_fact, denominator);
            }
            parts[i] += 1;
            let used: u32 = parts[..n - 1].iter().sum();
            if used <= r {
                break;
            }
            parts[i] = 0;
            i += 1;
        }
    }
}

/// All values `l_0 ..= l_max` by peeling one variable at a time.
pub(crate) fn l_sequence<T: Coef>(max: u32, args: &[T], weights: &[Vec<T>]) -> Vec<T> {
    let m = max as usize;
    // zero variables: l_s() = δ_{s,0}
    let mut current: Vec<T> = (0..=m).map(|s| if s == 0 { T::one() } else { T::zero() }).collect();
    let binoms: Vec<Vec<T>> = (0..=max)
        .map(|r| (0..=r).map(|s| T::from_big(binomial_int(r, s))).collect())
        .collect();
    for (x, w) in args.iter().zip(weights) {
        let mut xp = Vec::with_capacity(m + 1);
        let mut acc = T::one();
        for j in 0..=m {
            xp.push(acc.clone() * w[j].clone());
            acc = acc * x.clone();
        }
        let next: Vec<T> = (0..=m)
            .map(|r| {
                (0..=r).fold(T::zero(), |sum, s| {
                    sum + binoms[r][s].clone() * xp[r - s].clone() * current[s].clone()
                })
            })
            .collect();
        current = next;
    }
    current
}

/// Plain l-polynomial (all orders zero) at exact arguments.
pub fn l_poly(r: u32, args: &[ExactRational], method: Method) -> Result<LValue> {
    let spec = LPolySpec::plain(args)?;
    l_poly_nu_with(r, &spec, method)
}

/// ν-indexed l-polynomial, closed form.
pub fn l_poly_nu(r: u32, spec: &LPolySpec) -> Result<LValue> {
    l_poly_nu_with(r, spec, Method::ClosedForm)
}

pub fn l_poly_nu_with(r: u32, spec: &LPolySpec, method: Method) -> Result<LValue> {
    let value = match spec.exact_parts() {
        Some((orders, args)) => {
            Number::Exact(match method {
                Method::ClosedForm => l_closed_exact(r, &args, &orders),
                Method::Recursion => {
                    let weights: Vec<_> = orders.iter().map(|&nu| exact_recip_gamma_table(nu, r)).collect();
                    l_sequence(r, &args, &weights).pop().unwrap()
                }
            })
        }
        None => {
            check_real_orders(spec.orders())?;
            let args: Vec<f64> = spec.args.iter().map(Number::to_f64).collect();
            let weights: Vec<_> = spec.orders.iter().map(|nu| real_recip_gamma_table(nu, r)).collect();
            Number::Real(match method {
                Method::ClosedForm => l_closed(r, &args, &weights),
                Method::Recursion => l_sequence(r, &args, &weights).pop().unwrap(),
            })
        }
    };
    Ok(LValue {
        value,
        index: LIndex::Integer(r),
        provenance: method.provenance(),
    })
}

fn check_real_orders(orders: &OrderSpec) -> Result<()> {
    if let Some(bad) = orders.iter().find(|nu| !nu.is_finite()) {
        return domain(format!("order {bad} is not finite"));
    }
    Ok(())
}

/// `l_0 ..= l_max` for one spec, computed with the recursion.
pub fn l_poly_nu_sequence(max: u32, spec: &LPolySpec) -> Result<Vec<Number>> {
    Ok(match spec.exact_parts() {
        Some((orders, args)) => {
            let weights: Vec<_> = orders.iter().map(|&nu| exact_recip_gamma_table(nu, max)).collect();
            l_sequence(max, &args, &weights).into_iter().map(Number::Exact).collect()
        }
        None => {
            check_real_orders(spec.orders())?;
            let args: Vec<f64> = spec.args.iter().map(Number::to_f64).collect();
            let weights: Vec<_> = spec.orders.iter().map(|nu| real_recip_gamma_table(nu, max)).collect();
            l_sequence(max, &args, &weights).into_iter().map(Number::Real).collect()
        }
    })
}

/// Orders `(ν₁…ν_k)` of the homogeneous form `l_r^{(ν₁…ν_k)}(1,…,1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogIndex {
    nu_vector: Vec<f64>,
}

impl HomogIndex {
    pub fn new(nu_vector: Vec<f64>) -> Result<Self> {
        if nu_vector.is_empty() {
            return domain("the factor count k must be at least 1");
        }
        Ok(HomogIndex { nu_vector })
    }

    /// `{ν}` repeated `k` times.
    pub fn uniform(nu: f64, k: usize) -> Result<Self> {
        Self::new(vec![nu; k])
    }

    /// `{ν + 1_j}`: the uniform index with entry `j` raised by one.
    pub fn raised(nu: f64, k: usize, j: usize) -> Result<Self> {
        let mut v = Self::uniform(nu, k)?;
        match v.nu_vector.get_mut(j) {
            Some(entry) => *entry += 1.0,
            None => return domain(format!("raised position {j} out of range for k = {k}")),
        }
        Ok(v)
    }

    pub fn k(&self) -> usize {
        self.nu_vector.len()
    }

    pub fn nu_vector(&self) -> &[f64] {
        &self.nu_vector
    }

    fn spec(&self) -> LPolySpec {
        LPolySpec {
            orders: OrderSpec(self.nu_vector.clone()),
            args: vec![Number::Exact(ExactRational::one()); self.k()],
        }
    }
}

/// `l_r^{{ν}}(k)`: the ν-indexed polynomial with every argument equal to one.
pub fn l_homog(r: u32, idx: &HomogIndex) -> Result<LValue> {
    l_poly_nu(r, &idx.spec())
}

/// Default cap on the number of terms for [`l_frac`].
pub const L_FRAC_MAX_TERMS: usize = 2000;

/// Fractional-index l-polynomial
///
/// ```text
/// l_ν(x₁…xₙ) = Γ(ν+1) Σ_s xₙ^{ν-s} l_s(x₁…x_{n-1}) / (s! Γ(ν+1-s)²)
/// ```
///
/// The last argument must dominate: the series converges iff
/// `ρ = (Σ_{i<n} √xᵢ)² / xₙ < 1`. Summation stops once three consecutive terms
/// fall below `tol` relative to the running sum.
pub fn l_frac(nu: f64, args: &[f64], max_terms: usize, tol: f64) -> Result<EvalReport> {
    if args.is_empty() {
        return domain("l_frac needs at least one argument");
    }
    if !nu.is_finite() {
        return domain("l_frac order must be finite");
    }
    if !(tol > 0.0) {
        return domain("l_frac tolerance must be positive");
    }
    if let Some(bad) = args.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return domain(format!("l_frac arguments must be positive, got {bad}"));
    }
    let (rest, last) = args.split_at(args.len() - 1);
    let dominant = last[0];
    let ratios: Vec<f64> = rest.iter().map(|x| x / dominant).collect();
    let rho = ratios.iter().map(|y| y.sqrt()).sum::<f64>().powi(2);
    if rho >= 1.0 {
        return Err(Error::Divergence {
            rho,
            condition: "(Σ_{i<n} √x_i)² < x_n required for the fractional l series".into(),
        });
    }

    // ln s! for the squared binomials
    let mut ln_fact = vec![0.0f64; max_terms + 1];
    for s in 1..=max_terms {
        ln_fact[s] = ln_fact[s - 1] + (s as f64).ln();
    }
    // log_g[m][s] = ln G_s over the first m+1 ratios, G_s = (s!)² l_s(y)/s!
    let mut log_g: Vec<Vec<f64>> = vec![Vec::with_capacity(max_terms); ratios.len()];

    let prefactor = dominant.powf(nu);
    let mut falling = 1.0; // binom(ν, s)
    let mut recip = recip_gamma(nu + 1.0); // 1/(s! Γ(ν+1-s))
    let mut sum = 0.0;
    let mut small_run = 0;
    let mut last_term = 0.0;
    for s in 0..max_terms {
        if s > 0 {
            let sf = s as f64;
            falling *= (nu - sf + 1.0) / sf;
            recip *= (nu + 1.0 - sf) / sf;
        }
        let g = if ratios.is_empty() {
            if s == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            for m in 0..ratios.len() {
                let ln_y = ratios[m].ln();
                let lg = if m == 0 {
                    s as f64 * ln_y
                } else {
                    let prev = &log_g[m - 1];
                    let total: f64 = (0..=s)
                        .map(|j| {
                            let lb = ln_fact[s] - ln_fact[j] - ln_fact[s - j];
                            (2.0 * lb + (s - j) as f64 * ln_y + prev[j]).exp()
                        })
                        .sum();
                    total.ln()
                };
                log_g[m].push(lg);
            }
            log_g[ratios.len() - 1][s].exp()
        };
        let term = prefactor * g * falling * recip;
        sum += term;
        last_term = term.abs();
        if last_term <= tol * sum.abs() || (sum == 0.0 && last_term == 0.0) {
            small_run += 1;
            if small_run >= 3 {
                return Ok(EvalReport {
                    value: sum,
                    terms_used: s + 1,
                    last_term,
                    converged: true,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        best: sum,
        error_estimate: last_term,
        iterations: max_terms,
    })
}

/// [`l_frac`] packaged as an [`LValue`] with fractional-series provenance.
pub fn l_frac_value(nu: f64, args: &[f64], max_terms: usize, tol: f64) -> Result<LValue> {
    let report = l_frac(nu, args, max_terms, tol)?;
    Ok(LValue {
        value: Number::Real(report.value),
        index: LIndex::Real(nu),
        provenance: Provenance::FractionalSeries,
    })
}

/// `B_n(m) = Σ_s C(n,s)² B_s(m-1)` with `B_n(0) = δ_{n,0}`.
pub fn b_poly(n: u32, m: u32) -> ExactRational {
    let size = n as usize + 1;
    let mut current: Vec<BigInt> = (0..size)
        .map(|i| if i == 0 { BigInt::one() } else { BigInt::zero() })
        .collect();
    for _ in 0..m {
        current = (0..size as u32)
            .map(|q| {
                (0..=q).fold(BigInt::zero(), |acc, s| {
                    let b = binomial_int(q, s);
                    acc + &b * &b * &current[s as usize]
                })
            })
            .collect();
    }
    ExactRational::from_integer(current.swap_remove(n as usize))
}

/// `B_r^{(ν)}(k) = Γ(ν+1)^{k-1} Γ(r+ν+1) l_r^{{ν}}(k)`.
pub fn b_poly_nu(r: u32, nu: f64, k: usize) -> Result<f64> {
    if !(nu > -1.0) {
        return domain(format!("b_poly_nu requires ν > -1, got {nu}"));
    }
    let l = l_homog(r, &HomogIndex::uniform(nu, k)?)?.to_f64();
    Ok(gamma(nu + 1.0).powi(k as i32 - 1) * gamma(r as f64 + nu + 1.0) * l)
}

/// Generalized binomial `C(top, s)` as a falling factorial over `s!`.
fn gen_binomial<T: Coef>(top: T, s: u32) -> T {
    let mut acc = T::one();
    let mut t = top;
    for i in 1..=s {
        acc = acc * t.clone() / T::from_u64(i as u64);
        t = t - T::one();
    }
    acc
}

fn jacobi_sum<T: Coef>(n: u32, alpha: T, beta: T, x: T) -> T {
    let two = T::from_u64(2);
    let lower = (x.clone() - T::one()) / two.clone();
    let upper = (x + T::one()) / two;
    let n_t = T::from_u64(n as u64);
    (0..=n).fold(T::zero(), |acc, s| {
        acc + gen_binomial(n_t.clone() + alpha.clone(), s)
            * gen_binomial(n_t.clone() + beta.clone(), n - s)
            * lower.pow(n - s)
            * upper.pow(s)
    })
}

/// Jacobi polynomial `P_n^{(α,β)}(x) = Σ_s C(n+α,s) C(n+β,n-s) ((x-1)/2)^{n-s} ((x+1)/2)^s`.
/// Exact when `α`, `β` are integers and `x` is exact.
pub fn jacobi_poly(n: u32, alpha: f64, beta: f64, x: &Number) -> Number {
    let int = |v: f64| (v.fract() == 0.0 && v.abs() < 1e15).then(|| rint(v as i64));
    match (int(alpha), int(beta), x.as_exact()) {
        (Some(a), Some(b), Some(xq)) => Number::Exact(jacobi_sum(n, a, b, xq.clone())),
        _ => Number::Real(jacobi_sum(n, alpha, beta, x.to_f64())),
    }
}

/// Two-variable Laguerre polynomial `L_n(x,y) = n! Σ_s (-x)^s y^{n-s} / ((s!)² (n-s)!)`.
pub fn laguerre2(n: u32, x: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    // term_s = n! (-x)^s y^{n-s} / ((s!)² (n-s)!) = C(n,s) (-x)^s y^{n-s} / s!
    let mut binom_over_fact = 1.0;
    for s in 0..=n {
        if s > 0 {
            binom_over_fact *= (n - s + 1) as f64 / (s as f64 * s as f64);
        }
        sum += binom_over_fact * (-x).powi(s as i32) * y.powi((n - s) as i32);
    }
    sum
}

/// The Laguerre derivative `∂ₓ x ∂ₓ` on a coefficient list: `c_k x^k ↦ k² c_k x^{k-1}`.
pub fn laguerre_derivative(coeffs: &[ExactRational]) -> Vec<ExactRational> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * rint((k * k) as i64))
        .collect()
}

/// `l_r(x)` as a polynomial in `args[var]` with the remaining arguments fixed;
/// entry `k` is the coefficient of `x_var^k`, namely `C(r,k)/k! · l_{r-k}(rest)`.
pub fn l_poly_coefficients(r: u32, args: &[ExactRational], var: usize) -> Result<Vec<ExactRational>> {
    if var >= args.len() {
        return domain(format!("variable {var} out of range for {} arguments", args.len()));
    }
    let rest: Vec<ExactRational> = args
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != var)
        .map(|(_, a)| a.clone())
        .collect();
    let rest_weights: Vec<_> = rest.iter().map(|_| exact_recip_gamma_table(0, r)).collect();
    let rest_values = l_sequence(r, &rest, &rest_weights);
    Ok((0..=r)
        .map(|k| {
            ExactRational::new(binomial_int(r, k), factorial(k)) * rest_values[(r - k) as usize].clone()
        })
        .collect())
}

/// Drop trailing zero coefficients.
pub fn trim(mut coeffs: Vec<ExactRational>) -> Vec<ExactRational> {
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    coeffs
}

/// `true` when every order is a nonnegative integer.
pub fn orders_are_integral(orders: &[f64]) -> bool {
    orders.iter().all(|&nu| as_nonneg_int(nu).is_some())
}
