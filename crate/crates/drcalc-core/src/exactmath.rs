//! Exact rational arithmetic, Bernoulli polynomials, truncated graded rings,
//! and polynomial interpolation in the root order `r`.
//!
//! Every quantity in this crate is an arbitrary-precision rational; no
//! floating point is used anywhere. This module provides:
//!
//! * [`Rational`] — alias for `num_rational::BigRational`, with `p/q`
//!   string parsing/formatting helpers used by all JSON layers,
//! * [`RPoly`] — dense polynomials in `r` with rational coefficients,
//! * Bernoulli numbers/polynomials ([`bernoulli_number`],
//!   [`bernoulli_poly`], [`homog_bernoulli`]) via the memoized triangular
//!   recursion,
//! * [`Trunc`] — a minimal interface for truncated graded commutative
//!   algebras, with [`exp_trunc`], [`log_trunc`], [`chern_from_ch`] and its
//!   inverse [`ch_from_chern`] written once against the trait,
//! * [`interpolate_r`] — exact Lagrange interpolation with mandatory
//!   verification points (stabilization check),
//! * small integer utilities (factorials, double factorials, binomials,
//!   prime streams) shared by the combinatorial layers.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use std::fmt;
use std::sync::Mutex;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Build a rational from an integer numerator and denominator.
///
/// Panics if `den == 0` (programming error, not input error).
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn rat_i(num: i64) -> Rational {
    Rational::from_integer(BigInt::from(num))
}

/// Parse `"p"` or `"p/q"` (optionally signed) into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::Validation(format!("malformed integer `{t}` in rational `{s}`")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Validation(format!("zero denominator in `{s}`")));
            }
            Ok(Rational::new(parse_int(p)?, den))
        }
    }
}

/// Format a rational as `"p"` (integer) or `"p/q"` with `q > 0`.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `r^exp` as an exact rational, supporting negative exponents (`r > 0`).
pub fn pow_r(r: u64, exp: i64) -> Rational {
    let base = Rational::from_integer(BigInt::from(r));
    if exp >= 0 {
        let mut acc = Rational::one();
        for _ in 0..exp {
            acc *= &base;
        }
        acc
    } else {
        let mut acc = Rational::one();
        for _ in 0..(-exp) {
            acc /= &base;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Integer utilities
// ---------------------------------------------------------------------------

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Double factorial `k!!` with the conventions `(-1)!! = 1`, `0!! = 1`.
///
/// Panics on `k < -1` (never produced by the recursions that call this).
pub fn double_factorial(k: i64) -> BigInt {
    assert!(k >= -1, "double factorial undefined below -1");
    let mut acc = BigInt::one();
    let mut m = k;
    while m > 1 {
        acc *= m;
        m -= 2;
    }
    acc
}

/// Binomial coefficient `C(n, k)` as a big integer (0 when `k > n`).
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    num / den
}

/// Deterministic primality test by trial division (inputs here are small).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The first `count` primes strictly greater than `threshold`, ascending.
pub fn primes_above(threshold: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = threshold + 1;
    while out.len() < count {
        if is_prime(candidate) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

// ---------------------------------------------------------------------------
// Bernoulli numbers and polynomials
// ---------------------------------------------------------------------------

static BERNOULLI_CACHE: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| Mutex::new(Vec::new()));

/// The Bernoulli number `B_n` (convention `B_1 = -1/2`), memoized.
///
/// Computed by the triangular recursion
/// `sum_{k=0}^{n} C(n+1, k) B_k = 0` for `n >= 1`, `B_0 = 1`.
pub fn bernoulli_number(n: usize) -> Rational {
    let mut cache = BERNOULLI_CACHE.lock().expect("bernoulli cache poisoned");
    if cache.is_empty() {
        cache.push(Rational::one());
    }
    while cache.len() <= n {
        let m = cache.len(); // computing B_m
        let mut acc = Rational::zero();
        for (k, b) in cache.iter().enumerate() {
            acc += Rational::from_integer(binomial(m + 1, k)) * b;
        }
        let value = -acc / Rational::from_integer(BigInt::from(m as i64 + 1));
        cache.push(value);
    }
    cache[n].clone()
}

/// Coefficients of the Bernoulli polynomial `B_n(x)`, ascending in `x`:
/// `B_n(x) = sum_k C(n, k) B_{n-k} x^k`.
pub fn bernoulli_poly(n: usize) -> Vec<Rational> {
    (0..=n)
        .map(|k| Rational::from_integer(binomial(n, k)) * bernoulli_number(n - k))
        .collect()
}

/// Evaluate `B_n(x)` at a rational point by Horner's rule.
pub fn bernoulli_eval(n: usize, x: &Rational) -> Rational {
    let coeffs = bernoulli_poly(n);
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Coefficients of the homogenized Bernoulli polynomial
/// `HB_n(z, w) = B_n(z/w) w^n`; entry `k` is the coefficient of
/// `z^k w^{n-k}`.
pub fn homog_bernoulli(n: usize) -> Vec<Rational> {
    bernoulli_poly(n)
}

/// Evaluate `HB_n(z, w)` at rational arguments.
pub fn homog_bernoulli_eval(n: usize, z: &Rational, w: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut zpow = Rational::one();
    for (k, c) in homog_bernoulli(n).iter().enumerate() {
        let mut wpow = Rational::one();
        for _ in 0..(n - k) {
            wpow *= w;
        }
        acc += c * &zpow * wpow;
        zpow *= z;
    }
    acc
}

// ---------------------------------------------------------------------------
// Polynomials in r
// ---------------------------------------------------------------------------

/// Dense polynomial in the root order `r`, rational coefficients ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RPoly {
    coeffs: Vec<Rational>,
}

impl RPoly {
    /// Construct from ascending coefficients, trimming trailing zeros.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = RPoly { coeffs };
        p.trim();
        p
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        RPoly { coeffs: Vec::new() }
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Rational) -> Self {
        RPoly::new(vec![c])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// True when all coefficients vanish.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficient of `r^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant term (coefficient of `r^0`).
    pub fn constant_term(&self) -> Rational {
        self.coeff(0)
    }

    /// Ascending coefficient slice.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Evaluate at a rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Evaluate at an integer `r`.
    pub fn eval_u64(&self, r: u64) -> Rational {
        self.eval(&Rational::from_integer(BigInt::from(r)))
    }

    /// Sum of two polynomials.
    pub fn add(&self, rhs: &RPoly) -> RPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        RPoly::new(out)
    }

    /// Product of two polynomials.
    pub fn mul(&self, rhs: &RPoly) -> RPoly {
        if self.is_zero() || rhs.is_zero() {
            return RPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RPoly::new(out)
    }

    /// Multiply all coefficients by a scalar.
    pub fn scale(&self, c: &Rational) -> RPoly {
        RPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }
}

impl fmt::Display for RPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "{}*r", format_rational(c))?,
                _ => write!(f, "{}*r^{}", format_rational(c), k)?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Truncated graded algebras: exp / log / Chern conversions
// ---------------------------------------------------------------------------

/// Minimal interface for a truncated graded commutative algebra over the
/// rationals. Products are truncated by the implementor; `t_graded_piece`
/// extracts the homogeneous component of a given degree.
pub trait Trunc: Clone {
    /// Multiplicative identity of the ambient truncated ring.
    fn t_one(&self) -> Self;
    /// Additive identity.
    fn t_zero(&self) -> Self;
    /// Sum.
    fn t_add(&self, rhs: &Self) -> Self;
    /// Truncating product.
    fn t_mul(&self, rhs: &Self) -> Self;
    /// Scalar multiple.
    fn t_scale(&self, c: &Rational) -> Self;
    /// Homogeneous component of degree `m`.
    fn t_graded_piece(&self, m: usize) -> Self;
    /// True when the element is zero.
    fn t_is_zero(&self) -> bool;
}

/// Truncated exponential `1 + x + x^2/2! + ...`, stopping after
/// `max_power` powers or as soon as a power vanishes (nilpotency).
pub fn exp_trunc<T: Trunc>(x: &T, max_power: usize) -> T {
    let mut acc = x.t_one();
    let mut power = x.t_one();
    let mut fact = Rational::one();
    for j in 1..=max_power {
        power = power.t_mul(x);
        if power.t_is_zero() {
            break;
        }
        fact *= rat_i(j as i64);
        acc = acc.t_add(&power.t_scale(&fact.recip()));
    }
    acc
}

/// Truncated logarithm of `c = 1 + y`: `y - y^2/2 + y^3/3 - ...`.
///
/// The caller guarantees `c` has constant term `1` (as all total Chern
/// classes here do); the degree-0 piece is ignored accordingly.
pub fn log_trunc<T: Trunc>(c: &T, max_power: usize) -> T {
    let y = c.t_add(&c.t_one().t_scale(&rat_i(-1)));
    let mut acc = y.t_zero();
    let mut power = y.t_one();
    for j in 1..=max_power {
        power = power.t_mul(&y);
        if power.t_is_zero() {
            break;
        }
        let sign = if j % 2 == 1 { 1 } else { -1 };
        acc = acc.t_add(&power.t_scale(&rat(sign, j as i64)));
    }
    acc
}

/// Total Chern class from Chern character components:
/// `c = exp( sum_{m>=1} (-1)^m (m-1)! ch_m )`, truncated at degree `d`.
///
/// `ch[i]` holds `ch_{i+1}`; components beyond degree `d` are ignored.
pub fn chern_from_ch<T: Trunc>(ch: &[T], d: usize) -> T {
    if ch.is_empty() {
        // With no components the result is 1 in a ring we cannot name; the
        // callers always pass at least one component.
        panic!("chern_from_ch requires at least one component to fix the ring");
    }
    let mut arg = ch[0].t_zero();
    for (i, chm) in ch.iter().enumerate().take(d) {
        let m = i + 1;
        let sign = if m % 2 == 0 { 1 } else { -1 };
        let coeff = Rational::from_integer(factorial(m - 1) * BigInt::from(sign));
        arg = arg.t_add(&chm.t_scale(&coeff));
    }
    exp_trunc(&arg, d)
}

/// Formal inverse of [`chern_from_ch`]: recover `ch_1..ch_d` from a total
/// Chern class with constant term 1.
pub fn ch_from_chern<T: Trunc>(c: &T, d: usize) -> Vec<T> {
    let l = log_trunc(c, d);
    (1..=d)
        .map(|m| {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            let coeff = Rational::new(BigInt::from(sign), factorial(m - 1));
            l.t_graded_piece(m).t_scale(&coeff)
        })
        .collect()
}

/// Univariate truncated polynomial ring Q[t]/(t^{trunc+1}); the reference
/// implementation of [`Trunc`] used in tests and small conversions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncPoly {
    /// Ascending coefficients; length at most `trunc + 1`.
    pub coeffs: Vec<Rational>,
    /// Maximal retained degree.
    pub trunc: usize,
}

impl TruncPoly {
    /// Build from ascending coefficients, truncating at degree `trunc`.
    pub fn new(mut coeffs: Vec<Rational>, trunc: usize) -> Self {
        coeffs.truncate(trunc + 1);
        TruncPoly { coeffs, trunc }
    }

    /// The monomial `c * t^k`.
    pub fn monomial(c: Rational, k: usize, trunc: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        TruncPoly::new(coeffs, trunc)
    }

    /// Coefficient of `t^k`.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }
}

impl Trunc for TruncPoly {
    fn t_one(&self) -> Self {
        TruncPoly::new(vec![Rational::one()], self.trunc)
    }
    fn t_zero(&self) -> Self {
        TruncPoly::new(Vec::new(), self.trunc)
    }
    fn t_add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        TruncPoly::new(coeffs, self.trunc)
    }
    fn t_mul(&self, rhs: &Self) -> Self {
        let mut out = vec![Rational::zero(); self.trunc + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j > self.trunc {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        TruncPoly::new(out, self.trunc)
    }
    fn t_scale(&self, c: &Rational) -> Self {
        TruncPoly::new(self.coeffs.iter().map(|a| a * c).collect(), self.trunc)
    }
    fn t_graded_piece(&self, m: usize) -> Self {
        TruncPoly::monomial(self.coeff(m), m, self.trunc)
    }
    fn t_is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

// ---------------------------------------------------------------------------
// Interpolation in r with verification points
// ---------------------------------------------------------------------------

/// Exact Lagrange interpolation through rational samples `(r_i, y_i)`.
///
/// The first `degree_bound + 1` samples determine the candidate polynomial;
/// every remaining sample is a verification point. Preconditions: at least
/// `degree_bound + 2` samples (so that at least one verification point
/// exists) with pairwise-distinct `r_i`. A verification mismatch returns a
/// stabilization failure naming the offending sample.
pub fn interpolate_r(samples: &[(u64, Rational)], degree_bound: usize) -> Result<RPoly> {
    if samples.len() < degree_bound + 2 {
        return Err(Error::Validation(format!(
            "interpolation needs at least {} samples for degree bound {}, got {}",
            degree_bound + 2,
            degree_bound,
            samples.len()
        )));
    }
    {
        let mut seen: Vec<u64> = samples.iter().map(|(r, _)| *r).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != samples.len() {
            return Err(Error::Validation(
                "interpolation sample points must be pairwise distinct".into(),
            ));
        }
    }

    let (fit, rest) = samples.split_at(degree_bound + 1);

    // Lagrange basis accumulation.
    let mut poly = RPoly::zero();
    for (i, (ri, yi)) in fit.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        let xi = rat_i(*ri as i64);
        let mut basis = RPoly::constant(Rational::one());
        let mut denom = Rational::one();
        for (j, (rj, _)) in fit.iter().enumerate() {
            if i == j {
                continue;
            }
            let xj = rat_i(*rj as i64);
            basis = basis.mul(&RPoly::new(vec![-xj.clone(), Rational::one()]));
            denom *= &xi - xj;
        }
        poly = poly.add(&basis.scale(&(yi / denom)));
    }

    for (r, y) in rest {
        let predicted = poly.eval_u64(*r);
        if &predicted != y {
            return Err(Error::Stabilization(format!(
                "verification point r={r} disagrees with the degree-{} fit: \
                 predicted {}, sampled {}",
                degree_bound,
                format_rational(&predicted),
                format_rational(y)
            )));
        }
    }
    Ok(poly)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: coefficients of B_n(x) from the generating
    /// function t e^{xt} / (e^t - 1), computed by truncated power-series
    /// division with polynomial coefficients (a different algorithm from
    /// the binomial recursion used by `bernoulli_poly`).
    fn bernoulli_poly_via_series(max_n: usize) -> Vec<Vec<Rational>> {
        let n = max_n + 1;
        // Series coefficients in t; each entry is a polynomial in x
        // (ascending coefficient vectors).
        // numerator: t * e^{xt} => coefficient of t^{k+1} is x^k / k!.
        let mut num: Vec<Vec<Rational>> = vec![vec![]; n + 1];
        for k in 0..n {
            let mut poly = vec![Rational::zero(); k + 1];
            poly[k] = Rational::new(1.into(), factorial(k));
            num[k + 1] = poly;
        }
        // denominator: e^t - 1 => coefficient of t^j is 1/j! for j >= 1.
        let den: Vec<Rational> = (0..=n)
            .map(|j| {
                if j == 0 {
                    Rational::zero()
                } else {
                    Rational::new(1.into(), factorial(j))
                }
            })
            .collect();
        // Solve S * den = num degree by degree; den starts at t^1 with
        // coefficient 1, so S_k = (num_{k+1} - sum_{j>=2} S_{k+1-j} den_j).
        let poly_zero = Vec::new();
        let mut s: Vec<Vec<Rational>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = num[k + 1].clone();
            for (j, den_j) in den.iter().enumerate().take(k + 2).skip(2) {
                let prev: &Vec<Rational> = s.get(k + 1 - j).unwrap_or(&poly_zero);
                for (deg, c) in prev.iter().enumerate() {
                    let term = c * den_j;
                    if acc.len() <= deg {
                        acc.resize(deg + 1, Rational::zero());
                    }
                    acc[deg] -= term;
                }
            }
            s.push(acc);
        }
        // B_n(x) = n! * S_n.
        (0..=max_n)
            .map(|k| {
                let fact = Rational::from_integer(factorial(k));
                let mut poly = s[k].clone();
                poly.resize(k + 1, Rational::zero());
                for c in poly.iter_mut() {
                    *c = &*c * &fact;
                }
                poly
            })
            .collect()
    }

    #[test]
    fn bernoulli_poly_matches_generating_function_oracle() {
        let oracle = bernoulli_poly_via_series(20);
        for (n, expected) in oracle.iter().enumerate() {
            assert_eq!(&bernoulli_poly(n), expected, "B_{n}(x) mismatch");
        }
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli_number(0), rat_i(1));
        assert_eq!(bernoulli_number(1), rat(-1, 2));
        assert_eq!(bernoulli_number(2), rat(1, 6));
        assert_eq!(bernoulli_number(3), rat_i(0));
        assert_eq!(bernoulli_number(4), rat(-1, 30));
        assert_eq!(bernoulli_number(12), rat(-691, 2730));
        // B_2(x) = x^2 - x + 1/6.
        assert_eq!(bernoulli_poly(2), vec![rat(1, 6), rat_i(-1), rat_i(1)]);
        // Values used throughout the edge sums: B_2(0) = 1/6, B_2(1/2) = -1/12.
        assert_eq!(bernoulli_eval(2, &rat_i(0)), rat(1, 6));
        assert_eq!(bernoulli_eval(2, &rat(1, 2)), rat(-1, 12));
    }

    #[test]
    fn bernoulli_reflection_identity() {
        // B_p(1 - x) = (-1)^p B_p(x), checked at several rational points.
        for p in 0..=20 {
            for (num, den) in [(1i64, 3i64), (2, 7), (5, 11), (0, 1), (4, 5)] {
                let x = rat(num, den);
                let lhs = bernoulli_eval(p, &(rat_i(1) - &x));
                let sign = if p % 2 == 0 { rat_i(1) } else { rat_i(-1) };
                assert_eq!(lhs, sign * bernoulli_eval(p, &x), "p={p} x={num}/{den}");
            }
        }
    }

    #[test]
    fn homogenized_bernoulli_examples() {
        // HB_1(z, w) = z - w/2.
        assert_eq!(homog_bernoulli(1), vec![rat(-1, 2), rat_i(1)]);
        // HB_2(z, w) = z^2 - zw + w^2/6.
        assert_eq!(homog_bernoulli(2), vec![rat(1, 6), rat_i(-1), rat_i(1)]);
        // Homogeneity: HB_n(z, w) = B_n(z/w) w^n at sample points.
        for n in 0..=8 {
            let z = rat(3, 5);
            let w = rat(7, 2);
            let mut wn = Rational::one();
            for _ in 0..n {
                wn *= &w;
            }
            assert_eq!(
                homog_bernoulli_eval(n, &z, &w),
                bernoulli_eval(n, &(&z / &w)) * wn
            );
        }
    }

    #[test]
    fn chern_from_ch_examples() {
        // ch = (t) in Q[t]/(t^3): c = exp(-t) = 1 - t + t^2/2.
        let t = TruncPoly::monomial(rat_i(1), 1, 2);
        let c = chern_from_ch(std::slice::from_ref(&t), 2);
        assert_eq!(
            c.coeffs,
            vec![rat_i(1), rat_i(-1), rat(1, 2)],
            "exp(-t) truncated"
        );
        // ch = (t, t^2/2): c = exp(-t + t^2/2) = 1 - t + t^2.
        let ch2 = TruncPoly::monomial(rat(1, 2), 2, 2);
        let c = chern_from_ch(&[t, ch2], 2);
        assert_eq!(c.coeffs, vec![rat_i(1), rat_i(-1), rat_i(1)]);
    }

    #[test]
    fn chern_log_roundtrip() {
        // chern_from_ch followed by its formal inverse recovers the input.
        let d = 5;
        let ch: Vec<TruncPoly> = (1..=d)
            .map(|m| TruncPoly::monomial(rat(m as i64 * 3 - 7, m as i64 + 2), m, d))
            .collect();
        let c = chern_from_ch(&ch, d);
        let back = ch_from_chern(&c, d);
        for (a, b) in ch.iter().zip(back.iter()) {
            assert_eq!(a.coeffs, b.coeffs);
        }
    }

    #[test]
    fn exp_log_inverse_on_truncated_ring() {
        let d = 6;
        let x = TruncPoly::new(
            vec![rat_i(0), rat(2, 3), rat(-1, 5), rat_i(4), rat(7, 11)],
            d,
        );
        let e = exp_trunc(&x, d);
        let l = log_trunc(&e, d);
        let mut xt = x;
        xt.coeffs.truncate(d + 1);
        assert!(l.t_add(&xt.t_scale(&rat_i(-1))).t_is_zero());
    }

    #[test]
    fn interpolate_recovers_square() {
        // Samples of r^2 with one verification point.
        let samples: Vec<(u64, Rational)> = [5u64, 7, 11, 13]
            .iter()
            .map(|&r| (r, rat_i((r * r) as i64)))
            .collect();
        let p = interpolate_r(&samples, 2).expect("fit");
        assert_eq!(p, RPoly::new(vec![rat_i(0), rat_i(0), rat_i(1)]));
    }

    #[test]
    fn interpolate_constant_with_many_points() {
        let samples: Vec<(u64, Rational)> =
            [3u64, 5, 7, 11, 13].iter().map(|&r| (r, rat(1, 24))).collect();
        let p = interpolate_r(&samples, 0).expect("fit");
        assert_eq!(p, RPoly::constant(rat(1, 24)));
    }

    #[test]
    fn interpolate_faulhaber_power_sum() {
        // Independent oracle: brute-force power sums sum_{w=0}^{r-1} w^2
        // must interpolate to the Faulhaber polynomial r^3/3 - r^2/2 + r/6.
        let samples: Vec<(u64, Rational)> = [5u64, 7, 11, 13, 17, 19]
            .iter()
            .map(|&r| (r, rat_i((0..r).map(|w| (w * w) as i64).sum::<i64>())))
            .collect();
        let p = interpolate_r(&samples, 3).expect("fit");
        assert_eq!(
            p,
            RPoly::new(vec![rat_i(0), rat(1, 6), rat(-1, 2), rat(1, 3)])
        );
    }

    #[test]
    fn interpolate_detects_non_polynomial_data() {
        // 1/r samples can never stabilize to a degree-1 polynomial.
        let samples: Vec<(u64, Rational)> = [5u64, 7, 11, 13, 17]
            .iter()
            .map(|&r| (r, rat(1, r as i64)))
            .collect();
        match interpolate_r(&samples, 1) {
            Err(Error::Stabilization(_)) => {}
            other => panic!("expected stabilization failure, got {other:?}"),
        }
    }

    #[test]
    fn interpolate_rejects_insufficient_samples() {
        let samples = vec![(5u64, rat_i(25)), (7u64, rat_i(49))];
        match interpolate_r(&samples, 1) {
            Err(Error::Validation(_)) => {}
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn prime_stream_and_integer_utilities() {
        assert_eq!(primes_above(4, 5), vec![5, 7, 11, 13, 17]);
        assert_eq!(primes_above(13, 3), vec![17, 19, 23]);
        assert_eq!(double_factorial(-1), BigInt::from(1));
        assert_eq!(double_factorial(0), BigInt::from(1));
        assert_eq!(double_factorial(5), BigInt::from(15));
        assert_eq!(double_factorial(6), BigInt::from(48));
        assert_eq!(factorial(6), BigInt::from(720));
        assert_eq!(binomial(7, 3), BigInt::from(35));
    }

    #[test]
    fn rational_parse_format_roundtrip() {
        for s in ["3/4", "-3/4", "0", "17", "-255/13"] {
            let x = parse_rational(s).expect("parse");
            assert_eq!(format_rational(&x), s);
        }
        // Non-canonical inputs normalize.
        assert_eq!(format_rational(&parse_rational("6/8").unwrap()), "3/4");
        assert_eq!(format_rational(&parse_rational("5/-10").unwrap()), "-1/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn pow_r_handles_negative_exponents() {
        assert_eq!(pow_r(5, 3), rat_i(125));
        assert_eq!(pow_r(5, 0), rat_i(1));
        assert_eq!(pow_r(5, -2), rat(1, 25));
    }
}
