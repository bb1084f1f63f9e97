//! Witten correlators (psi-intersection numbers) and mixed kappa-psi
//! integrals over moduli of stable curves, with a persistent exact cache.
//!
//! The correlator `<tau_{d_1} ... tau_{d_n}>_g` is the integral of
//! `psi_1^{d_1} ... psi_n^{d_n}` over `Mbar_{g,n}`. Genus 0 uses the closed
//! form `(n-3)! / prod d_i!`; positive genus uses the
//! Dijkgraaf–Verlinde–Verlinde recursion with the seeds
//! `<tau_0^3>_0 = 1` and `<tau_1>_1 = 1/24`. Mixed kappa-psi integrals
//! reduce to pure psi integrals by trading each `kappa_b` for an extra
//! marking (`kappa_b = pi_* psi_{n+1}^{b+1}`, with the standard correction
//! terms for the remaining kappa factors).
//!
//! Values are cached exactly; the cache optionally persists to an
//! append-only text file, one correlator per line in the format
//! `g;d1,d2,...,dn;p/q` with the exponents sorted ascending. Loading
//! ignores malformed lines (tolerates torn concurrent writes); writes are
//! serialized through a sidecar lock file.

use crate::error::{Error, Result};
use crate::exactmath::{double_factorial, factorial, format_rational, parse_rational, rat_i, Rational};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Canonical key of a correlator: genus plus the sorted exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TauKey {
    /// Genus.
    pub g: u32,
    /// Psi exponents, sorted ascending.
    pub exponents: Vec<u32>,
}

impl TauKey {
    /// Build a key, sorting the exponents.
    pub fn new(g: u32, mut exponents: Vec<u32>) -> Self {
        exponents.sort_unstable();
        TauKey { g, exponents }
    }

    fn cache_line(&self, value: &Rational) -> String {
        let ds: Vec<String> = self.exponents.iter().map(|d| d.to_string()).collect();
        format!("{};{};{}\n", self.g, ds.join(","), format_rational(value))
    }

    fn parse_line(line: &str) -> Option<(TauKey, Rational)> {
        let mut parts = line.trim().split(';');
        let g: u32 = parts.next()?.parse().ok()?;
        let ds_part = parts.next()?;
        let value = parse_rational(parts.next()?).ok()?;
        if parts.next().is_some() {
            return None;
        }
        let mut exponents = Vec::new();
        if !ds_part.is_empty() {
            for d in ds_part.split(',') {
                exponents.push(d.parse().ok()?);
            }
        }
        Some((TauKey::new(g, exponents), value))
    }
}

/// Exact correlator cache, optionally backed by an append-only file.
#[derive(Debug)]
pub struct WittenCache {
    map: HashMap<TauKey, Rational>,
    path: Option<PathBuf>,
}

impl WittenCache {
    /// Purely in-memory cache.
    pub fn in_memory() -> Self {
        WittenCache { map: HashMap::new(), path: None }
    }

    /// Open (or create) a persistent cache file and load its entries.
    pub fn open(path: &Path) -> Result<Self> {
        let mut map = HashMap::new();
        match std::fs::read_to_string(path) {
            Ok(text) => {
                for line in text.lines() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    if let Some((key, value)) = TauKey::parse_line(line) {
                        map.insert(key, value);
                    }
                    // Malformed lines (torn writes) are skipped silently;
                    // the values they held are simply recomputed.
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(WittenCache { map, path: Some(path.to_path_buf()) })
    }

    /// Number of cached correlators.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    /// True when nothing is cached.
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Iterate over cached entries (arbitrary order).
    pub fn entries(&self) -> impl Iterator<Item = (&TauKey, &Rational)> {
        self.map.iter()
    }

    fn get(&self, key: &TauKey) -> Option<Rational> {
        self.map.get(key).cloned()
    }

    fn store(&mut self, key: TauKey, value: Rational) {
        if self.map.contains_key(&key) {
            return;
        }
        if let Some(path) = self.path.clone() {
            // Best effort: a failing append leaves the in-memory value
            // intact, so results stay correct and the line is retried on
            // the next store of the same key in a later process.
            let _ = append_locked(&path, &key.cache_line(&value));
        }
        self.map.insert(key, value);
    }
}

/// Append a line under a sidecar lock file (`<path>.lock`), serializing
/// concurrent writers across processes.
fn append_locked(path: &Path, line: &str) -> Result<()> {
    let lock_path = path.with_extension("cache.lock");
    let mut acquired = false;
    for _ in 0..500 {
        match OpenOptions::new().write(true).create_new(true).open(&lock_path) {
            Ok(_) => {
                acquired = true;
                break;
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                std::thread::sleep(std::time::Duration::from_millis(2));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let result = (|| -> Result<()> {
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        file.write_all(line.as_bytes())?;
        Ok(())
    })();
    if acquired {
        let _ = std::fs::remove_file(&lock_path);
    }
    result
}

// ---------------------------------------------------------------------------
// Correlators
// ---------------------------------------------------------------------------

fn dim_matches(g: u32, exponents: &[u32]) -> bool {
    let total: i64 = exponents.iter().map(|&d| d as i64).sum();
    total == 3 * g as i64 - 3 + exponents.len() as i64
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// `<tau_{d_1} ... tau_{d_n}>_g`, the integral of the psi monomial over
/// `Mbar_{g,n}`.
///
/// Returns zero when the total degree is not the dimension `3g - 3 + n`;
/// returns an instability error when `2g - 2 + n <= 0` (the moduli space
/// does not exist). Genus 0 is evaluated in closed form, higher genus by
/// the DVV recursion with memoization through `cache`.
pub fn witten_number(g: u32, exponents: &[u32], cache: &mut WittenCache) -> Result<Rational> {
    if !stable(g, exponents.len()) {
        return Err(Error::Instability(format!(
            "correlator requested on unstable (g, n) = ({g}, {})",
            exponents.len()
        )));
    }
    if !dim_matches(g, exponents) {
        return Ok(Rational::zero());
    }
    if g == 0 {
        return Ok(genus0_closed_form(exponents));
    }
    if g == 1 && exponents == [1] {
        // Seed of the recursion alongside <tau_0^3>_0 = 1: the splitting
        // sum of the DVV step is empty at k = 0, so this value is an input.
        return Ok(Rational::new(1.into(), 24.into()));
    }
    let key = TauKey::new(g, exponents.to_vec());
    if let Some(v) = cache.get(&key) {
        return Ok(v);
    }
    let value = dvv_step(&key, cache)?;
    cache.store(key, value.clone());
    Ok(value)
}

/// Genus-0 closed form `(n-3)! / prod d_i!` (valid when the dimension
/// constraint `sum d_i = n - 3` holds, which the caller has checked).
fn genus0_closed_form(exponents: &[u32]) -> Rational {
    let n = exponents.len();
    let mut denom = num_bigint::BigInt::one();
    for &d in exponents {
        denom *= factorial(d as usize);
    }
    Rational::new(factorial(n - 3), denom)
}

/// Evaluate `<tau_{d_1} ... >_g` by the DVV recursion, without the genus-0
/// closed-form shortcut (used directly only by tests; `witten_number`
/// dispatches genus 0 to the closed form).
pub fn witten_number_via_recursion(
    g: u32,
    exponents: &[u32],
    cache: &mut WittenCache,
) -> Result<Rational> {
    if !stable(g, exponents.len()) {
        return Err(Error::Instability(format!(
            "correlator requested on unstable (g, n) = ({g}, {})",
            exponents.len()
        )));
    }
    if !dim_matches(g, exponents) {
        return Ok(Rational::zero());
    }
    if g == 0 && exponents.iter().all(|&d| d == 0) {
        return Ok(Rational::one()); // <tau_0^3>_0
    }
    if g == 1 && exponents == [1] {
        return Ok(Rational::new(1.into(), 24.into()));
    }
    dvv_step(&TauKey::new(g, exponents.to_vec()), cache)
}

/// One DVV extraction step on a key that is stable, dimension-correct, and
/// not a seed. Extracts the largest exponent `d_max = k + 1 >= 1`.
fn dvv_step(key: &TauKey, cache: &mut WittenCache) -> Result<Rational> {
    let g = key.g;
    // exponents sorted ascending: extract the last (largest).
    let (rest, extracted) = {
        let mut ds = key.exponents.clone();
        let last = ds.pop().expect("stable keys are nonempty");
        (ds, last)
    };
    assert!(
        extracted >= 1,
        "DVV extraction needs a positive exponent; dimension-correct stable \
         keys above genus 0 always have one"
    );
    let k = extracted as i64 - 1;

    let df = |m: i64| Rational::from_integer(double_factorial(m));
    let mut total = Rational::zero();

    // Contact terms: move tau_{d_j} to tau_{d_j + k}.
    for (j, &dj) in rest.iter().enumerate() {
        let mut moved = rest.clone();
        moved[j] = dj + k as u32;
        let coeff = df(2 * dj as i64 + 2 * k + 1) / df(2 * dj as i64 - 1);
        let sub = witten_sub(g, moved, cache)?;
        total += coeff * sub;
    }

    // Splitting terms: (1/2) sum_{a+b=k-1} (2a+1)!!(2b+1)!! [ nonseparating
    // genus drop + all separating splits ].
    if k >= 1 {
        let mut split_sum = Rational::zero();
        for a in 0..=(k - 1) {
            let b = k - 1 - a;
            let coeff = df(2 * a + 1) * df(2 * b + 1);

            // Nonseparating: genus drops by one, tau_a tau_b join the rest.
            if g >= 1 {
                let mut ds = rest.clone();
                ds.push(a as u32);
                ds.push(b as u32);
                split_sum += &coeff * witten_sub(g - 1, ds, cache)?;
            }

            // Separating: ordered genus split and ordered subset split.
            for g1 in 0..=g {
                let g2 = g - g1;
                for mask in 0..(1u32 << rest.len()) {
                    let mut left = Vec::new();
                    let mut right = Vec::new();
                    for (i, &d) in rest.iter().enumerate() {
                        if mask & (1 << i) != 0 {
                            left.push(d);
                        } else {
                            right.push(d);
                        }
                    }
                    left.push(a as u32);
                    right.push(b as u32);
                    let lhs = witten_sub(g1, left, cache)?;
                    if lhs.is_zero() {
                        continue;
                    }
                    let rhs = witten_sub(g2, right, cache)?;
                    split_sum += &coeff * lhs * rhs;
                }
            }
        }
        total += split_sum / rat_i(2);
    }

    Ok(total / df(2 * k + 3))
}

/// Recursion helper: unstable brackets and dimension mismatches are zero.
fn witten_sub(g: u32, exponents: Vec<u32>, cache: &mut WittenCache) -> Result<Rational> {
    if !stable(g, exponents.len()) || !dim_matches(g, &exponents) {
        return Ok(Rational::zero());
    }
    witten_number(g, &exponents, cache)
}

// ---------------------------------------------------------------------------
// Mixed kappa-psi integrals
// ---------------------------------------------------------------------------

/// Integral of `kappa_{b_1} ... kappa_{b_m} psi_1^{d_1} ... psi_n^{d_n}`
/// over `Mbar_{g,n}`.
///
/// `psi` must have length `n`. Returns zero unless the total degree equals
/// `3g - 3 + n`; errors on unstable `(g, n)`. Each `kappa_0` is the scalar
/// `2g - 2 + n`; other kappa factors are traded for an extra marking via
/// `kappa_b = pi_* psi_{n+1}^{b+1}` together with the correction
/// `pi^* kappa_b = kappa_b - psi_{n+1}^b` for the factors left behind,
/// expanded over subsets.
pub fn kappa_psi_integral(
    g: u32,
    psi: &[u32],
    kappa: &[u32],
    cache: &mut WittenCache,
) -> Result<Rational> {
    let n = psi.len();
    if !stable(g, n) {
        return Err(Error::Instability(format!(
            "kappa-psi integral requested on unstable (g, n) = ({g}, {n})"
        )));
    }
    let degree: i64 = psi.iter().map(|&d| d as i64).sum::<i64>()
        + kappa.iter().map(|&b| b as i64).sum::<i64>();
    if degree != 3 * g as i64 - 3 + n as i64 {
        return Ok(Rational::zero());
    }

    // Strip kappa_0 factors: each is the Euler-characteristic scalar of the
    // ambient space.
    if kappa.contains(&0) {
        let scalar = rat_i(2 * g as i64 - 2 + n as i64);
        let zeros = kappa.iter().filter(|&&b| b == 0).count();
        let rest: Vec<u32> = kappa.iter().copied().filter(|&b| b != 0).collect();
        let mut factor = Rational::one();
        for _ in 0..zeros {
            factor *= &scalar;
        }
        return Ok(factor * kappa_psi_integral(g, psi, &rest, cache)?);
    }

    if kappa.is_empty() {
        return witten_number(g, psi, cache);
    }

    // Trade kappa_{b_1} for a marking; expand the corrections of the
    // remaining kappa factors over subsets S (factors converted to psi
    // powers on the new marking, with sign).
    let b1 = kappa[0];
    let rest = &kappa[1..];
    let mut total = Rational::zero();
    for mask in 0..(1u32 << rest.len()) {
        let mut extra_psi = b1 + 1;
        let mut kept = Vec::new();
        let mut sign_negative = false;
        for (i, &b) in rest.iter().enumerate() {
            if mask & (1 << i) != 0 {
                extra_psi += b;
                sign_negative = !sign_negative;
            } else {
                kept.push(b);
            }
        }
        let mut new_psi = psi.to_vec();
        new_psi.push(extra_psi);
        let term = kappa_psi_integral(g, &new_psi, &kept, cache)?;
        if sign_negative {
            total -= term;
        } else {
            total += term;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
