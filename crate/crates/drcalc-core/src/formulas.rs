//! The two calculators this crate exists for, assembled as tautological
//! classes on `Mbar_{g,n}` for the bundle `L = omega_log^k(sum a_i x_i)`:
//!
//! * the Grothendieck–Riemann–Roch side: Chern characters of the derived
//!   pushforward of the universal `r`-th root of `L` ([`chern_char_term`]),
//!   their total-Chern-class assembly pushed along the forgetful map from
//!   the space of roots ([`epsilon_total_chern`]), and its per-stratum
//!   interpolation into polynomials in `r` ([`chiodo_poly`]);
//! * Pixton's mixed-degree sum over stable graphs and weightings
//!   ([`pixton_P`], [`pixton_poly`]).
//!
//! Constant terms at `r = 0` give the double ramification cycle
//! ([`dr_cycle`]) in degree `g` and its `u`-fold ground-class variants in
//! degree `g + u` ([`hodge_dr`]). The constant terms of the two sides
//! agree; the acceptance suite checks this across a grid of inputs.
//!
//! Conventions (pinned by the unit and acceptance tests):
//! * residues: legs carry `(k - a_i) mod r`, vertices balance
//!   `delta(v) = sum of a_i at v + k (2 g_v - 2 + val(v))`;
//! * the Bernoulli edge exponent uses the residue of the designated
//!   (side-0) half-edge; the full edge factor is independent of that
//!   choice via the reflection `B_p(1 - x) = (-1)^p B_p(x)`;
//! * `1/|Aut|` and all powers of `r` live in class coefficients, never in
//!   the stratum representation;
//! * Pixton's quadratic edge exponent uses raw residues, with the product
//!   `w(h) w(h')` by default ([`EdgeConvention::WWPrime`], the convention
//!   singled out by the genus-1 pinned value) or the squared designated
//!   residue `w(e)^2` ([`EdgeConvention::WSquared`]).

use crate::error::{Error, Result};
use crate::exactmath::{
    bernoulli_eval, exp_trunc, factorial, interpolate_r, pow_r, rat, rat_i, Rational,
};
use crate::graphs::{enumerate_stable_graphs, Decoration, StableGraph};
use crate::tautclass::{
    DecoratedStratum, LegKappaPoly, TautClass, TautPolyClass, TruncatedLegPoly,
};
use crate::weightings::{each_weighting, DegreeAssignment};
use crate::witten::WittenCache;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

/// Which quadratic exponent the Pixton edge factor uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeConvention {
    /// `-(1/2) w(h) w(h') N_e`: the product of the two half-edge residues.
    /// Default: the genus-1 pinned value (the cycle integrating to `-1/24`
    /// on `Mbar_{1,1}`) holds under this convention only.
    #[default]
    WWPrime,
    /// `-(1/2) w(e)^2 N_e`: the squared designated residue.
    WSquared,
}

impl fmt::Display for EdgeConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeConvention::WWPrime => "w-wprime",
            EdgeConvention::WSquared => "w-squared",
        })
    }
}

impl FromStr for EdgeConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w-wprime" => Ok(EdgeConvention::WWPrime),
            "w-squared" => Ok(EdgeConvention::WSquared),
            other => Err(Error::Validation(format!(
                "unknown edge convention `{other}` (expected `w-wprime` or `w-squared`)"
            ))),
        }
    }
}

impl Serialize for EdgeConvention {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgeConvention {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Ramification input: the space `Mbar_{g,n}`, the twist `k`, the integer
/// vector `a`, the Pixton edge convention, and the ground-class power `u`
/// used by [`hodge_dr`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DRInput {
    /// Genus.
    pub g: u32,
    /// Number of markings (always `a.len()`).
    pub n: u32,
    /// Ramification vector; entry `i` sits at the leg with label `i + 1`.
    pub a: Vec<i64>,
    /// Twist: the power of the log cotangent bundle in `L`.
    pub k: i64,
    /// Pixton edge-factor convention.
    pub convention: EdgeConvention,
    /// Ground-class power for [`hodge_dr`].
    pub u: u32,
}

impl DRInput {
    /// Build and validate an input with `n = a.len()`, requiring a stable
    /// `(g, n)` and the degree-zero balance `sum(a) + k (2g - 2 + n) = 0`.
    pub fn new(g: u32, a: Vec<i64>, k: i64) -> Result<Self> {
        let n = a.len() as u32;
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::Instability(format!(
                "(g, n) = ({g}, {n}) is not stable"
            )));
        }
        let balance: i64 = a.iter().sum::<i64>() + k * (2 * g as i64 - 2 + n as i64);
        if balance != 0 {
            return Err(Error::Validation(format!(
                "ramification does not balance: sum(a) + k(2g-2+n) = {balance}, expected 0"
            )));
        }
        Ok(DRInput { g, n, a, k, convention: EdgeConvention::default(), u: 0 })
    }

    /// Same input with another edge convention.
    pub fn with_convention(mut self, convention: EdgeConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Same input with a ground-class power.
    pub fn with_u(mut self, u: u32) -> Self {
        self.u = u;
        self
    }

    /// Complex dimension of `Mbar_{g,n}`.
    pub fn dimension(&self) -> u32 {
        (3 * self.g as i64 - 3 + self.n as i64) as u32
    }

    fn check_codim(&self, d: u32) -> Result<()> {
        if d as i64 > 3 * self.g as i64 - 3 + self.n as i64 {
            return Err(Error::DimensionOverflow(format!(
                "codimension {d} exceeds dim Mbar_({}, {}) = {}",
                self.g,
                self.n,
                3 * self.g as i64 - 3 + self.n as i64
            )));
        }
        Ok(())
    }

    /// Moduli below this are never admissible: the residue pattern of the
    /// leg and vertex data only stabilizes for `r` beyond twice the data.
    pub fn stabilization_threshold(&self) -> u64 {
        let max_a = self.a.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        let k_span = self.k.unsigned_abs() * (2 * self.g as u64).saturating_sub(2);
        // 2g - 2 + n as u64; g >= 1 or n >= 3 by stability so no underflow
        let euler = (2 * self.g as i64 - 2 + self.n as i64) as u64;
        (2 * max_a).max(2 * self.k.unsigned_abs() * euler).max(k_span)
    }

    fn check_modulus(&self, r: u64) -> Result<()> {
        if r < 1 || (r <= self.stabilization_threshold()) && r != 1 {
            // r = 1 stays allowed: every residue is 0 and the classical
            // specialization (e.g. the first Chern character reproducing
            // the Hodge class) is a useful cross-check.
            if r >= 1 && self.stabilization_threshold() == 0 {
                return Ok(());
            }
            return Err(Error::Validation(format!(
                "modulus {r} is inadmissible (needs r > {})",
                self.stabilization_threshold()
            )));
        }
        Ok(())
    }
}

/// How interpolation samples are drawn: primes above the input's
/// stabilization threshold (and above `d + 2`, making them coprime to
/// `(d+1)!`, to every `|Aut|` of a contributing graph, and to all Bernoulli
/// denominators in play), in consecutive disjoint windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RSamplePolicy {
    /// Extra sample points beyond `degree_bound + 1`, used to verify the
    /// interpolation (stabilization check).
    pub verify_points: usize,
    /// Which consecutive block of admissible primes to use; disjoint
    /// windows must reproduce identical polynomials.
    pub window: usize,
    /// Lower bound on sample moduli regardless of the input.
    pub threshold_floor: u64,
}

impl Default for RSamplePolicy {
    fn default() -> Self {
        RSamplePolicy { verify_points: 3, window: 0, threshold_floor: 3 }
    }
}

impl RSamplePolicy {
    /// The sample moduli for an input at truncation codimension `d` with a
    /// given interpolation degree bound.
    pub fn moduli(&self, input: &DRInput, d: u32, degree_bound: usize) -> Vec<u64> {
        let threshold = input
            .stabilization_threshold()
            .max((d + 2) as u64)
            .max(self.threshold_floor);
        let count = degree_bound + 1 + self.verify_points;
        let all = crate::exactmath::primes_above(threshold, count * (self.window + 1));
        all[count * self.window..].to_vec()
    }
}

// ---------------------------------------------------------------------------
// Edge-local bivariate polynomials
// ---------------------------------------------------------------------------

/// Polynomial in the two half-edge psi classes of a single edge,
/// truncated by total degree. Key `(i, j)` is `psi_h^i psi_h'^j` with `h`
/// the designated (side-0) half.
#[derive(Debug, Clone, Default)]
struct BiPoly {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl BiPoly {
    fn one() -> Self {
        let mut p = BiPoly::default();
        p.add_term(0, 0, rat_i(1));
        p
    }

    fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    fn add(&self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    fn scale(&self, c: &Rational) -> BiPoly {
        let mut out = BiPoly::default();
        for (&(i, j), v) in &self.terms {
            out.add_term(i, j, v * c);
        }
        out
    }

    fn mul_trunc(&self, rhs: &BiPoly, budget: u32) -> BiPoly {
        let mut out = BiPoly::default();
        for (&(ia, ja), ca) in &self.terms {
            for (&(ib, jb), cb) in &rhs.terms {
                let (i, j) = (ia + ib, ja + jb);
                if i + j > budget {
                    continue;
                }
                out.add_term(i, j, ca * cb);
            }
        }
        out
    }
}

/// `B_p(w/r)` for a residue `w` in `[0, r)`.
fn bernoulli_at_residue(p: usize, w: u64, r: u64) -> Rational {
    bernoulli_eval(p, &rat(w as i64, r as i64))
}

/// Edge factor of the total-Chern assembly for designated residue `w`:
/// `(1 - exp(N D)) / N` truncated above `budget`, with
/// `D = sum_m (-1)^{m-1} B_{m+1}(w/r) / (m (m+1)) *
///      sum_{i+j=m-1} psi_h^i (-psi_h')^j`
/// and `N = psi_h + psi_h'`. Computed without division as
/// `-D * sum_t (N D)^t / (t+1)!`.
fn chern_edge_factor(w: u64, r: u64, budget: u32) -> BiPoly {
    let mut dd = BiPoly::default();
    for m in 1..=(budget + 1) as usize {
        let c_m = bernoulli_at_residue(m + 1, w, r)
            / rat_i((m * (m + 1)) as i64)
            * if m % 2 == 0 { rat_i(-1) } else { rat_i(1) };
        for i in 0..m as u32 {
            let j = m as u32 - 1 - i;
            let sign = if j.is_multiple_of(2) { rat_i(1) } else { rat_i(-1) };
            dd.add_term(i, j, c_m.clone() * sign);
        }
    }
    let mut normal = BiPoly::default();
    normal.add_term(1, 0, rat_i(1));
    normal.add_term(0, 1, rat_i(1));
    let nd = normal.mul_trunc(&dd, budget);

    let mut series = BiPoly::one(); // sum_t (N D)^t / (t+1)!, t = 0 term
    let mut power = BiPoly::one();
    for t in 1..=budget as usize {
        power = power.mul_trunc(&nd, budget);
        if power.terms.is_empty() {
            break;
        }
        let inv = Rational::from_integer(factorial(t + 1)).recip();
        series = series.add(&power.scale(&inv));
    }
    dd.mul_trunc(&series, budget).scale(&rat_i(-1))
}

/// Edge factor of the Pixton sum:
/// `(1 - exp(-(1/2) chat N)) / N = sum_{j>=1} (-1)^{j-1} chat^j N^{j-1} / (2^j j!)`
/// truncated above `budget`, where `chat` is the convention-dependent
/// quadratic residue invariant of the edge.
fn pixton_edge_factor(chat: &Rational, budget: u32) -> BiPoly {
    let mut out = BiPoly::default();
    let mut chat_pow = Rational::one();
    for j in 1..=(budget + 1) as usize {
        chat_pow *= chat;
        if chat_pow.is_zero() {
            break;
        }
        let sign = if j % 2 == 1 { rat_i(1) } else { rat_i(-1) };
        let coeff = sign * &chat_pow
            / (pow_r(2, j as i64) * Rational::from_integer(factorial(j)));
        // N^{j-1} = sum_i C(j-1, i) x^i y^{j-1-i}
        for i in 0..j as u32 {
            if (j as u32) - 1 > budget {
                break;
            }
            let binom = Rational::from_integer(crate::exactmath::binomial(j - 1, i as usize));
            out.add_term(i, j as u32 - 1 - i, coeff.clone() * binom);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Boundary assembly shared by the two calculators
// ---------------------------------------------------------------------------

/// Sum over stable graphs with at most `d` edges and their weightings
/// modulo `r` of `prefactor(Γ) * j_* prod_e F_e(w)`, expanded into
/// decorated strata of codimension at most `d`. `factor_of_residue`
/// produces each edge's factor from its designated residue and the
/// decoration budget `d - #E(Γ)`.
fn assemble_boundary(
    input: &DRInput,
    r: u64,
    d: u32,
    prefactor: impl Fn(&StableGraph) -> Rational,
    factor_of_residue: impl Fn(u64, u64, u32) -> BiPoly,
) -> Result<TautClass> {
    let mut out = TautClass::zero();
    for graph in enumerate_stable_graphs(input.g, input.n, d as usize) {
        let ne = graph.num_edges();
        let budget = d - ne as u32;
        let delta = DegreeAssignment::from_inputs(&graph, &input.a, input.k)?;
        // Edge factors depend on the weighting only through the designated
        // residue; precompute one factor per residue class.
        let factors: Vec<BiPoly> = (0..r).map(|w| factor_of_residue(w, r, budget)).collect();
        let mut totals: BTreeMap<Vec<(u32, u32)>, Rational> = BTreeMap::new();
        // Partial product over edges: (psi exponents so far, degree, coeff).
        type PartialTerm = (Vec<(u32, u32)>, u32, Rational);
        each_weighting(&graph, &delta, r, |side0| {
            let mut acc: Vec<PartialTerm> = vec![(Vec::new(), 0, rat_i(1))];
            for &w in side0.iter() {
                let factor = &factors[w as usize];
                let mut next = Vec::with_capacity(acc.len() * factor.terms.len());
                for (exps, deg, c) in &acc {
                    for (&(i, j), fc) in &factor.terms {
                        let nd = deg + i + j;
                        if nd > budget {
                            continue;
                        }
                        let mut e = exps.clone();
                        e.push((i, j));
                        next.push((e, nd, c * fc));
                    }
                }
                acc = next;
            }
            for (exps, _, c) in acc {
                let entry = totals.entry(exps).or_insert_with(Rational::zero);
                *entry += c;
            }
        });
        let pref = prefactor(&graph);
        for (exps, coeff) in totals {
            let value = &pref * coeff;
            if value.is_zero() {
                continue;
            }
            let mut decor = Decoration::empty(&graph);
            decor.edge_psi = exps;
            out.add_term(DecoratedStratum::new(graph.clone(), decor)?, value);
        }
    }
    Ok(out)
}

/// The degree-`m` bulk class of the `m`-th Chern character: Bernoulli
/// values of the leg and twist residues against `kappa_m` and `psi_i^m`,
/// over `(m+1)!`.
fn chern_bulk_poly(input: &DRInput, r: u64, m: u32) -> LegKappaPoly {
    let kbar = input.k.rem_euclid(r as i64) as u64;
    let mut poly = LegKappaPoly::kappa(m).scale(&bernoulli_at_residue(m as usize + 1, kbar, r));
    for (i, &ai) in input.a.iter().enumerate() {
        let abar = (input.k - ai).rem_euclid(r as i64) as u64;
        poly = poly.add(
            &LegKappaPoly::psi_power(i as u32 + 1, m)
                .scale(&-bernoulli_at_residue(m as usize + 1, abar, r)),
        );
    }
    poly.scale(&Rational::from_integer(factorial(m as usize + 1)).recip())
}

/// `sum_m a_m`, the logarithm of the bulk part of the total Chern class:
/// `a_m = (-1)^m (m-1)! * (bulk ch_m)`.
fn chern_log_bulk(input: &DRInput, r: u64, d: u32) -> LegKappaPoly {
    let mut total = LegKappaPoly::zero();
    for m in 1..=d {
        let sign = if m % 2 == 0 { rat_i(1) } else { rat_i(-1) };
        let scale = sign * Rational::from_integer(factorial(m as usize - 1));
        total = total.add(&chern_bulk_poly(input, r, m).scale(&scale));
    }
    total
}

// ---------------------------------------------------------------------------
// Chern character and total Chern class of the root pushforward
// ---------------------------------------------------------------------------

/// The degree-`m` Chern character of the derived pushforward of the
/// universal `r`-th root, written in classes of `Mbar_{g,n}`: the bulk
/// Bernoulli expression plus one-edge boundary corrections with
/// coefficient `r / |Aut|`, Bernoulli factor `B_{m+1}(w(h)/r)`, and the
/// divided-difference edge polynomial
/// `sum_{i+j=m-1} psi_h^i (-psi_h')^j` of degree `m - 1`.
pub fn chern_char_term(input: &DRInput, r: u64, m: u32) -> Result<TautClass> {
    if m < 1 {
        return Err(Error::Validation("Chern character degree must be >= 1".into()));
    }
    input.check_modulus(r)?;
    let trivial = DecoratedStratum::trivial(input.g, input.n)?;
    let mut out = TautClass::from_stratum(trivial, rat_i(1))
        .mul_leg_polynomial(&chern_bulk_poly(input, r, m), m)?
        .graded_piece(m);
    let inv_fact = Rational::from_integer(factorial(m as usize + 1)).recip();
    for graph in enumerate_stable_graphs(input.g, input.n, 1) {
        if graph.num_edges() != 1 {
            continue;
        }
        let delta = DegreeAssignment::from_inputs(&graph, &input.a, input.k)?;
        let scale = pow_r(r, 1) / rat_i(graph.automorphism_order() as i64) * &inv_fact;
        let mut bern_total = Rational::zero();
        each_weighting(&graph, &delta, r, |side0| {
            bern_total += bernoulli_at_residue(m as usize + 1, side0[0], r);
        });
        if bern_total.is_zero() {
            continue;
        }
        for i in 0..m {
            let j = m - 1 - i;
            let sign = if j.is_multiple_of(2) { rat_i(1) } else { rat_i(-1) };
            let mut decor = Decoration::empty(&graph);
            decor.edge_psi = vec![(i, j)];
            out.add_term(
                DecoratedStratum::new(graph.clone(), decor)?,
                &scale * &bern_total * sign,
            );
        }
    }
    Ok(out)
}

/// The pushforward to `Mbar_{g,n}` of the total Chern class of minus the
/// derived pushforward of the universal `r`-th root of `L`, truncated in
/// codimension `d`:
///
/// `exp(sum_m a_m) * sum_{Γ, #E <= d} sum_{w} r^{2g - 1 - h^1(Γ)} / |Aut Γ|
///    * j_* prod_e (1 - exp(sum_m b_{e,m}(w))) / N_e`.
///
/// The degree-0 part is `r^{2g-1}` times the fundamental class — the
/// degree of the finite flat forgetful map from the space of roots.
pub fn epsilon_total_chern(input: &DRInput, r: u64, d: u32) -> Result<TautClass> {
    input.check_codim(d)?;
    input.check_modulus(r)?;
    let g = input.g as i64;
    let boundary = assemble_boundary(
        input,
        r,
        d,
        |graph| {
            pow_r(r, 2 * g - 1 - graph.betti() as i64)
                / rat_i(graph.automorphism_order() as i64)
        },
        chern_edge_factor,
    )?;
    let exp_factor = exp_trunc(
        &TruncatedLegPoly::new(chern_log_bulk(input, r, d), d),
        d as usize,
    );
    boundary.mul_leg_polynomial(&exp_factor.poly, d)
}

// ---------------------------------------------------------------------------
// Pixton's sum
// ---------------------------------------------------------------------------

/// The codimension-`d` part of Pixton's sum at a fixed modulus:
///
/// `[ exp((1/2) sum a_i^2 psi_i - (1/2) k^2 kappa_1)
///    * sum_Γ r^{-h^1} / |Aut| sum_w j_* prod_e (1 - exp(-(1/2) chat_e N_e)) / N_e ]_d`
///
/// with `chat_e = w(h) w(h')` or `w(e)^2` by the input's convention. The
/// leg exponential is the specialization of `exp(-(1/2) pi_* c_1(L)^2)`
/// via `pi_* c_1(L)^2 = k^2 kappa_1 - sum a_i^2 psi_i`.
pub fn pixton_p(input: &DRInput, d: u32, r: u64) -> Result<TautClass> {
    input.check_codim(d)?;
    input.check_modulus(r)?;
    let convention = input.convention;
    let boundary = assemble_boundary(
        input,
        r,
        d,
        |graph| {
            pow_r(r, -(graph.betti() as i64)) / rat_i(graph.automorphism_order() as i64)
        },
        move |w, r, budget| {
            let chat = match convention {
                EdgeConvention::WWPrime => rat_i((w * ((r - w) % r)) as i64),
                EdgeConvention::WSquared => rat_i((w * w) as i64),
            };
            pixton_edge_factor(&chat, budget)
        },
    )?;
    let mut leg = LegKappaPoly::kappa(1).scale(&rat(-(input.k * input.k), 2));
    for (i, &ai) in input.a.iter().enumerate() {
        leg = leg.add(&LegKappaPoly::psi(i as u32 + 1).scale(&rat(ai * ai, 2)));
    }
    let exp_factor = exp_trunc(&TruncatedLegPoly::new(leg, d), d as usize);
    Ok(boundary
        .mul_leg_polynomial(&exp_factor.poly, d)?
        .graded_piece(d))
}

// ---------------------------------------------------------------------------
// Interpolation in r
// ---------------------------------------------------------------------------

/// Interpolate per-stratum coefficients of fixed-`r` classes into
/// polynomials in `r`.
fn interpolate_classes(samples: &[(u64, TautClass)], bound: usize) -> Result<TautPolyClass> {
    let mut strata: BTreeSet<DecoratedStratum> = BTreeSet::new();
    for (_, cls) in samples {
        for (s, _) in cls.terms() {
            strata.insert(s.clone());
        }
    }
    let mut out = TautPolyClass::zero();
    for stratum in strata {
        let values: Vec<(u64, Rational)> = samples
            .iter()
            .map(|(r, cls)| (*r, cls.coefficient(&stratum)))
            .collect();
        let poly = interpolate_r(&values, bound).map_err(|e| {
            Error::Stabilization(format!("stratum {stratum}: {e}"))
        })?;
        out.add_term(stratum, poly);
    }
    Ok(out)
}

/// The codimension-`d` part of the total-Chern pushforward, rescaled by
/// `r^{2d + 1 - 2g}` and interpolated per stratum into polynomials in `r`
/// (degree bound `2d`, window-verified).
pub fn chiodo_poly(input: &DRInput, d: u32) -> Result<TautPolyClass> {
    chiodo_poly_with_policy(input, d, &RSamplePolicy::default())
}

/// [`chiodo_poly`] with an explicit sampling policy.
pub fn chiodo_poly_with_policy(
    input: &DRInput,
    d: u32,
    policy: &RSamplePolicy,
) -> Result<TautPolyClass> {
    input.check_codim(d)?;
    let bound = 2 * d as usize;
    let rescale = 2 * d as i64 + 1 - 2 * input.g as i64;
    let samples = policy
        .moduli(input, d, bound)
        .into_iter()
        .map(|r| {
            let cls = epsilon_total_chern(input, r, d)?.graded_piece(d);
            Ok((r, cls.scale(&pow_r(r, rescale))))
        })
        .collect::<Result<Vec<_>>>()?;
    interpolate_classes(&samples, bound)
}

/// Pixton's codimension-`d` class interpolated per stratum into
/// polynomials in `r` (degree bound `2d`, window-verified).
pub fn pixton_poly(input: &DRInput, d: u32) -> Result<TautPolyClass> {
    pixton_poly_with_policy(input, d, &RSamplePolicy::default())
}

/// [`pixton_poly`] with an explicit sampling policy.
pub fn pixton_poly_with_policy(
    input: &DRInput,
    d: u32,
    policy: &RSamplePolicy,
) -> Result<TautPolyClass> {
    input.check_codim(d)?;
    let bound = 2 * d as usize;
    let samples = policy
        .moduli(input, d, bound)
        .into_iter()
        .map(|r| Ok((r, pixton_p(input, d, r)?)))
        .collect::<Result<Vec<_>>>()?;
    interpolate_classes(&samples, bound)
}

// ---------------------------------------------------------------------------
// DR and Hodge-DR classes
// ---------------------------------------------------------------------------

/// The double ramification cycle: the constant term at `r = 0` of the
/// degree-`g` interpolation [`chiodo_poly`]`(input, g)` (whose rescale
/// exponent `2g + 1 - 2g = 1` is the single leading power of `r`).
pub fn dr_cycle(input: &DRInput) -> Result<TautClass> {
    dr_cycle_with_policy(input, &RSamplePolicy::default())
}

/// [`dr_cycle`] with an explicit sampling policy.
pub fn dr_cycle_with_policy(input: &DRInput, policy: &RSamplePolicy) -> Result<TautClass> {
    Ok(chiodo_poly_with_policy(input, input.g, policy)?.constant_term())
}

/// All exponent vectors `(e_1, ..., e_n)` with `sum e_i = total`, in
/// lexicographic order.
fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The pairing vector of a pure-codimension class: its integral against
/// every marking-psi monomial of complementary degree, keyed by the
/// exponent vector `(e_1, ..., e_n)`. With `codim` equal to the dimension
/// the vector has a single entry, the plain integral. Two classes that
/// represent the same element of the tautological ring have equal pairing
/// vectors, so this is the relation-robust comparison the acceptance
/// checks rely on (strata coefficients alone can differ by relations).
pub fn pairing_vector(
    class: &TautClass,
    g: u32,
    n: u32,
    codim: u32,
    cache: &mut WittenCache,
) -> Result<Vec<(Vec<u32>, Rational)>> {
    let dim = 3 * g as i64 - 3 + n as i64;
    if (codim as i64) > dim {
        return Err(Error::DimensionOverflow(format!(
            "codimension {codim} exceeds dim Mbar_({g}, {n}) = {dim}"
        )));
    }
    let complement = (dim - codim as i64) as u32;
    let mut out = Vec::new();
    for exps in compositions(n as usize, complement) {
        let monomial: Vec<(u32, u32)> = exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i as u32 + 1, e))
            .collect();
        let paired = class
            .mul_leg_polynomial(&LegKappaPoly::psi_monomial(&monomial), dim as u32)?;
        out.push((exps, paired.integrate(g, n, cache)?));
    }
    Ok(out)
}

/// The degree-`(g + u)` Hodge-DR class: the constant term at `r = 0` of
/// `r^{u+1}` times the degree-`(g+u)` Chern part — equivalently the
/// `r^u` coefficient of [`chiodo_poly`]`(input, g + u)`. At `u = 0` this
/// is exactly [`dr_cycle`].
///
/// The coefficients of `r^0, ..., r^{u-1}` vanish in the tautological
/// ring but not stratum-by-stratum (strata representatives differ by
/// relations), so the structural verification that the `r^{u+1}`-rescaled
/// class is a genuine polynomial checks that each lower coefficient class
/// has an identically zero pairing vector.
pub fn hodge_dr(input: &DRInput) -> Result<TautClass> {
    hodge_dr_with_policy(input, &RSamplePolicy::default())
}

/// [`hodge_dr`] with an explicit sampling policy.
pub fn hodge_dr_with_policy(input: &DRInput, policy: &RSamplePolicy) -> Result<TautClass> {
    let d = input.g + input.u;
    if d as i64 > 3 * input.g as i64 - 3 + input.n as i64 {
        return Err(Error::DimensionOverflow(format!(
            "degree g + u = {d} exceeds dim Mbar_({}, {}) = {}",
            input.g,
            input.n,
            3 * input.g as i64 - 3 + input.n as i64
        )));
    }
    let poly = chiodo_poly_with_policy(input, d, policy)?;
    let mut cache = WittenCache::in_memory();
    for j in 0..input.u {
        let lower = poly.coefficient_class(j as usize);
        for (exps, value) in pairing_vector(&lower, input.g, input.n, d, &mut cache)? {
            if !value.is_zero() {
                return Err(Error::Stabilization(format!(
                    "coefficient class of r^{j} pairs to {value} against the \
                     psi-monomial with exponents {exps:?}, so the \
                     r^{{u+1}}-rescaled class is not polynomial"
                )));
            }
        }
    }
    Ok(poly.coefficient_class(input.u as usize))
}

// ---------------------------------------------------------------------------
// Power-of-r bookkeeping check
// ---------------------------------------------------------------------------

/// Divisibility bookkeeping behind the constant-term extraction. Each
/// graph's contribution on the root space carries the prefactor `r^{#E}`
/// instead of the flat degree, and multiplied by `r^{2d - #E}` it lies in
/// the image of integral Chow — so its denominators are coprime to `r`.
/// On the pushed-forward side that means: per stratum of the
/// codimension-`d` Chern part, the coefficient times
/// `r^{2d} / r^{2g - 1 - h^1(Γ)}` has a denominator coprime to `r` at
/// every sample, and those values interpolate (degree bound `2d + g`,
/// since the weighting sum contributes up to `h^1 ≤ g` extra powers) to a
/// polynomial whose coefficient denominators are coprime to every sample
/// modulus. Errors with [`Error::Counterexample`] on any violation.
///
/// The samples here are drawn with a floor of `2d + 1`, stricter than the
/// interpolation commands need: summing an edge factor over the `r`
/// weightings convolves Bernoulli values into Bernoulli numbers of index
/// up to `2d` (e.g. `sum_w B_2(w/r)^2 = r/180 + 1/(18r) - 1/(30r^3)`),
/// and by von Staudt–Clausen their denominators contain exactly the
/// primes `p` with `p - 1` dividing the index — all of them at most
/// `2d + 1`. Those primes genuinely divide the stratum denominators (the
/// claim is false at `r = 5`, `d = 2`), so they are not admissible for
/// the divisibility claim, only for plain interpolation.
pub fn check_count_integrality(
    input: &DRInput,
    d: u32,
    policy: &RSamplePolicy,
) -> Result<()> {
    input.check_codim(d)?;
    let bound = 2 * d as usize + input.g as usize;
    let strict = RSamplePolicy {
        threshold_floor: policy.threshold_floor.max(2 * u64::from(d) + 1),
        ..policy.clone()
    };
    let moduli = strict.moduli(input, d, bound);
    let mut samples: Vec<(u64, TautClass)> = Vec::with_capacity(moduli.len());
    for r in &moduli {
        let cls = epsilon_total_chern(input, *r, d)?.graded_piece(d);
        let mut stripped = TautClass::zero();
        for (stratum, coeff) in cls.terms() {
            let graph = stratum.graph();
            let strip = pow_r(
                *r,
                2 * d as i64 - (2 * input.g as i64 - 1 - graph.betti() as i64),
            );
            let value = coeff * strip;
            if (value.denom() % num_bigint::BigInt::from(*r)).is_zero() {
                return Err(Error::Counterexample(format!(
                    "stratum {stratum}: rescaled sample value {value} at r = {r} \
                     has denominator divisible by r"
                )));
            }
            stripped.add_term(stratum.clone(), value);
        }
        samples.push((*r, stripped));
    }
    let interpolated = interpolate_classes(&samples, bound)?;
    for (stratum, poly) in interpolated.terms() {
        for coeff in poly.coeffs() {
            for r in &moduli {
                if (coeff.denom() % num_bigint::BigInt::from(*r)).is_zero() {
                    return Err(Error::Counterexample(format!(
                        "stratum {stratum}: coefficient {coeff} has denominator \
                         divisible by the sample modulus {r}"
                    )));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
