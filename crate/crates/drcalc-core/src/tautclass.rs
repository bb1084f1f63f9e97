//! Tautological classes presented as rational combinations of decorated
//! boundary strata.
//!
//! A decorated stratum is a stable graph together with psi exponents on
//! legs and half-edges and a kappa multiset on each vertex; it represents
//! the pushforward of the corresponding monomial along the gluing map of
//! the stratum. Strata canonicalize on construction, so equal classes have
//! equal representations and coefficient merging is automatic.
//!
//! Conventions: coefficients such as `1/|Aut|` always live in the class
//! coefficients, never implicitly in the stratum; accordingly the integral
//! of an undecorated one-edge stratum class `j_* 1` over `Mbar_{1,1}` is
//! `1`, and the normalized boundary divisor is `(1/2) j_* 1`.
//!
//! Products: classes can be multiplied by polynomials in leg psi classes
//! and (total) kappa classes via [`TautClass::mul_leg_polynomial`]; kappa
//! classes restrict to boundary strata as sums over vertices, which the
//! multiplication expands. General products of two boundary classes are
//! not implemented (the calculators never need them).

use crate::error::{Error, Result};
use crate::exactmath::{format_rational, parse_rational, rat_i, RPoly, Rational, Trunc};
use crate::graphs::{canonical_decorated, Decoration, StableGraph};
use crate::witten::{kappa_psi_integral, WittenCache};
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Decorated strata
// ---------------------------------------------------------------------------

/// A boundary stratum decorated with psi and kappa classes, kept in
/// canonical form (isomorphic presentations construct equal values).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedStratum {
    graph: StableGraph,
    decor: Decoration,
}

impl DecoratedStratum {
    /// Construct from a graph and decorations, validating shapes and
    /// canonicalizing the presentation.
    pub fn new(graph: StableGraph, decor: Decoration) -> Result<Self> {
        if decor.kappa.len() != graph.num_vertices()
            || decor.leg_psi.len() != graph.num_legs()
            || decor.edge_psi.len() != graph.num_edges()
        {
            return Err(Error::Validation(
                "decoration shape does not match the graph".into(),
            ));
        }
        if decor.kappa.iter().flatten().any(|&k| k == 0) {
            return Err(Error::Validation(
                "kappa_0 is a scalar and cannot decorate a stratum".into(),
            ));
        }
        let rep = canonical_decorated(&graph, &decor);

        // Materialize the canonical representative back into a concrete
        // presentation so that equality/ordering are plain derived ones.
        let mut genera = Vec::with_capacity(rep.vertices.len());
        let mut kappa = Vec::with_capacity(rep.vertices.len());
        let mut legs_with_psi: Vec<(u32, usize, u32)> = Vec::new(); // label, vertex, psi
        for (v, (g, ks, legs)) in rep.vertices.iter().enumerate() {
            genera.push(*g);
            kappa.push(ks.clone());
            for &(label, psi) in legs {
                legs_with_psi.push((label, v, psi));
            }
        }
        legs_with_psi.sort_unstable();
        let leg_psi: Vec<u32> = legs_with_psi.iter().map(|&(_, _, p)| p).collect();
        let legs: Vec<(u32, usize)> =
            legs_with_psi.iter().map(|&(l, v, _)| (l, v)).collect();
        let mut edges = Vec::with_capacity(rep.edges.len());
        let mut edge_psi = Vec::with_capacity(rep.edges.len());
        for &((va, pa), (vb, pb)) in &rep.edges {
            edges.push((va, vb));
            edge_psi.push((pa, pb));
        }
        let graph = StableGraph::build(&genera, &legs, &edges)?;
        Ok(DecoratedStratum {
            graph,
            decor: Decoration { kappa, leg_psi, edge_psi },
        })
    }

    /// The undecorated trivial stratum (smooth locus) of `Mbar_{g,n}`.
    pub fn trivial(g: u32, n: u32) -> Result<Self> {
        let graph = StableGraph::trivial(g, n)?;
        let decor = Decoration::empty(&graph);
        DecoratedStratum::new(graph, decor)
    }

    /// The undecorated stratum of a stable graph.
    pub fn undecorated(graph: StableGraph) -> Result<Self> {
        let decor = Decoration::empty(&graph);
        DecoratedStratum::new(graph, decor)
    }

    /// Underlying stable graph (canonical presentation).
    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    /// Decorations (aligned with the canonical presentation).
    pub fn decoration(&self) -> &Decoration {
        &self.decor
    }

    /// Codimension: number of edges plus total psi/kappa degree.
    pub fn codim(&self) -> u32 {
        self.graph.num_edges() as u32 + self.decor.decoration_degree()
    }

    /// Ambient genus and number of legs.
    pub fn ambient(&self) -> (u32, u32) {
        (self.graph.genus(), self.graph.num_legs() as u32)
    }
}

impl fmt::Display for DecoratedStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.graph)?;
        for (i, &p) in self.decor.leg_psi.iter().enumerate() {
            if p > 0 {
                write!(f, " psi(l{})^{}", self.graph.legs()[i].label, p)?;
            }
        }
        for (e, &(p0, p1)) in self.decor.edge_psi.iter().enumerate() {
            if p0 > 0 {
                write!(f, " psi(e{e}h0)^{p0}")?;
            }
            if p1 > 0 {
                write!(f, " psi(e{e}h1)^{p1}")?;
            }
        }
        for (v, ks) in self.decor.kappa.iter().enumerate() {
            if !ks.is_empty() {
                write!(f, " kappa{ks:?}@v{v}")?;
            }
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// Polynomials in leg psi and kappa classes
// ---------------------------------------------------------------------------

/// Monomial in leg psi classes (by leg label) and kappa classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LegKappaMonomial {
    /// Map leg label -> psi exponent (no zero exponents stored).
    pub leg_psi: BTreeMap<u32, u32>,
    /// Kappa indices, sorted ascending (repeats allowed).
    pub kappa: Vec<u32>,
}

impl LegKappaMonomial {
    /// Total degree (psi exponents plus kappa indices).
    pub fn degree(&self) -> u32 {
        self.leg_psi.values().sum::<u32>() + self.kappa.iter().sum::<u32>()
    }
}

/// Polynomial in leg psi classes and kappa classes with rational
/// coefficients; the argument type of [`TautClass::mul_leg_polynomial`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LegKappaPoly {
    terms: BTreeMap<LegKappaMonomial, Rational>,
}

impl LegKappaPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LegKappaPoly::default()
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Rational) -> Self {
        let mut p = LegKappaPoly::default();
        p.add_term(LegKappaMonomial::default(), c);
        p
    }

    /// The unit.
    pub fn one() -> Self {
        LegKappaPoly::constant(rat_i(1))
    }

    /// The psi class at a leg label.
    pub fn psi(label: u32) -> Self {
        LegKappaPoly::psi_power(label, 1)
    }

    /// `psi_label^e`.
    pub fn psi_power(label: u32, e: u32) -> Self {
        let mut m = LegKappaMonomial::default();
        if e > 0 {
            m.leg_psi.insert(label, e);
        }
        let mut p = LegKappaPoly::default();
        p.add_term(m, rat_i(1));
        p
    }

    /// The kappa class of a given index.
    pub fn kappa(index: u32) -> Self {
        let mut m = LegKappaMonomial::default();
        m.kappa.push(index);
        let mut p = LegKappaPoly::default();
        p.add_term(m, rat_i(1));
        p
    }

    /// A monomial `prod psi_i^{e_i}` from explicit label/exponent pairs.
    pub fn psi_monomial(pairs: &[(u32, u32)]) -> Self {
        let mut m = LegKappaMonomial::default();
        for &(label, e) in pairs {
            if e > 0 {
                *m.leg_psi.entry(label).or_insert(0) += e;
            }
        }
        let mut p = LegKappaPoly::default();
        p.add_term(m, rat_i(1));
        p
    }

    fn add_term(&mut self, m: LegKappaMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    /// Sum.
    pub fn add(&self, rhs: &LegKappaPoly) -> LegKappaPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> LegKappaPoly {
        let mut out = LegKappaPoly::default();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Product, truncating monomials of degree above `max_degree`.
    pub fn mul_trunc(&self, rhs: &LegKappaPoly, max_degree: u32) -> LegKappaPoly {
        let mut out = LegKappaPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if ma.degree() + mb.degree() > max_degree {
                    continue;
                }
                let mut m = ma.clone();
                for (&label, &e) in &mb.leg_psi {
                    *m.leg_psi.entry(label).or_insert(0) += e;
                }
                m.kappa.extend_from_slice(&mb.kappa);
                m.kappa.sort_unstable();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Drop monomials of degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> LegKappaPoly {
        let mut out = LegKappaPoly::default();
        for (m, c) in &self.terms {
            if m.degree() <= max_degree {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Term iterator (canonical order).
    pub fn terms(&self) -> impl Iterator<Item = (&LegKappaMonomial, &Rational)> {
        self.terms.iter()
    }

    /// True when the polynomial has no terms.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// [`LegKappaPoly`] together with a truncation degree: the graded truncated
/// algebra used by the exponential assembly in the formula layer.
#[derive(Debug, Clone)]
pub struct TruncatedLegPoly {
    /// Underlying polynomial (kept truncated at `trunc`).
    pub poly: LegKappaPoly,
    /// Maximal retained total degree.
    pub trunc: u32,
}

impl TruncatedLegPoly {
    /// Wrap a polynomial, truncating it.
    pub fn new(poly: LegKappaPoly, trunc: u32) -> Self {
        TruncatedLegPoly { poly: poly.truncate(trunc), trunc }
    }
}

impl Trunc for TruncatedLegPoly {
    fn t_one(&self) -> Self {
        TruncatedLegPoly::new(LegKappaPoly::one(), self.trunc)
    }
    fn t_zero(&self) -> Self {
        TruncatedLegPoly::new(LegKappaPoly::zero(), self.trunc)
    }
    fn t_add(&self, rhs: &Self) -> Self {
        TruncatedLegPoly::new(self.poly.add(&rhs.poly), self.trunc)
    }
    fn t_mul(&self, rhs: &Self) -> Self {
        TruncatedLegPoly::new(self.poly.mul_trunc(&rhs.poly, self.trunc), self.trunc)
    }
    fn t_scale(&self, c: &Rational) -> Self {
        TruncatedLegPoly::new(self.poly.scale(c), self.trunc)
    }
    fn t_graded_piece(&self, m: usize) -> Self {
        let mut out = LegKappaPoly::default();
        for (mon, c) in &self.poly.terms {
            if mon.degree() as usize == m {
                out.add_term(mon.clone(), c.clone());
            }
        }
        TruncatedLegPoly::new(out, self.trunc)
    }
    fn t_is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

// ---------------------------------------------------------------------------
// Tautological classes
// ---------------------------------------------------------------------------

/// A rational combination of decorated strata of a fixed `Mbar_{g,n}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TautClass {
    terms: BTreeMap<DecoratedStratum, Rational>,
}

impl TautClass {
    /// The zero class.
    pub fn zero() -> Self {
        TautClass::default()
    }

    /// A single term.
    pub fn from_stratum(stratum: DecoratedStratum, coeff: Rational) -> Self {
        let mut c = TautClass::default();
        c.add_term(stratum, coeff);
        c
    }

    /// Add a term in place (merging and dropping zeros).
    pub fn add_term(&mut self, stratum: DecoratedStratum, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(stratum.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&stratum);
        }
    }

    /// Sum of two classes.
    pub fn add(&self, rhs: &TautClass) -> TautClass {
        let mut out = self.clone();
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rational) -> TautClass {
        let mut out = TautClass::default();
        for (s, v) in &self.terms {
            out.add_term(s.clone(), v * c);
        }
        out
    }

    /// Re-canonicalize and merge all terms. Construction already
    /// canonicalizes, so this is the identity on classes built through the
    /// public API; it exists to normalize externally loaded data and is
    /// idempotent.
    pub fn normalize(&self) -> TautClass {
        let mut out = TautClass::default();
        for (s, c) in &self.terms {
            let rebuilt = DecoratedStratum::new(s.graph.clone(), s.decor.clone())
                .expect("stored strata are valid");
            out.add_term(rebuilt, c.clone());
        }
        out
    }

    /// Term iterator in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedStratum, &Rational)> {
        self.terms.iter()
    }

    /// Number of terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of a stratum (zero if absent).
    pub fn coefficient(&self, stratum: &DecoratedStratum) -> Rational {
        self.terms.get(stratum).cloned().unwrap_or_else(Rational::zero)
    }

    /// True when the class has no terms.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The part of the class in a single codimension.
    pub fn graded_piece(&self, codim: u32) -> TautClass {
        let mut out = TautClass::default();
        for (s, c) in &self.terms {
            if s.codim() == codim {
                out.add_term(s.clone(), c.clone());
            }
        }
        out
    }

    /// Multiply by a polynomial in leg psi and kappa classes, truncating
    /// strata of codimension above `max_codim`.
    ///
    /// Leg psi classes restrict to the psi class at the leg; kappa classes
    /// restrict to a boundary stratum as the sum of the vertex kappa
    /// classes, which is expanded here (an index-0 kappa is the scalar
    /// `2 g_v - 2 + val(v)` on each vertex). Errors if a psi label does not
    /// exist in a stratum's graph.
    pub fn mul_leg_polynomial(
        &self,
        poly: &LegKappaPoly,
        max_codim: u32,
    ) -> Result<TautClass> {
        let mut out = TautClass::default();
        for (stratum, coeff) in &self.terms {
            for (monomial, mcoeff) in &poly.terms {
                if stratum.codim() + monomial.degree() > max_codim {
                    continue;
                }
                // Apply leg psi factors.
                let mut decor = stratum.decor.clone();
                for (&label, &e) in &monomial.leg_psi {
                    let position = stratum
                        .graph
                        .legs()
                        .iter()
                        .position(|l| l.label == label)
                        .ok_or_else(|| {
                            Error::Validation(format!(
                                "psi generator references missing leg label {label}"
                            ))
                        })?;
                    decor.leg_psi[position] += e;
                }
                // Distribute each kappa factor over the vertices.
                let nv = stratum.graph.num_vertices();
                let mut assignments: Vec<(Decoration, Rational)> =
                    vec![(decor, coeff * mcoeff)];
                for &index in &monomial.kappa {
                    let mut next = Vec::with_capacity(assignments.len() * nv);
                    for (d, c) in &assignments {
                        for v in 0..nv {
                            let mut dv = d.clone();
                            let mut cv = c.clone();
                            if index == 0 {
                                let scalar = 2 * stratum.graph.genera()[v] as i64 - 2
                                    + stratum.graph.valence(v) as i64;
                                cv *= rat_i(scalar);
                            } else {
                                dv.kappa[v].push(index);
                                dv.kappa[v].sort_unstable();
                            }
                            if !cv.is_zero() {
                                next.push((dv, cv));
                            }
                        }
                    }
                    assignments = next;
                }
                for (d, c) in assignments {
                    let term = DecoratedStratum::new(stratum.graph.clone(), d)?;
                    out.add_term(term, c);
                }
            }
        }
        Ok(out)
    }

    /// Integrate a top-codimension class over `Mbar_{g,n}`.
    ///
    /// Every term must have codimension exactly `3g - 3 + n` (degree
    /// mismatch is an error) and live on the right ambient space. Each
    /// stratum integral factors over the vertex moduli; vertex factors with
    /// unbalanced local degree integrate to zero.
    pub fn integrate(&self, g: u32, n: u32, cache: &mut WittenCache) -> Result<Rational> {
        let dim = 3 * g as i64 - 3 + n as i64;
        if dim < 0 {
            return Err(Error::Instability(format!(
                "Mbar_({g},{n}) does not exist"
            )));
        }
        let mut total = Rational::zero();
        for (stratum, coeff) in &self.terms {
            if stratum.ambient() != (g, n) {
                return Err(Error::Validation(format!(
                    "stratum of ambient {:?} integrated over Mbar_({g},{n})",
                    stratum.ambient()
                )));
            }
            if stratum.codim() as i64 != dim {
                return Err(Error::DegreeMismatch(format!(
                    "integrand term has codimension {} but dim Mbar_({g},{n}) = {dim}",
                    stratum.codim()
                )));
            }
            let mut factor = coeff.clone();
            for v in 0..stratum.graph.num_vertices() {
                if factor.is_zero() {
                    break;
                }
                // Local markings: legs first, then half-edges, each with
                // its psi exponent.
                let mut psi: Vec<u32> = Vec::new();
                for (i, leg) in stratum.graph.legs().iter().enumerate() {
                    if leg.vertex == v {
                        psi.push(stratum.decor.leg_psi[i]);
                    }
                }
                for (e, edge) in stratum.graph.edges().iter().enumerate() {
                    for side in 0..2 {
                        if edge.v[side] == v {
                            let (p0, p1) = stratum.decor.edge_psi[e];
                            psi.push(if side == 0 { p0 } else { p1 });
                        }
                    }
                }
                let local = kappa_psi_integral(
                    stratum.graph.genera()[v],
                    &psi,
                    &stratum.decor.kappa[v],
                    cache,
                )?;
                factor *= local;
            }
            total += factor;
        }
        Ok(total)
    }
}

// ---------------------------------------------------------------------------
// Classes with polynomial coefficients in r
// ---------------------------------------------------------------------------

/// A combination of decorated strata whose coefficients are polynomials in
/// the root order `r` (the result of interpolating fixed-`r` classes).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TautPolyClass {
    terms: BTreeMap<DecoratedStratum, RPoly>,
}

impl TautPolyClass {
    /// The zero class.
    pub fn zero() -> Self {
        TautPolyClass::default()
    }

    /// Add a term (merging; zero polynomials are dropped).
    pub fn add_term(&mut self, stratum: DecoratedStratum, poly: RPoly) {
        if poly.is_zero() {
            return;
        }
        let entry = self.terms.entry(stratum.clone()).or_insert_with(RPoly::zero);
        *entry = entry.add(&poly);
        if entry.is_zero() {
            self.terms.remove(&stratum);
        }
    }

    /// Term iterator in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedStratum, &RPoly)> {
        self.terms.iter()
    }

    /// Number of terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient polynomial of a stratum (zero if absent).
    pub fn coefficient(&self, stratum: &DecoratedStratum) -> RPoly {
        self.terms.get(stratum).cloned().unwrap_or_else(RPoly::zero)
    }

    /// The class of `r^k` coefficients.
    pub fn coefficient_class(&self, k: usize) -> TautClass {
        let mut out = TautClass::zero();
        for (s, p) in &self.terms {
            out.add_term(s.clone(), p.coeff(k));
        }
        out
    }

    /// The constant-term class (coefficient of `r^0`).
    pub fn constant_term(&self) -> TautClass {
        self.coefficient_class(0)
    }

    /// Evaluate all coefficients at a fixed `r`.
    pub fn eval_u64(&self, r: u64) -> TautClass {
        let mut out = TautClass::zero();
        for (s, p) in &self.terms {
            out.add_term(s.clone(), p.eval_u64(r));
        }
        out
    }

    /// Largest degree among the coefficient polynomials.
    pub fn max_degree(&self) -> usize {
        self.terms
            .values()
            .filter_map(|p| p.degree())
            .max()
            .unwrap_or(0)
    }
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

fn psi_map_to_json(stratum: &DecoratedStratum) -> BTreeMap<String, u32> {
    let mut out = BTreeMap::new();
    for (i, &p) in stratum.decor.leg_psi.iter().enumerate() {
        if p > 0 {
            out.insert(format!("l{}", stratum.graph.legs()[i].label), p);
        }
    }
    for (e, &(p0, p1)) in stratum.decor.edge_psi.iter().enumerate() {
        if p0 > 0 {
            out.insert(format!("e{e}h0"), p0);
        }
        if p1 > 0 {
            out.insert(format!("e{e}h1"), p1);
        }
    }
    out
}

fn kappa_map_to_json(stratum: &DecoratedStratum) -> BTreeMap<String, Vec<u32>> {
    let mut out = BTreeMap::new();
    for (v, ks) in stratum.decor.kappa.iter().enumerate() {
        if !ks.is_empty() {
            out.insert(v.to_string(), ks.clone());
        }
    }
    out
}

fn stratum_from_json(
    graph: StableGraph,
    psi: &BTreeMap<String, u32>,
    kappa: &BTreeMap<String, Vec<u32>>,
) -> Result<DecoratedStratum> {
    let mut decor = Decoration::empty(&graph);
    for (id, &e) in psi {
        if e == 0 {
            continue;
        }
        if let Some(label_text) = id.strip_prefix('l') {
            let label: u32 = label_text.parse().map_err(|_| {
                Error::Validation(format!("malformed psi id `{id}`"))
            })?;
            let position = graph
                .legs()
                .iter()
                .position(|l| l.label == label)
                .ok_or_else(|| Error::Validation(format!("psi id `{id}`: no such leg")))?;
            decor.leg_psi[position] += e;
        } else if let Some(rest) = id.strip_prefix('e') {
            let (edge_text, side_text) = rest.split_once('h').ok_or_else(|| {
                Error::Validation(format!("malformed psi id `{id}`"))
            })?;
            let edge: usize = edge_text.parse().map_err(|_| {
                Error::Validation(format!("malformed psi id `{id}`"))
            })?;
            let side: usize = side_text.parse().map_err(|_| {
                Error::Validation(format!("malformed psi id `{id}`"))
            })?;
            if edge >= graph.num_edges() || side > 1 {
                return Err(Error::Validation(format!("psi id `{id}`: no such half-edge")));
            }
            if side == 0 {
                decor.edge_psi[edge].0 += e;
            } else {
                decor.edge_psi[edge].1 += e;
            }
        } else {
            return Err(Error::Validation(format!("malformed psi id `{id}`")));
        }
    }
    for (vertex_text, ks) in kappa {
        let v: usize = vertex_text.parse().map_err(|_| {
            Error::Validation(format!("malformed kappa vertex `{vertex_text}`"))
        })?;
        if v >= graph.num_vertices() {
            return Err(Error::Validation(format!("kappa vertex {v} out of range")));
        }
        decor.kappa[v].extend_from_slice(ks);
        decor.kappa[v].sort_unstable();
    }
    DecoratedStratum::new(graph, decor)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    graph: StableGraph,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    psi: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    kappa: BTreeMap<String, Vec<u32>>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyTermJson {
    graph: StableGraph,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    psi: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    kappa: BTreeMap<String, Vec<u32>>,
    coeff_poly: Vec<String>,
}

impl Serialize for TautClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(s, c)| TermJson {
                graph: s.graph.clone(),
                psi: psi_map_to_json(s),
                kappa: kappa_map_to_json(s),
                coeff: format_rational(c),
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TautClass {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<TermJson>::deserialize(deserializer)?;
        let mut out = TautClass::zero();
        for term in raw {
            let stratum = stratum_from_json(term.graph, &term.psi, &term.kappa)
                .map_err(D::Error::custom)?;
            let coeff = parse_rational(&term.coeff).map_err(D::Error::custom)?;
            out.add_term(stratum, coeff);
        }
        Ok(out)
    }
}

impl Serialize for TautPolyClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<PolyTermJson> = self
            .terms
            .iter()
            .map(|(s, p)| PolyTermJson {
                graph: s.graph.clone(),
                psi: psi_map_to_json(s),
                kappa: kappa_map_to_json(s),
                coeff_poly: p.coeffs().iter().map(format_rational).collect(),
            })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TautPolyClass {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<PolyTermJson>::deserialize(deserializer)?;
        let mut out = TautPolyClass::zero();
        for term in raw {
            let stratum = stratum_from_json(term.graph, &term.psi, &term.kappa)
                .map_err(D::Error::custom)?;
            let coeffs = term
                .coeff_poly
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>>>()
                .map_err(D::Error::custom)?;
            out.add_term(stratum, RPoly::new(coeffs));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
