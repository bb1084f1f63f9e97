//! Exact-arithmetic calculator for double ramification (DR) cycles and
//! Hodge–DR classes on the moduli space of stable curves.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in this crate. The main entry points live in
//! [`formulas`]:
//!
//! * [`formulas::dr_cycle`] — the DR cycle as the constant term (in the root
//!   order `r`) of the rescaled Chiodo class,
//! * [`formulas::hodge_dr`] — higher Hodge–DR classes,
//! * [`formulas::chiodo_poly`] / [`formulas::pixton_poly`] — per-stratum
//!   coefficient polynomials in `r`, obtained by exact interpolation over
//!   admissible prime samples,
//! * [`formulas::pixton_p`] — Pixton's mixed-degree class at fixed `r`.
//!
//! Supporting layers: [`exactmath`] (rationals, polynomials, Bernoulli,
//! interpolation), [`graphs`] (stable graphs, canonical forms,
//! automorphisms), [`weightings`] (mod-`r` edge weightings), [`tautclass`]
//! (decorated boundary strata with psi/kappa decorations), [`witten`]
//! (Witten correlators via the DVV recursion, with a persistent cache),
//! [`excess`] (excess-dimension bookkeeping for subcurve configurations).

pub mod error;
pub mod exactmath;
pub mod excess;
pub mod formulas;
pub mod graphs;
pub mod tautclass;
pub mod weightings;
pub mod witten;

pub use error::{Error, Result};
