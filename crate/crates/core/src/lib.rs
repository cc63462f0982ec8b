//! Exact p-adic computation library for two-parameter families of CM
//! distribution classes.
//!
//! The library is organised in layers:
//!
//! * [`padic`] — capped-precision arithmetic in `Q_p` and finite extensions
//!   presented by one monic polynomial (unramified or Eisenstein), together
//!   with the elementary analytic toolkit: Teichmüller lifts, `log1`/`exp1`,
//!   unit powers, square and n-th roots, and roots of unity.
//! * [`weight`] — closed discs in weight space, their truncated coordinate
//!   rings `O_L[[u]]`, the universal character, and binomial coefficients in
//!   the weight variable.
//! * [`dist`] — divided-power symmetric algebra, modules of analytic
//!   functions and their dual distribution modules over a weight disc, the
//!   monoid action, moment maps, CM eigen-distributions, the overconvergent
//!   projector, and the congruence-floor report.
//! * [`cm`] — imaginary quadratic fields: quadratic forms and class groups,
//!   ray-class quotients, CM points and their matrix embeddings, Dirichlet
//!   characters, and algebraic Grössencharacters evaluated p-adically.
//! * [`qexp`] — q-expansion algebra: Hecke polynomials, p-stabilisation,
//!   `U_p`/`V_p`/depletion/theta operators, and two-parameter twists of
//!   ingested Coleman-family data.
//! * [`interp`] — symbolic Euler-factor calculus with certified relation
//!   rewriting, Gauss sums, interpolation constants with period bookkeeping,
//!   and the class-group sum skeleton of the BDP-style p-adic L-function.
//!
//! All arithmetic is exact: elements carry their absolute p-adic precision
//! and every operation propagates it pessimistically, so an equality reported
//! at precision `t` is a proof of congruence mod `p^t`.

pub mod checks;
pub mod cm;
pub mod dist;
pub mod error;
pub mod interp;
pub mod padic;
pub mod qexp;
pub mod report;
pub mod ring;
pub mod weight;

pub use error::{Error, Result};
pub use padic::{PadicContext, PadicNum, Val, ValBound};
pub use weight::{IwasawaElem, WeightDisc};
