//! Truncated q-expansions, validated newform records, p-stabilisation,
//! and the two-parameter theta twist of an ingested eigenform family.
//!
//! Everything modular is ingested, never computed: records and family
//! stubs arrive with their coefficients and are certified against the
//! eigen-structure they claim (a_1 = 1, multiplicativity, the Hecke
//! recursion, U_p eigenvalues, Lambda-coherence) before any operator
//! touches them.  Truncation lengths are part of the data, and each
//! operator states how much survives it.

mod expansion;
mod family;
mod newform;
mod stabilize;

pub use expansion::{theta_power, QExpansion, ThetaExp, WeightTag};
pub use family::{family_theta_twist, CharSpace, FamilySpec, FamilyStub, FamilyTwist};
pub use newform::{
    eta_square_11, newform_from_json, newform_to_json, synthetic_record, NewformRecord,
};
pub use stabilize::{hecke_poly, p_stabilize, HeckePoly, RootStatus};
