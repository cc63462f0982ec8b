//! Imaginary quadratic arithmetic for the CM side of the construction.
//!
//! The chain runs: a field K = Q(sqrt(-D)) satisfying the splitting
//! condition at the level, the distinguished cyclic-quotient ideal of
//! norm N, the class group via reduced binary quadratic forms, the
//! mixed ray/ring class quotients of conductor frakN p^m, CM points
//! with their matrix embeddings into the level monoid, and algebraic
//! Grössencharacters evaluated as p-adic numbers.

mod abelian;
mod dirichlet;
mod field;
mod forms;
mod grossenchar;
mod ideal;
mod point;
mod rayclass;

pub use abelian::{presentation, AbelianPresentation};
pub use dirichlet::{DirichletChar, DirichletGroup};
pub use grossenchar::{grossenchar_enumerate, GrossenChar};
pub use field::{heegner_check, kronecker, HeegnerCert, KElem, QuadField};
pub(crate) use field::factorize;
pub use forms::{class_group, form_to_ideal, ideal_to_form, reduced_forms, ClassGroupData, QuadForm};
pub use ideal::{choose_frak_n, QFIdeal};
pub use point::{cm_point, embed_pair, prime_of_first_embedding, CMPoint};
pub use rayclass::{galois_tower, ray_class_group, GaloisTower, KFraction, RayClassData};
