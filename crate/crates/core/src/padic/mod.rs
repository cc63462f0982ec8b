//! Exact arithmetic in Q_p and in single unramified or Eisenstein
//! extensions, at a fixed working precision.
//!
//! Elements track their own absolute precision and an explicit p-power
//! denominator, so valuations of nonzero elements are exact and loss from
//! division is visible rather than silent.  Transcendental maps (Teichmüller
//! lift, Iwasawa logarithm, exponential, roots) live in `special`.


mod context;
mod fppoly;
mod num;
mod special;

pub use context::{ExtKind, PadicContext};
pub use num::{PadicNum, Val, ValBound};
pub use special::{
    exp1, log1, nth_root, root_of_unity, sqrt, teichmuller, unit_power,
};

