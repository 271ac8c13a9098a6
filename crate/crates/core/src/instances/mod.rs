//! Concrete dynamic theories.

mod kripke;
mod rendition;
mod semiring;

pub use kripke::{kripke_theory, KripkeModel, KripkeTheory};
pub use rendition::{default_vector, rendition_loopfree, twin_state, RenditionError};
pub use semiring::{semiring_theory, Carrier, InductiveExpressivity, SemiringTheory};
