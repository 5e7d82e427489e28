//! Finite-geometry engine for unitals: hermitian and Figueroa polar unitals,
//! their translations, and the permutation groups those translations generate.

mod bits;
pub mod field;
pub mod figueroa;
pub mod groups;
pub mod incidence;
pub mod plane;
pub mod structure;
pub mod translation;

pub use field::{Field, FieldElement, FieldError};
pub use incidence::{Incidence, Unital};
