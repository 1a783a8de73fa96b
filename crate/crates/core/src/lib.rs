//! Exact symbolic computation for the bosonic extension attached to a
//! symmetrizable generalized Cartan matrix: normal forms for the level-graded
//! generators, the faithful serial representation, bilinear forms, and (in
//! finite type) dual PBW monomials, the upper global basis and the global
//! basis of the extension itself.
//!
//! All arithmetic is exact over Q(q^{1/2}); see [`scalars`]. The shared
//! computation context is [`uqneg::Algebra`], which owns the Cartan datum,
//! the height bound and every cache.

pub mod aqn;
pub mod bosonic;
pub mod cartan;
pub mod error;
pub mod globalbasis;
pub mod linalg;
pub mod scalars;
pub mod uqneg;
pub mod verify;

pub use cartan::{CartanDatum, RootVec};
pub use error::{Error, Result};
pub use scalars::{LaurentHalf, RatFunc};
pub use uqneg::Algebra;
