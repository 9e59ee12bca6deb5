//! Mod-2 homology of free E∞ cones on two-cell complexes, the dual Steenrod
//! algebra, and a bookkeeping simulator for inductive E∞ cell attachments
//! over tabulated stable stems.

pub mod abelian;
pub mod bitmat;
pub mod builder;
pub mod cofiber;
pub mod dual_steenrod;
pub mod dyer_lashof;
pub mod error;
pub mod f2poly;
pub mod free_homology;
pub mod stems;

pub use error::{AlgebraError, BuildError, TableError};
