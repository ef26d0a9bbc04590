//! Bredon cohomology of real Grassmannians `Gr_k(R^{p,q})` with constant
//! `F_2` coefficients, computed by comparing the possible outcomes of the
//! cellular spectral sequences built from different orderings of the sign
//! coordinates.

pub mod bipoly;
pub mod cache;
pub mod cli;
pub mod error;
pub mod modalg;
pub mod oracle;
pub mod schubert;
pub mod search;

pub use bipoly::{kronholm_poly, BiPoly, UniPoly};
pub use error::{Error, Result};
pub use modalg::{Bidegree, FreeModule, PointCone, ShiftMove};
pub use schubert::{e1_page, e1_quotient_page, unique_e1_pages, SchubertCell, SignWord};
pub use search::{candidate_outcomes, solve, Budget, SolveOptions, SolveReport, Strategy};
