//! Numerical laboratory for rational inner functions on the bidisk.

pub mod analysis;
pub mod boundary;
pub mod dd;
pub mod error;
pub mod fit;
pub mod halfplane;
pub mod kernels;
pub mod norms;
pub mod poly2;
pub mod quad;
pub mod registry;
pub mod rif;
pub mod roots1;
pub mod serde_util;

pub use error::{Error, Result};
pub use poly2::{Axis, BiPoly, SeriesGrid, UniPoly, C64};
pub use rif::Rif;
