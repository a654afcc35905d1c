//! Isolated cluster varieties `X(M)`: seed combinatorics, the structure
//! decomposition `X(M) = X(d)^n / G x (C*)^(m-n)`, bigraded weight/perverse
//! tables, and an exact finite-field point-counting oracle that checks them.

pub mod cluster;
pub mod count;
pub mod error;
pub mod hodge;
pub mod intlat;
pub mod poly;
pub mod variety;

pub use error::{Error, Result};
pub use intlat::IntMatrix;
