pub mod domains;
pub mod error;
pub mod jacobi;
pub mod linalg_model;
pub mod positivity;
pub mod quadrature;
pub mod traceform;
pub mod specfun;

pub use error::{DtnError, Result};
pub use num_complex::Complex64;
