//! Shared numerical kernels: 2-D convolution, symmetric eigendecomposition,
//! and LBFGS minimization.

pub mod conv;
pub mod eigen;
pub mod lbfgs;

pub use conv::{conv2d_same, conv2d_same_complex, reflect_index};
pub use eigen::{sym_eigen, EigenDecomposition, SymMatrix};
pub use lbfgs::{lbfgs_minimize, MinimizeResult, OptimizerOptions};
