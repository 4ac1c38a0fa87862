//! Texture segmentation built from three stages: a fixed wavelet scattering
//! front-end, stacked convolutional Gaussian-Bernoulli RBMs seeded with PCA
//! structural priors, and a 4-connected grid CRF trained through unrolled
//! tree-reweighted inference.
//!
//! The `examples/` directory of this crate demonstrates each capability
//! end-to-end; the `gshdl` binary exposes the same flows as subcommands.

pub mod error;
pub mod grid;
pub mod numerics;
pub mod scatternet;

pub use error::{Error, Result};
pub use grid::{ComplexKernel2D, Grid2D, Kernel2D};
