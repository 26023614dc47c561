//! Shared numerical kernels: quadrature, root bracketing, the tridiagonal
//! eigensolver and sampled-function interpolation.

pub mod interp;
pub mod quad;
pub mod roots;
pub mod tridiag;

pub use interp::UniformSamples;
pub use quad::{
    gauss_legendre, integrate_adaptive, integrate_sqrt_endpoints, QuadOptions, QuadValue,
};
pub use roots::{bisect_root, sign_change_brackets};
pub use tridiag::lowest_eigenpairs;
