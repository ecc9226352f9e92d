//! Orthogonal polynomials on the unit circle for weights with a single
//! Fisher–Hartwig zero, `f(θ) = |1 − e^{iθ}|^{2α} c(e^{iθ})` with `|α| < 1/2`.
//!
//! The crate covers the whole chain from the symbol to eigenvalue statistics:
//!
//! * [`weights`]: the symbol, its Fourier coefficients and outer factor.
//! * [`toeplitz`]: exact inverse columns of `T_N(f)` (Levinson and a dense oracle).
//! * [`opuc`]: `Φ_N`, `Φ_N*`, derivatives and the exact Christoffel–Darboux kernel.
//! * [`asymptotics`]: closed-form large-`N` predictions for columns and values at `z = 1`.
//! * [`limit_kernels`]: the rescaled limit kernel built from `ψ`, `τ`, `ψ̃`.
//! * [`fredholm`]: Nyström discretization, `det(I − γK)` and counting probabilities.
//! * [`ensemble`]: Monte Carlo samplers (Metropolis and projection DPP).
//! * [`cli`]: the `opuc-fh` command line front end.
//!
//! Fourier coefficients and inner products use the normalized measure `dθ/2π`.

pub mod asymptotics;
pub mod cli;
pub mod ensemble;
mod error;
pub mod fredholm;
pub mod limit_kernels;
pub mod opuc;
pub mod quadrature;
pub mod special;
pub mod toeplitz;
pub mod weights;

pub use error::{Error, Result};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
