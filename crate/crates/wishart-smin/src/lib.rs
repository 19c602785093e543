//! Smallest-eigenvalue distributions for complex Wishart matrices.
//!
//! The crate is organized around an exact-arithmetic core and a set of
//! numerical pipelines built on top of it:
//!
//! * [`exact`] — closed-form smallest-eigenvalue density for the
//!   Wishart–Laguerre ensemble `W = A A†` (A an `n × m` complex Gaussian
//!   matrix), computed by an exact polynomial recurrence. Densities,
//!   CDFs and moments come out as exact rationals wherever the inputs are
//!   rational.
//! * [`fixed_trace`] — the same distribution for the fixed-trace ensemble
//!   `F = W / tr W` (Schmidt spectra of random bipartite pure states),
//!   obtained term-by-term from the regular form, plus the near-maximal
//!   entanglement tail mass `R(δ)`.
//! * [`marginal`] — one-level (marginal) eigenvalue densities for both
//!   ensembles and their large-size approximations.
//! * [`montecarlo`] — seeded sampling of both ensembles with
//!   Kolmogorov–Smirnov comparison against the closed forms.
//! * [`tracy_widom`] — the β=2 Tracy–Widom density via Fredholm
//!   determinants of the Airy kernel, and the shift/scale map that carries
//!   smallest-eigenvalue densities onto it.
//! * [`kicked_tops`] — a coupled kicked-tops Floquet simulation producing
//!   ensembles of Schmidt spectra for comparison with the fixed-trace
//!   predictions.

pub mod airy;
pub mod error;
pub mod exact;
pub mod fixed_trace;
pub mod grid;
pub mod kicked_tops;
pub mod laguerre;
pub mod marginal;
pub mod montecarlo;
pub mod numeric;
pub mod params;
pub mod rational;
pub mod tracy_widom;

pub use error::Error;
pub use exact::{norm_constant, recurrence_g, smin_closed_form, SminClosedForm};
pub use fixed_trace::{ft_closed_form, FtForm};
pub use params::{EnsembleParams, MomentOrder};
pub use rational::{Rational, RationalPolynomial};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
