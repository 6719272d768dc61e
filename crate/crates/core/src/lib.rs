//! Verification and construction toolkit for spectral pairs `(μ, Γ)`: measures
//! whose `L²` space carries an orthonormal family of complex exponentials
//! indexed by a frequency set `Γ`.
//!
//! The crate covers three families of measures and the transforms connecting
//! them:
//!
//! * [`density`] — absolutely continuous measures given by rational step
//!   densities: partition-of-unity verification, closed-form Fourier
//!   transforms, translation congruence of supports, and generation of
//!   iso-spectral families from congruence partitions.
//! * [`atomic`] — uniform atomic measures: exponential-matrix unitarity tests,
//!   the residue-class normal form, and translation equivalence of atom sets.
//! * [`ifs`] — invariant measures of one-dimensional affine iterated function
//!   systems: Hadamard digit pairs, exact extreme-cycle search over the
//!   candidate lattice, infinite-product Fourier transforms, candidate
//!   spectra and truncated spectral sums, support covers and non-equivalence
//!   certificates.
//! * [`localtrans`] — finite spectral expansions, the group of local
//!   translations acting diagonally on them, and the intertwiner between two
//!   measures sharing a spectrum.
//!
//! [`exactnum`] supplies the shared substrate (arbitrary-precision rationals,
//! rational boxes, closed-form exponential integrals); [`io`] defines the JSON
//! wire formats and [`sampling`] the seeded random generators used by the CLI
//! and the test suites.

pub mod atomic;
pub mod density;
pub mod exactnum;
pub mod ifs;
pub mod io;
pub mod localtrans;
pub mod sampling;

pub use exactnum::{Complex, Rational, RationalBox};
