//! # symlat
//!
//! A numerical laboratory for lattice-point statistics over symplectic
//! lattices.
//!
//! The crate provides, bottom-up:
//!
//! - [`special`] — complex Γ, ζ, the completed zeta ξ, and the meromorphic
//!   factors `Z_m` built from ratios of ξ values;
//! - [`symplectic`] — the symplectic group over ℝ and ℤ in a row-vector
//!   convention: validation, Iwasawa-type coordinates, unit-sphere cosets,
//!   and exact integer completion of a primitive row to a symplectic matrix;
//! - [`lattice`] — LLL reduction, Fincke–Pohst enumeration of lattice points
//!   in balls/annuli/boxes, region counting, and truncated sums of radial
//!   test functions over a lattice;
//! - [`harmonic`] — bidegree-(p,q) polynomial algebra over the Gaussian
//!   rationals, exact Laplacian kernels, raising operators on homogeneous
//!   radial families, and monomial integrals over the unit sphere;
//! - [`mellin`] — a Mellin transform convention adapted to radial test
//!   functions, with closed-form pairs, numerical inversion on vertical
//!   lines, and Plancherel-type pairings;
//! - [`eisenstein`] — degenerate Eisenstein-type series attached to sphere
//!   functions, truncated theta sums, unipotent-averaged constant terms,
//!   closed-form periods, an isometry-normalized twist operator, and
//!   closed-form first/second moments of lattice sums;
//! - [`sampler`] — seeded samplers for random symplectic lattices (exact in
//!   rank 2, a conditioned random walk in higher rank) and Monte Carlo
//!   experiments: moment estimation, mean-square discrepancy, dilation
//!   scans, and dyadic counting statistics;
//! - [`acceptance`] — the end-to-end verification suite the `symlat selftest`
//!   subcommand runs, with pinned tolerances;
//! - [`report`] — serializable result envelopes with provenance and error
//!   estimates, shared by the library and the CLI.
//!
//! The guide chapters under `book/` are compiled into the crate as the
//! [`guide`] module, so every code fence in the book is exercised by
//! `cargo test --doc`.

pub mod acceptance;
pub mod eisenstein;
pub mod guide;
pub mod harmonic;
pub mod lattice;
pub mod mellin;
pub mod report;
pub mod sampler;
pub mod special;
pub mod symplectic;
