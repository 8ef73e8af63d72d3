//! Relativistic quantum clock built from one mode of a cavity-confined
//! massless scalar field in 1+1 dimensions.
//!
//! The cavity follows a piecewise trajectory of inertial and uniformly
//! accelerated segments ([`trajectory`]). Each segment induces a Bogoliubov
//! transformation of the cavity modes ([`modes`]), which acts on Gaussian
//! states through their first and second moments ([`gauss`]). The phase of
//! the clock mode gives the clock time and its quantum Fisher information
//! gives the clock precision ([`metrology`]). [`clock`] runs the
//! twin-paradox scenario and its comparisons with a pointlike clock.
//!
//! Internally `c = 1`; see [`units`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clock;
pub mod gauss;
pub mod metrology;
pub mod modes;
pub mod quadrature;
pub mod trajectory;
pub mod units;
