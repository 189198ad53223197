//! Symbolic-numeric toolkit for isochronous centers of planar polynomial systems.
//!
//! Systems in Cherkas form are reduced to Liénard type, the rational C-algorithm emits
//! isochronicity conditions, Urabe functions and the zero-Urabe identity are checked as exact
//! series identities, and periods are measured numerically on the original system.

pub mod isochrony;
pub mod catalog;
pub mod groebner;
pub mod lienard;
pub mod linearize;
pub mod order;
pub mod parse;
pub mod poly;
pub mod scalar;
pub mod series;
pub mod verify;

pub use order::MonomialOrder;
pub use poly::{ParamPoly, Vars};
pub use scalar::{QuadNum, Rat, Scalar};
pub use series::{Coeff, SeriesError, XSeries};

pub type QPoly = ParamPoly<Rat>;
pub type QuadPoly = ParamPoly<QuadNum>;
pub type FPoly = ParamPoly<f64>;
pub type QSeries = XSeries<QPoly>;
pub type QuadSeries = XSeries<QuadPoly>;
pub type FSeries = XSeries<FPoly>;
