//! Lower bounds for the kissing number of `l_p`-spheres from a family of
//! nested constant-magnitude shells.
//!
//! A kissing configuration of the unit `l_p`-sphere is the same thing as a
//! code on that sphere with minimum `l_p`-distance 1, so everything here is
//! phrased as bounds on such codes. The crate provides
//!
//! * exact finite-`n` bounds with arbitrary-precision counts ([`exactbounds`]),
//! * the asymptotic exponents of those bounds ([`asymptotics`]),
//! * explicit small codes that witness the bounds ([`constructor`]).

pub mod asymptotics;
pub mod binomial;
pub mod certificate;
pub mod constructor;
mod error;
pub mod exactbounds;
pub mod interval;
pub mod optimize;
pub mod pnorm;
pub mod shellsys;

pub use asymptotics::{CurveSample, ExponentResult, InnerMin};
pub use constructor::{CodeCertificate, SameShellDistance, ShellPoint};
pub use error::{KissError, Result};
pub use exactbounds::{BoundMethod, BoundReport, ComparisonBound, ShellTerm};
pub use interval::Interval;
pub use pnorm::PNorm;
pub use shellsys::{BigCount, ShellSystem};
