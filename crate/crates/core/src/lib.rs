//! p-adic arithmetic dynamics on truncated power series.
//!
//! The crate is organised bottom-up:
//!
//! * [`padic`]: Z/p^N, p-adic floats, F_p, valuations, Teichmüller lifts.
//! * [`series`]: truncated series in S_nc, composition, iteration, inversion.
//! * [`newton`]: Newton polygons, Weierstrass degree and preparation, root valuations.
//! * [`lubin`]: linearization, commutants and torsion-series certificates.
//! * [`ramification`]: Nottingham-group diagnostics over F_p.
//! * [`oracle`]: formal-group ground truth and minimal-pair validation.
//! * [`json`]: the JSON wire formats used by the command-line tool.

pub mod error;
pub mod json;
pub mod lubin;
pub mod newton;
pub mod oracle;
pub mod ramification;
pub mod padic;
pub mod ring;
pub mod series;

pub use error::{Error, Result};
pub use padic::{PadicField, PadicNumber, PrimeContext};
pub use ring::{CoeffRing, RingKind, Valuation};
pub use series::{FloatSeries, IntSeries, ResSeries, Series};
