//! Around-body interaction engine.
//!
//! Four input techniques are modelled as deterministic state machines and
//! geometry kernels:
//!
//! * [`proximity`]: layered hand-distance space, per-user calibration and
//!   dual-sensor fusion.
//! * [`foottap`]: a semicircular foot-tap grid with direct hit-testing and a
//!   radial-kernel classifier for indirect taps.
//! * [`walkline`]: lateral lanes selected by dwelling while walking.
//! * [`infospace`]: a shared space of falling information drops with an
//!   authoritative sync server.
//!
//! [`gaitsim`] synthesises seeded human motion for all of them and
//! [`harness`] runs counterbalanced experiments, summarises and exports them.

pub mod error;
pub mod foottap;
pub mod gaitsim;
pub mod harness;
pub mod infospace;
pub mod proximity;
pub mod walkline;

pub use error::{Error, Result};
