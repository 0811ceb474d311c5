//! Emulation of a probe-based MEMS storage device, the Region-Sector
//! addressing model on top of it, and data placements for relational and
//! two-dimensional spatial data.
//!
//! ```
//! use memsplace::{cmu_defaults, rs_read, Emulator};
//!
//! let p = cmu_defaults();
//! let plan = rs_read(&(1..=3200).collect::<Vec<_>>(), 1, 100, &p).unwrap();
//! let t = Emulator::new(p).execute(&plan).unwrap();
//! assert_eq!(t.n_seeks, 3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cost;
pub mod emulator;
pub mod error;
pub mod linear;
pub mod params;
pub mod relational;
pub mod rs;
pub mod spatial;
pub mod workload;

pub use emulator::{
    execute, AccessPlan, Activation, Direction, Emulator, Gap, MediaImage, PhysAddr, PlanBuilder,
    Scan, SeekModel, SledState, Timing, TipSet,
};
pub use error::{Error, Result};
pub use params::{cmu_defaults, derive, DerivedParams, DeviceConfig, DeviceParams};
pub use rs::{mems_to_rs, rs_params, rs_read, rs_to_mems, RsAddr, RsParams};
