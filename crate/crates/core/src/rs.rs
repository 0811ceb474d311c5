//! Region-Sector addressing.
//!
//! An RS address `<r, s>` names a probe tip (`r`, the linearized region) and a
//! position `s` along that region's sectors in column-prime order: down the
//! first column, up the second, and so on. Consecutive `s` are therefore
//! either neighbours in one column or the same row of two adjacent columns.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::emulator::plan::{AccessPlan, PlanBuilder};
use crate::emulator::tips::TipSet;
use crate::emulator::PhysAddr;
use crate::error::{Error, Result};
use crate::params::DeviceParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RsAddr {
    pub r: u32,
    pub s: u32,
}

impl RsAddr {
    pub fn new(r: u32, s: u32) -> Self {
        RsAddr { r, s }
    }
}

impl fmt::Display for RsAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.r, self.s)
    }
}

/// Averaged characteristics of the RS view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsParams {
    /// Average per-tip transfer rate for a column-prime read of a region.
    pub transfer_rate_rs: f64,
    /// Average seek between random positions.
    pub seek_time_rs: f64,
}

/// Column (1-based) holding sector-axis position `s`.
pub(crate) fn column_of(s: u32, p: &DeviceParams) -> u32 {
    (s - 1) / p.s_y + 1
}

/// Physical in-region `(s_x, s_y)` of sector-axis position `s`.
pub(crate) fn sector_position(s: u32, p: &DeviceParams) -> (u32, u32) {
    let s_x = column_of(s, p);
    let off = (s - 1) % p.s_y;
    let s_y = if s_x % 2 == 1 { off + 1 } else { p.s_y - off };
    (s_x, s_y)
}

pub fn rs_to_mems(a: RsAddr, p: &DeviceParams) -> Result<PhysAddr> {
    if a.r < 1 || a.r > p.n_r() || a.s < 1 || a.s > p.n_s() {
        return Err(Error::OutOfBounds(format!(
            "RS <{}, {}> outside [1, {}] x [1, {}]",
            a.r,
            a.s,
            p.n_r(),
            p.n_s()
        )));
    }
    let (s_x, s_y) = sector_position(a.s, p);
    Ok(PhysAddr {
        r_x: (a.r - 1) % p.r_x + 1,
        r_y: (a.r - 1) / p.r_x + 1,
        s_x,
        s_y,
    })
}

pub fn mems_to_rs(a: PhysAddr, p: &DeviceParams) -> Result<RsAddr> {
    let ok = (1..=p.r_x).contains(&a.r_x)
        && (1..=p.r_y).contains(&a.r_y)
        && (1..=p.s_x).contains(&a.s_x)
        && (1..=p.s_y).contains(&a.s_y);
    if !ok {
        return Err(Error::OutOfBounds(format!(
            "physical <{}, {}, {}, {}> outside the device",
            a.r_x, a.r_y, a.s_x, a.s_y
        )));
    }
    let r = p.r_x * (a.r_y - 1) + a.r_x;
    let s = if a.s_x % 2 == 1 {
        p.s_y * (a.s_x - 1) + a.s_y
    } else {
        p.s_y * (a.s_x - 1) + (p.s_y - a.s_y + 1)
    };
    Ok(RsAddr { r, s })
}

/// Transfer rate and seek time of the RS view.
///
/// Reading a region column by column costs the raw transfer time plus one
/// adjacent-column seek per column, taken as the settle time.
pub fn rs_params(p: &DeviceParams) -> RsParams {
    let region_bits = p.s_x as f64 * p.s_y as f64 * p.sector_size_bits as f64;
    let seek_adj = p.t_s;
    let read_time = region_bits / p.transfer_rate_bits_per_s + p.s_x as f64 * seek_adj;
    RsParams {
        transfer_rate_rs: region_bits / read_time,
        seek_time_rs: p.average_seek_s(),
    }
}

/// Plan reading rows `s_start..s_start+s_len` of every region in `regions`.
///
/// Regions are taken in ascending order, N_APT at a time; successive scans
/// over the rows alternate direction.
pub fn rs_read(regions: &[u32], s_start: u32, s_len: u32, p: &DeviceParams) -> Result<AccessPlan> {
    if s_len == 0 || regions.is_empty() {
        return Ok(AccessPlan::default());
    }
    let end = s_start as u64 + s_len as u64 - 1;
    if s_start < 1 || end > p.n_s() as u64 {
        return Err(Error::OutOfBounds(format!(
            "rows {s_start}..={end} outside [1, {}]",
            p.n_s()
        )));
    }
    if let Some(&bad) = regions.iter().find(|&&r| r < 1 || r > p.n_r()) {
        return Err(Error::OutOfBounds(format!(
            "region {bad} outside [1, {}]",
            p.n_r()
        )));
    }
    let tips: TipSet = regions.iter().copied().collect();
    let mut b = PlanBuilder::new(p.n_apt);
    b.sweep_uniform(s_start, s_len, &tips);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::plan::Direction;
    use crate::params::cmu_defaults;
    use proptest::prelude::*;

    fn small() -> DeviceParams {
        DeviceParams {
            r_x: 3,
            r_y: 3,
            s_x: 4,
            s_y: 3,
            n_apt: 3,
            ..cmu_defaults()
        }
    }

    fn phys(r_x: u32, r_y: u32, s_x: u32, s_y: u32) -> PhysAddr {
        PhysAddr { r_x, r_y, s_x, s_y }
    }

    #[test]
    fn hand_evaluated_cmu_addresses() {
        let p = cmu_defaults();
        assert_eq!(rs_to_mems(RsAddr::new(1, 1), &p).unwrap(), phys(1, 1, 1, 1));
        assert_eq!(
            rs_to_mems(RsAddr::new(81, 28), &p).unwrap(),
            phys(1, 2, 2, 27)
        );
        assert_eq!(
            rs_to_mems(RsAddr::new(6400, 67_500), &p).unwrap(),
            phys(80, 80, 2500, 1)
        );
        assert_eq!(
            mems_to_rs(phys(1, 2, 2, 27), &p).unwrap(),
            RsAddr::new(81, 28)
        );
        assert_eq!(mems_to_rs(phys(1, 1, 1, 1), &p).unwrap(), RsAddr::new(1, 1));
    }

    #[test]
    fn out_of_bounds_rejected() {
        let p = cmu_defaults();
        assert!(rs_to_mems(RsAddr::new(0, 1), &p).is_err());
        assert!(rs_to_mems(RsAddr::new(1, 67_501), &p).is_err());
        assert!(mems_to_rs(phys(81, 1, 1, 1), &p).is_err());
        assert!(mems_to_rs(phys(1, 1, 1, 28), &p).is_err());
    }

    #[test]
    fn small_geometry_is_a_bijection() {
        let p = small();
        let mut seen = std::collections::HashSet::new();
        for r in 1..=p.n_r() {
            for s in 1..=p.n_s() {
                let m = rs_to_mems(RsAddr::new(r, s), &p).unwrap();
                assert!(seen.insert(m));
                assert_eq!(mems_to_rs(m, &p).unwrap(), RsAddr::new(r, s));
            }
        }
        assert_eq!(seen.len(), 108);
    }

    #[test]
    fn consecutive_positions_are_quasi_contiguous() {
        let p = cmu_defaults();
        for s in 1..p.n_s() {
            let (x0, y0) = sector_position(s, &p);
            let (x1, y1) = sector_position(s + 1, &p);
            let same_column = x0 == x1 && y0.abs_diff(y1) == 1;
            let next_column = x1 == x0 + 1 && y0 == y1;
            assert!(same_column || next_column, "s = {s}");
        }
    }

    #[test]
    fn rs_params_cmu() {
        let rs = rs_params(&cmu_defaults());
        let expect = 4.32e6 / (4.32e6 / 0.7e6 + 2500.0 * 0.215e-3);
        assert!((rs.transfer_rate_rs - expect).abs() < 1e-6);
        assert!((rs.transfer_rate_rs - 0.644e6).abs() < 0.001e6);
        assert!((rs.seek_time_rs - 0.735e-3).abs() < 1e-15);
    }

    #[test]
    fn settle_free_device_keeps_raw_rate() {
        let mut p = cmu_defaults();
        p.t_s = 0.0;
        let rs = rs_params(&p);
        assert_eq!(rs.transfer_rate_rs, p.transfer_rate_bits_per_s);
    }

    #[test]
    fn rs_read_scan_counts() {
        let p = cmu_defaults();
        let scans = |n: u32| {
            rs_read(&(1..=n).collect::<Vec<_>>(), 1, 64, &p)
                .unwrap()
                .len()
        };
        assert_eq!(scans(64), 1);
        assert_eq!(scans(3200), 3);
        assert_eq!(scans(6400), 5);
        let plan = rs_read(&(1..=3200).collect::<Vec<_>>(), 10, 64, &p).unwrap();
        assert_eq!(plan.scans[1].direction, Direction::Reverse);
        assert_eq!(plan.scans[1].start, 73);
        assert!(rs_read(&[6401], 1, 1, &p).is_err());
        assert!(rs_read(&[1], 67_500, 2, &p).is_err());
    }

    proptest! {
        #[test]
        fn cmu_round_trip(r in 1u32..=6400, s in 1u32..=67_500) {
            let p = cmu_defaults();
            let m = rs_to_mems(RsAddr::new(r, s), &p).unwrap();
            prop_assert_eq!(mems_to_rs(m, &p).unwrap(), RsAddr::new(r, s));
        }
    }
}
