//! Timing emulator for a probe-based MEMS device.
//!
//! The emulator consumes an [`AccessPlan`] and tracks the media sled: which
//! column it sits over, which in-column row, and which way it is moving
//! along Y. Each scan costs one seek to its first row followed by one
//! sector time per row-step, whatever the number of active tips.

pub mod media;
pub mod plan;
pub mod tips;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use media::MediaImage;
pub use plan::{AccessPlan, Activation, Direction, Gap, PlanBuilder, Scan};
pub use tips::TipSet;

use crate::error::{Error, Result};
use crate::params::DeviceParams;
use crate::rs::{rs_to_mems, sector_position, RsAddr};

/// Physical tip-sector address `<r_x, r_y, s_x, s_y>`, all 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhysAddr {
    pub r_x: u32,
    pub r_y: u32,
    pub s_x: u32,
    pub s_y: u32,
}

impl fmt::Display for PhysAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.r_x, self.r_y, self.s_x, self.s_y)
    }
}

/// How move times depend on distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeekModel {
    /// `T_X` for any column change, `T_Y` for any row change.
    #[default]
    Average,
    /// Move time proportional to distance, scaled so that the mean over
    /// uniformly random endpoints equals `T_X` / `T_Y`.
    Distance,
}

impl fmt::Display for SeekModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeekModel::Average => "average",
            SeekModel::Distance => "distance",
        })
    }
}

impl FromStr for SeekModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(SeekModel::Average),
            "distance" => Ok(SeekModel::Distance),
            _ => Err(Error::Config(format!("unknown seek model `{s}`"))),
        }
    }
}

/// Direction of sled motion along Y, in terms of in-column `s_y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YDir {
    Up,
    Down,
}

impl YDir {
    pub fn flip(self) -> Self {
        match self {
            YDir::Up => YDir::Down,
            YDir::Down => YDir::Up,
        }
    }

    /// Physical motion needed to follow `dir` along the Sector axis inside
    /// column `col`: odd columns run up, even columns down.
    pub fn along(col: u32, dir: Direction) -> Self {
        let up = (col % 2 == 1) ^ (dir == Direction::Reverse);
        if up {
            YDir::Up
        } else {
            YDir::Down
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SledState {
    pub col: u32,
    pub row: u32,
    pub y_dir: Option<YDir>,
}

impl Default for SledState {
    fn default() -> Self {
        SledState {
            col: 1,
            row: 1,
            y_dir: Some(YDir::Up),
        }
    }
}

/// Where a seek must leave the sled: over `(col, row)`, moving `y_dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeekTarget {
    pub col: u32,
    pub row: u32,
    pub y_dir: YDir,
}

/// Components of one seek. The seek lasts as long as the slower axis.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SeekCost {
    pub move_x: f64,
    pub settle: f64,
    pub move_y: f64,
    pub turnaround: f64,
}

impl SeekCost {
    pub fn x_branch(&self) -> f64 {
        self.move_x + self.settle
    }

    pub fn y_branch(&self) -> f64 {
        self.move_y + self.turnaround
    }

    pub fn total(&self) -> f64 {
        self.x_branch().max(self.y_branch())
    }

    /// True when the sled actually changes position.
    pub fn moves(&self) -> bool {
        self.move_x > 0.0 || self.move_y > 0.0
    }

    fn full_average(p: &DeviceParams) -> Self {
        SeekCost {
            move_x: p.t_x,
            settle: p.t_s,
            move_y: p.t_y,
            turnaround: p.t_t,
        }
    }
}

/// Mean of `|a - b|` over independent uniform `a, b` in `1..=n`.
pub fn mean_random_distance(n: u32) -> f64 {
    let n = n as f64;
    (n * n - 1.0) / (3.0 * n)
}

pub fn seek_time(
    from: &SledState,
    to: SeekTarget,
    p: &DeviceParams,
    model: SeekModel,
) -> Result<SeekCost> {
    if to.col < 1 || to.col > p.s_x || to.row < 1 || to.row > p.s_y {
        return Err(Error::OutOfBounds(format!(
            "sled target column {} row {} outside [1, {}] x [1, {}]",
            to.col, to.row, p.s_x, p.s_y
        )));
    }
    let dx = from.col.abs_diff(to.col);
    let dy = from.row.abs_diff(to.row);
    let scaled = |t: f64, d: u32, n: u32| match model {
        SeekModel::Average => t,
        SeekModel::Distance => t * d as f64 / mean_random_distance(n),
    };
    let mut c = SeekCost::default();
    if dx > 0 {
        c.move_x = scaled(p.t_x, dx, p.s_x);
        c.settle = p.t_s;
    }
    if dy > 0 {
        c.move_y = scaled(p.t_y, dy, p.s_y);
    }
    if from.y_dir.is_some_and(|d| d != to.y_dir) {
        c.turnaround = p.t_t;
    }
    Ok(c)
}

/// Elapsed time of a plan, split by cause.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_s: f64,
    pub seek_s: f64,
    pub transfer_s: f64,
    pub settle_s: f64,
    pub turnaround_s: f64,
    /// One per scan.
    pub n_seeks: u64,
    pub n_row_steps: u64,
    /// Seeks that changed the sled position; the very first seek always
    /// counts.
    pub n_moves: u64,
    /// Tip sectors transferred.
    pub sectors: u64,
}

impl Timing {
    /// Average number of tips transferring per row-step.
    pub fn k_parallel(&self) -> f64 {
        if self.n_row_steps == 0 {
            0.0
        } else {
            self.sectors as f64 / self.n_row_steps as f64
        }
    }

    fn close(&mut self) {
        self.total_s = self.seek_s + self.transfer_s + self.settle_s + self.turnaround_s;
    }
}

/// A single-device timing state machine.
#[derive(Debug, Clone)]
pub struct Emulator {
    params: DeviceParams,
    model: SeekModel,
    state: SledState,
    fresh: bool,
    sector_time: f64,
}

impl Emulator {
    pub fn new(params: DeviceParams) -> Self {
        Emulator {
            sector_time: params.sector_size_bits as f64 / params.transfer_rate_bits_per_s,
            params,
            model: SeekModel::Average,
            state: SledState::default(),
            fresh: true,
        }
    }

    pub fn with_seek_model(mut self, model: SeekModel) -> Self {
        self.model = model;
        self
    }

    /// Starts from `state`; the first seek is then timed normally instead of
    /// being charged as a full average seek.
    pub fn with_state(mut self, state: SledState) -> Self {
        self.state = state;
        self.fresh = false;
        self
    }

    pub fn params(&self) -> &DeviceParams {
        &self.params
    }

    pub fn seek_model(&self) -> SeekModel {
        self.model
    }

    pub fn state(&self) -> SledState {
        self.state
    }

    pub fn reset(&mut self) {
        self.state = SledState::default();
        self.fresh = true;
    }

    pub fn execute(&mut self, plan: &AccessPlan) -> Result<Timing> {
        self.run(plan, |_, _| Ok(()))
    }

    /// Executes `plan` and returns the bytes of every touched cell, scan by
    /// scan, row-step by row-step, tips ascending within a row-step.
    pub fn read(&mut self, plan: &AccessPlan, media: &MediaImage) -> Result<(Timing, Vec<u8>)> {
        if !media.matches(&self.params) {
            return Err(Error::MediaMismatch);
        }
        let p = self.params;
        let mut out = Vec::with_capacity(plan.sectors() as usize * media.sector_bytes());
        let timing = self.run(plan, |row, tips| {
            for r in tips.iter() {
                let a = rs_to_mems(RsAddr::new(r, row), &p)?;
                out.extend_from_slice(media.sector(a)?);
            }
            Ok(())
        })?;
        Ok((timing, out))
    }

    fn run(
        &mut self,
        plan: &AccessPlan,
        mut visit: impl FnMut(u32, &TipSet) -> Result<()>,
    ) -> Result<Timing> {
        let p = self.params;
        plan.validate(&p)?;
        let crossing = p.t_s.max(p.t_t);
        let mut t = Timing::default();
        for scan in &plan.scans {
            let (col, row) = sector_position(scan.start, &p);
            let target = SeekTarget {
                col,
                row,
                y_dir: YDir::along(col, scan.direction),
            };
            let cost = if self.fresh {
                SeekCost::full_average(&p)
            } else {
                seek_time(&self.state, target, &p, self.model)?
            };
            if cost.x_branch() >= cost.y_branch() {
                t.seek_s += cost.move_x;
                t.settle_s += cost.settle;
            } else {
                t.seek_s += cost.move_y;
                t.turnaround_s += cost.turnaround;
            }
            if self.fresh || cost.moves() {
                t.n_moves += 1;
            }
            self.fresh = false;
            t.n_seeks += 1;
            self.state = SledState {
                col,
                row,
                y_dir: Some(target.y_dir),
            };

            for (i, s) in scan.rows().enumerate() {
                let (c, r) = sector_position(s, &p);
                if c != self.state.col {
                    if p.t_s >= p.t_t {
                        t.settle_s += crossing;
                    } else {
                        t.turnaround_s += crossing;
                    }
                    self.state.col = c;
                    self.state.y_dir = self.state.y_dir.map(YDir::flip);
                }
                self.state.row = r;
                let tips = scan.tips_at(i);
                t.transfer_s += self.sector_time;
                t.n_row_steps += 1;
                t.sectors += tips.len() as u64;
                visit(s, tips)?;
            }
        }
        t.close();
        Ok(t)
    }
}

/// Times `plan` on a fresh emulator with the average seek model.
pub fn execute(plan: &AccessPlan, params: &DeviceParams) -> Result<Timing> {
    Emulator::new(*params).execute(plan)
}
