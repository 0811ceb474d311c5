//! Access plans: the only input the emulator times.
//!
//! Text form, one scan per line (`#` starts a comment):
//!
//! ```text
//! F 1 103 tips=1-8,17-24
//! R 103 103 tips=1-8,17-24
//! F 8 3 rows=1,5-9;3;-
//! ```
//!
//! Fields are direction (`F` forward / `R` reverse along the Sector axis),
//! the first RS row visited, the number of rows, and either one tip set for
//! every row or a `;`-separated tip set per row in visiting order.

use std::fmt;
use std::str::FromStr;

use super::tips::TipSet;
use crate::error::{Error, Result};
use crate::params::DeviceParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Reverse,
            Direction::Reverse => Direction::Forward,
        }
    }
}

/// Which tips transfer on each row-step of a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Activation {
    /// The same tips on every row.
    Uniform(TipSet),
    /// One set per row, in visiting order.
    PerRow(Vec<TipSet>),
}

/// One seek followed by `length` row-steps along the Sector axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scan {
    /// First RS row visited (1-based).
    pub start: u32,
    pub length: u32,
    pub direction: Direction,
    pub activation: Activation,
}

impl Scan {
    pub fn uniform(start: u32, length: u32, direction: Direction, tips: TipSet) -> Self {
        Scan {
            start,
            length,
            direction,
            activation: Activation::Uniform(tips),
        }
    }

    /// Last RS row visited.
    pub fn end(&self) -> u32 {
        match self.direction {
            Direction::Forward => self.start + self.length - 1,
            Direction::Reverse => self.start + 1 - self.length,
        }
    }

    /// RS rows in visiting order.
    pub fn rows(&self) -> impl Iterator<Item = u32> + '_ {
        let (start, dir) = (self.start, self.direction);
        (0..self.length).map(move |i| match dir {
            Direction::Forward => start + i,
            Direction::Reverse => start - i,
        })
    }

    /// Tips active on the `i`-th row-step.
    pub fn tips_at(&self, i: usize) -> &TipSet {
        match &self.activation {
            Activation::Uniform(t) => t,
            Activation::PerRow(rows) => &rows[i],
        }
    }

    /// Sectors transferred by the whole scan.
    pub fn sectors(&self) -> u64 {
        match &self.activation {
            Activation::Uniform(t) => t.len() as u64 * self.length as u64,
            Activation::PerRow(rows) => rows.iter().map(|t| t.len() as u64).sum(),
        }
    }

    /// Largest activation set used on any row-step.
    pub fn max_active(&self) -> u32 {
        match &self.activation {
            Activation::Uniform(t) => t.len(),
            Activation::PerRow(rows) => rows.iter().map(TipSet::len).max().unwrap_or(0),
        }
    }

    pub fn validate(&self, index: usize, params: &DeviceParams) -> Result<()> {
        let bad = |reason: String| Error::InvalidScan { index, reason };
        if self.length == 0 {
            return Err(bad("zero-length scan".into()));
        }
        let n_s = params.n_s();
        let in_bounds = match self.direction {
            Direction::Forward => {
                self.start >= 1 && (self.start as u64 + self.length as u64 - 1) <= n_s as u64
            }
            Direction::Reverse => self.start <= n_s && self.start >= self.length,
        };
        if !in_bounds {
            return Err(bad(format!(
                "rows from {} ({:?}, length {}) leave [1, {n_s}]",
                self.start, self.direction, self.length
            )));
        }
        let check = |t: &TipSet| -> Result<()> {
            if t.len() > params.n_apt {
                return Err(bad(format!(
                    "{} active tips exceed N_APT = {}",
                    t.len(),
                    params.n_apt
                )));
            }
            if t.min().is_some_and(|m| m < 1) || t.max().is_some_and(|m| m > params.n_r()) {
                return Err(bad(format!("tip outside [1, {}]", params.n_r())));
            }
            Ok(())
        };
        match &self.activation {
            Activation::Uniform(t) => check(t),
            Activation::PerRow(rows) => {
                if rows.len() != self.length as usize {
                    return Err(bad(format!(
                        "{} per-row sets for {} rows",
                        rows.len(),
                        self.length
                    )));
                }
                rows.iter().try_for_each(check)
            }
        }
    }
}

/// An ordered list of scans.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessPlan {
    pub scans: Vec<Scan>,
}

impl AccessPlan {
    pub fn new(scans: Vec<Scan>) -> Self {
        AccessPlan { scans }
    }

    pub fn is_empty(&self) -> bool {
        self.scans.is_empty()
    }

    pub fn len(&self) -> usize {
        self.scans.len()
    }

    pub fn sectors(&self) -> u64 {
        self.scans.iter().map(Scan::sectors).sum()
    }

    pub fn row_steps(&self) -> u64 {
        self.scans.iter().map(|s| s.length as u64).sum()
    }

    pub fn validate(&self, params: &DeviceParams) -> Result<()> {
        self.scans
            .iter()
            .enumerate()
            .try_for_each(|(i, s)| s.validate(i, params))
    }

    pub fn extend(&mut self, other: AccessPlan) {
        self.scans.extend(other.scans);
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl fmt::Display for Scan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::Forward => 'F',
            Direction::Reverse => 'R',
        };
        write!(f, "{d} {} {} ", self.start, self.length)?;
        match &self.activation {
            Activation::Uniform(t) => write!(f, "tips={t}"),
            Activation::PerRow(rows) => {
                f.write_str("rows=")?;
                for (i, t) in rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for AccessPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.scans {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for AccessPlan {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut scans = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| Error::PlanParse {
                line: i + 1,
                reason: reason.to_string(),
            };
            let mut fields = line.split_whitespace();
            let direction = match fields.next() {
                Some("F") => Direction::Forward,
                Some("R") => Direction::Reverse,
                _ => return Err(err("expected direction F or R")),
            };
            let start: u32 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad start row"))?;
            let length: u32 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad length"))?;
            let act = fields.next().ok_or_else(|| err("missing activation"))?;
            if fields.next().is_some() {
                return Err(err("trailing fields"));
            }
            let activation = if let Some(t) = act.strip_prefix("tips=") {
                Activation::Uniform(t.parse().map_err(|e: String| err(&e))?)
            } else if let Some(rows) = act.strip_prefix("rows=") {
                let sets = rows
                    .split(';')
                    .map(|t| t.parse::<TipSet>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| err(&e))?;
                if sets.len() != length as usize {
                    return Err(err("per-row set count differs from length"));
                }
                Activation::PerRow(sets)
            } else {
                return Err(err("activation must start with tips= or rows="));
            };
            scans.push(Scan {
                start,
                length,
                direction,
                activation,
            });
        }
        Ok(AccessPlan { scans })
    }
}

/// What a sweep does with a row that has nothing to read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gap {
    /// Pass over the row without transferring.
    Step,
    /// End the scan; the next row read starts with a seek.
    Seek,
}

/// Assembles plans from row visits.
///
/// A visit that continues the open scan (next row in the same direction)
/// extends it; anything else, or an explicit [`cut`](Self::cut), starts a
/// new scan and therefore a new seek.
#[derive(Debug)]
pub struct PlanBuilder {
    n_apt: u32,
    scans: Vec<Scan>,
    open: Option<OpenScan>,
}

#[derive(Debug)]
struct OpenScan {
    start: u32,
    last: u32,
    direction: Direction,
    rows: Vec<TipSet>,
}

impl PlanBuilder {
    pub fn new(n_apt: u32) -> Self {
        PlanBuilder {
            n_apt,
            scans: Vec::new(),
            open: None,
        }
    }

    pub fn visit(&mut self, row: u32, direction: Direction, tips: TipSet) {
        debug_assert!(tips.len() <= self.n_apt);
        if let Some(open) = &mut self.open {
            let next = match open.direction {
                Direction::Forward => open.last.checked_add(1),
                Direction::Reverse => open.last.checked_sub(1),
            };
            if open.direction == direction && next == Some(row) {
                open.last = row;
                open.rows.push(tips);
                return;
            }
        }
        self.cut();
        self.open = Some(OpenScan {
            start: row,
            last: row,
            direction,
            rows: vec![tips],
        });
    }

    /// Closes the open scan so the next visit starts with a seek.
    pub fn cut(&mut self) {
        if let Some(open) = self.open.take() {
            let length = open.rows.len() as u32;
            let first = &open.rows[0];
            let activation = if open.rows.iter().all(|t| t == first) {
                Activation::Uniform(open.rows.into_iter().next().unwrap())
            } else {
                Activation::PerRow(open.rows)
            };
            self.scans.push(Scan {
                start: open.start,
                length,
                direction: open.direction,
                activation,
            });
        }
    }

    /// Pushes a pre-built scan after closing any open one.
    pub fn push_scan(&mut self, scan: Scan) {
        self.cut();
        self.scans.push(scan);
    }

    /// Reads `len` rows starting at `first_row` with the same tips on every
    /// row. Tip sets wider than N_APT become successive sweeps over the rows
    /// in alternating direction.
    pub fn sweep_uniform(&mut self, first_row: u32, len: u32, tips: &TipSet) {
        if len == 0 || tips.is_empty() {
            return;
        }
        self.cut();
        let last_row = first_row + len - 1;
        for (pass, chunk) in tips.chunks(self.n_apt).into_iter().enumerate() {
            let scan = if pass % 2 == 0 {
                Scan::uniform(first_row, len, Direction::Forward, chunk)
            } else {
                Scan::uniform(last_row, len, Direction::Reverse, chunk)
            };
            self.scans.push(scan);
        }
    }

    /// Reads consecutive rows starting at `first_row`, `rows[i]` on row
    /// `first_row + i`. Rows needing more than N_APT tips get extra passes:
    /// pass `j` reads the `j`-th N_APT-sized chunk of every row, passes
    /// alternate direction, and each pass is trimmed to the rows that still
    /// have tips left. `gap` says what happens to rows inside a pass with
    /// nothing left to read. The first pass may continue the open scan.
    pub fn sweep_rows(&mut self, first_row: u32, rows: &[TipSet], gap: Gap) {
        let chunked: Vec<Vec<TipSet>> = rows.iter().map(|t| t.chunks(self.n_apt)).collect();
        let passes = chunked.iter().map(Vec::len).max().unwrap_or(0);
        for pass in 0..passes {
            let has = |i: usize| chunked[i].len() > pass;
            let Some(lo) = (0..rows.len()).find(|&i| has(i)) else {
                continue;
            };
            let hi = (0..rows.len()).rev().find(|&i| has(i)).unwrap();
            if pass > 0 {
                self.cut();
            }
            let (dir, order): (Direction, Box<dyn Iterator<Item = usize>>) = if pass % 2 == 0 {
                (Direction::Forward, Box::new(lo..=hi))
            } else {
                (Direction::Reverse, Box::new((lo..=hi).rev()))
            };
            for i in order {
                match chunked[i].get(pass) {
                    Some(t) => self.visit(first_row + i as u32, dir, t.clone()),
                    None if gap == Gap::Step => {
                        self.visit(first_row + i as u32, dir, TipSet::new())
                    }
                    None => self.cut(),
                }
            }
        }
    }

    pub fn finish(mut self) -> AccessPlan {
        self.cut();
        AccessPlan { scans: self.scans }
    }
}
