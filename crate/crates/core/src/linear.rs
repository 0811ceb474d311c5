//! Linear block abstraction and the row/column baselines built on it.
//!
//! The device is exposed as an array of logical blocks. A block is one
//! sector row read by one tip group, so it holds `N_APT` tip sectors. Tip
//! groups are fixed, contiguous ranges of `N_APT` regions. Block order runs
//! down the first column with group 1, back up it with group 2, and so on
//! through every group before moving to the next column; a pass always
//! starts where the previous one stopped.

use crate::emulator::{AccessPlan, Direction, PlanBuilder, TipSet};
use crate::error::{Error, Result};
use crate::params::DeviceParams;
use crate::relational::{RangeQuery, RelationSchema};
use crate::rs::RsAddr;

#[derive(Debug, Clone)]
pub struct LinearMap {
    params: DeviceParams,
    groups: u32,
}

/// Where a logical block lives: sector-axis row and tip group (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockAddr {
    pub row: u32,
    pub group: u32,
    pub direction: Direction,
}

impl LinearMap {
    pub fn new(params: &DeviceParams) -> Result<Self> {
        if params.n_apt == 0 || !params.n_pt().is_multiple_of(params.n_apt) {
            return Err(Error::InvalidParams {
                name: "N_APT",
                reason: format!(
                    "N_PT = {} is not a multiple of N_APT = {}",
                    params.n_pt(),
                    params.n_apt
                ),
            });
        }
        Ok(LinearMap {
            params: *params,
            groups: params.n_pt() / params.n_apt,
        })
    }

    pub fn params(&self) -> &DeviceParams {
        &self.params
    }

    /// Tip groups `G = N_PT / N_APT`.
    pub fn groups(&self) -> u32 {
        self.groups
    }

    pub fn lba_count(&self) -> u64 {
        self.params.n_s() as u64 * self.groups as u64
    }

    pub fn block_bits(&self) -> u64 {
        self.params.n_apt as u64 * self.params.sector_size_bits as u64
    }

    pub fn block_sectors(&self) -> u32 {
        self.params.n_apt
    }

    /// Regions of tip group `g` (0-based).
    pub fn group_tips(&self, g: u32) -> TipSet {
        TipSet::range(g * self.params.n_apt + 1, (g + 1) * self.params.n_apt)
    }

    /// Location of block `lba` (1-based).
    pub fn locate(&self, lba: u64) -> Result<BlockAddr> {
        if lba < 1 || lba > self.lba_count() {
            return Err(Error::OutOfBounds(format!(
                "block {lba} outside [1, {}]",
                self.lba_count()
            )));
        }
        let s_y = self.params.s_y as u64;
        let i = lba - 1;
        let pass = i / s_y;
        let col = pass / self.groups as u64;
        let group = (pass % self.groups as u64) as u32;
        let j = i % s_y;
        let direction = if (pass - col).is_multiple_of(2) {
            Direction::Forward
        } else {
            Direction::Reverse
        };
        let off = match direction {
            Direction::Forward => j,
            Direction::Reverse => s_y - 1 - j,
        };
        Ok(BlockAddr {
            row: (col * s_y + off) as u32 + 1,
            group,
            direction,
        })
    }

    /// RS address of sector `i` (0-based) of block `lba`.
    pub fn sector_addr(&self, lba: u64, i: u32) -> Result<RsAddr> {
        if i >= self.params.n_apt {
            return Err(Error::OutOfBounds(format!(
                "sector {i} outside a {}-sector block",
                self.params.n_apt
            )));
        }
        let b = self.locate(lba)?;
        Ok(RsAddr {
            r: b.group * self.params.n_apt + i + 1,
            s: b.row,
        })
    }

    /// Appends blocks `lba_start..lba_start + lba_len` to `b` in block order.
    pub fn push_blocks(&self, b: &mut PlanBuilder, lba_start: u64, lba_len: u64) -> Result<()> {
        if lba_len == 0 {
            return Ok(());
        }
        let end = lba_start.saturating_add(lba_len - 1);
        if lba_start < 1 || end > self.lba_count() {
            return Err(Error::OutOfBounds(format!(
                "blocks {lba_start}..={end} outside [1, {}]",
                self.lba_count()
            )));
        }
        for lba in lba_start..=end {
            let a = self.locate(lba)?;
            b.visit(a.row, a.direction, self.group_tips(a.group));
        }
        Ok(())
    }

    pub fn lba_to_plan(&self, lba_start: u64, lba_len: u64) -> Result<AccessPlan> {
        let mut b = PlanBuilder::new(self.params.n_apt);
        self.push_blocks(&mut b, lba_start, lba_len)?;
        Ok(b.finish())
    }
}

/// Row store: whole tuples packed into consecutive blocks from block 1.
#[derive(Debug, Clone)]
pub struct NsmLayout {
    schema: RelationSchema,
    map: LinearMap,
    spv: u32,
    per_block: u32,
    blocks: u64,
}

impl NsmLayout {
    pub fn new(schema: RelationSchema, params: &DeviceParams) -> Result<Self> {
        let map = LinearMap::new(params)?;
        let spv = schema.sectors_per_value(params);
        let tuple_sectors = schema.k as u64 * spv as u64;
        let per_block = (params.n_apt as u64 / tuple_sectors) as u32;
        if per_block == 0 {
            return Err(Error::Capacity {
                needed: tuple_sectors,
                available: params.n_apt as u64,
                unit: "sectors per block",
            });
        }
        let blocks = (schema.n as u64).div_ceil(per_block as u64);
        if blocks > map.lba_count() {
            return Err(Error::Capacity {
                needed: blocks,
                available: map.lba_count(),
                unit: "blocks",
            });
        }
        Ok(NsmLayout {
            schema,
            map,
            spv,
            per_block,
            blocks,
        })
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    pub fn tuples_per_block(&self) -> u32 {
        self.per_block
    }

    pub fn blocks(&self) -> u64 {
        self.blocks
    }

    /// First sector of `a[v,w]`; the value's sectors follow on consecutive
    /// tips of the same block.
    pub fn map(&self, v: u32, w: u32) -> Result<RsAddr> {
        check(&self.schema, v, w)?;
        let lba = ((v - 1) / self.per_block) as u64 + 1;
        let slot = (v - 1) % self.per_block;
        let i = (slot * self.schema.k + w - 1) * self.spv;
        self.map.sector_addr(lba, i)
    }

    /// Every block of the relation, whatever the query.
    pub fn compile(&self, q: &RangeQuery) -> Result<AccessPlan> {
        q.validate(&self.schema)?;
        self.map.lba_to_plan(1, self.blocks)
    }
}

/// Column store: one sub-relation per attribute, each starting on a fresh
/// block, attribute 1 first.
#[derive(Debug, Clone)]
pub struct DsmLayout {
    schema: RelationSchema,
    map: LinearMap,
    spv: u32,
    per_block: u32,
    blocks_per_attr: u64,
}

impl DsmLayout {
    pub fn new(schema: RelationSchema, params: &DeviceParams) -> Result<Self> {
        let map = LinearMap::new(params)?;
        let spv = schema.sectors_per_value(params);
        let per_block = params.n_apt / spv;
        if per_block == 0 {
            return Err(Error::Capacity {
                needed: spv as u64,
                available: params.n_apt as u64,
                unit: "sectors per block",
            });
        }
        let blocks_per_attr = (schema.n as u64).div_ceil(per_block as u64);
        let blocks = blocks_per_attr * schema.k as u64;
        if blocks > map.lba_count() {
            return Err(Error::Capacity {
                needed: blocks,
                available: map.lba_count(),
                unit: "blocks",
            });
        }
        Ok(DsmLayout {
            schema,
            map,
            spv,
            per_block,
            blocks_per_attr,
        })
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    pub fn values_per_block(&self) -> u32 {
        self.per_block
    }

    pub fn blocks_per_attr(&self) -> u64 {
        self.blocks_per_attr
    }

    fn first_block(&self, w: u32) -> u64 {
        (w - 1) as u64 * self.blocks_per_attr + 1
    }

    /// First sector of `a[v,w]`.
    pub fn map(&self, v: u32, w: u32) -> Result<RsAddr> {
        check(&self.schema, v, w)?;
        let lba = self.first_block(w) + ((v - 1) / self.per_block) as u64;
        let i = (v - 1) % self.per_block * self.spv;
        self.map.sector_addr(lba, i)
    }

    /// Every block of each projected sub-relation, in attribute order.
    pub fn compile(&self, q: &RangeQuery) -> Result<AccessPlan> {
        q.validate(&self.schema)?;
        let mut b = PlanBuilder::new(self.map.params().n_apt);
        for &w in &q.projected {
            self.map
                .push_blocks(&mut b, self.first_block(w), self.blocks_per_attr)?;
        }
        Ok(b.finish())
    }
}

fn check(schema: &RelationSchema, v: u32, w: u32) -> Result<()> {
    if v < 1 || v > schema.n || w < 1 || w > schema.k {
        return Err(Error::OutOfBounds(format!(
            "a[{v},{w}] outside {} tuples x {} attributes",
            schema.n, schema.k
        )));
    }
    Ok(())
}
