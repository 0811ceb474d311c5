//! Spatial placements for a uniform grid of equally sized objects.
//!
//! Spatial-Sequential-Yu (SSY) stores object `(x, y)` at `<x, y>`, slicing
//! spaces wider than `N_PT` into vertical components stacked along the
//! Sector axis. Spatial-Parallel (SP) cuts the space into blocks of `N_R`
//! objects, orders the blocks along a space-filling curve and stores the
//! `i`-th block, row-major, in the `i`-th simultaneous-access sector group.

mod curve;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use curve::Curve;

use crate::cost::CostInput;
use crate::emulator::{AccessPlan, Gap, PhysAddr, PlanBuilder, TipSet};
use crate::error::{Error, Result};
use crate::params::DeviceParams;
use crate::rs::RsAddr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialSpace {
    pub w: u32,
    pub h: u32,
    pub obj_bits: u32,
}

impl SpatialSpace {
    pub fn new(w: u32, h: u32, obj_bits: u32) -> Result<Self> {
        if w == 0 || h == 0 || obj_bits == 0 {
            return Err(Error::InvalidQuery(format!(
                "empty space {w} x {h} of {obj_bits}-bit objects"
            )));
        }
        Ok(SpatialSpace { w, h, obj_bits })
    }

    pub fn sectors_per_object(&self, p: &DeviceParams) -> u32 {
        self.obj_bits.div_ceil(p.sector_size_bits)
    }

    pub fn objects(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    fn check(&self, x: u32, y: u32) -> Result<()> {
        if x < 1 || x > self.w || y < 1 || y > self.h {
            return Err(Error::OutOfBounds(format!(
                "object ({x}, {y}) outside {} x {}",
                self.w, self.h
            )));
        }
        Ok(())
    }
}

/// Axis-aligned query rectangle `[x0, x0 + qx) x [y0, y0 + qy)`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRegion {
    pub x0: u32,
    pub y0: u32,
    pub qx: u32,
    pub qy: u32,
}

impl QueryRegion {
    pub fn size(&self) -> u64 {
        self.qx as u64 * self.qy as u64
    }

    pub fn aspect(&self) -> f64 {
        self.qx as f64 / self.qy as f64
    }

    pub fn x1(&self) -> u32 {
        self.x0 + self.qx - 1
    }

    pub fn y1(&self) -> u32 {
        self.y0 + self.qy - 1
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        (self.x0..=self.x1()).contains(&x) && (self.y0..=self.y1()).contains(&y)
    }

    /// The part of the query inside `space`, if any.
    pub fn clip(&self, space: &SpatialSpace) -> Option<QueryRegion> {
        if self.qx == 0 || self.qy == 0 || self.x0 > space.w || self.y0 > space.h {
            return None;
        }
        let x0 = self.x0.max(1);
        let y0 = self.y0.max(1);
        let x1 = (self.x0 as u64 + self.qx as u64 - 1).min(space.w as u64) as u32;
        let y1 = (self.y0 as u64 + self.qy as u64 - 1).min(space.h as u64) as u32;
        if x1 < x0 || y1 < y0 {
            return None;
        }
        Some(QueryRegion {
            x0,
            y0,
            qx: x1 - x0 + 1,
            qy: y1 - y0 + 1,
        })
    }
}

/// Expected query mix: `(frequency, qx, qy)` triples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkloadProfile {
    pub entries: Vec<(f64, u32, u32)>,
}

impl WorkloadProfile {
    pub fn single(qx: u32, qy: u32) -> Self {
        WorkloadProfile {
            entries: vec![(1.0, qx, qy)],
        }
    }

    /// `sum(f * qx) / sum(f * qy)`.
    pub fn weighted_aspect(&self) -> Result<f64> {
        if self.entries.is_empty() {
            return Err(Error::EmptyProfile);
        }
        let (mut num, mut den) = (0.0, 0.0);
        for &(f, qx, qy) in &self.entries {
            num += f * qx as f64;
            den += f * qy as f64;
        }
        Ok(num / den)
    }
}

impl FromStr for WorkloadProfile {
    type Err = Error;

    /// One `f qx qy` triple per line; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: &str| Error::Config(format!("profile line {}: {reason}", i + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [f, qx, qy] = fields[..] else {
                return Err(bad("expected `f qx qy`"));
            };
            let f: f64 = f.parse().map_err(|_| bad("bad frequency"))?;
            let qx: u32 = qx.parse().map_err(|_| bad("bad qx"))?;
            let qy: u32 = qy.parse().map_err(|_| bad("bad qy"))?;
            if !(f > 0.0) || !f.is_finite() || qx == 0 || qy == 0 {
                return Err(bad("frequency and extents must be positive"));
            }
            entries.push((f, qx, qy));
        }
        if entries.is_empty() {
            return Err(Error::EmptyProfile);
        }
        Ok(WorkloadProfile { entries })
    }
}

/// Spatial-Sequential-Yu.
#[derive(Debug, Clone)]
pub struct SsyLayout {
    space: SpatialSpace,
    params: DeviceParams,
    spo: u32,
    components: u32,
}

impl SsyLayout {
    pub fn new(space: SpatialSpace, params: &DeviceParams) -> Result<Self> {
        let spo = space.sectors_per_object(params);
        let components = space.w.div_ceil(params.n_pt());
        let rows = components as u64 * space.h as u64 * spo as u64;
        if rows > params.n_s() as u64 {
            return Err(Error::Capacity {
                needed: rows,
                available: params.n_s() as u64,
                unit: "sector rows",
            });
        }
        Ok(SsyLayout {
            space,
            params: *params,
            spo,
            components,
        })
    }

    pub fn space(&self) -> &SpatialSpace {
        &self.space
    }

    pub fn components(&self) -> u32 {
        self.components
    }

    fn component_rows(&self) -> u32 {
        self.space.h * self.spo
    }

    pub fn map(&self, x: u32, y: u32) -> Result<RsAddr> {
        self.space.check(x, y)?;
        let n_pt = self.params.n_pt();
        let c = (x - 1) / n_pt;
        Ok(RsAddr {
            r: x - c * n_pt,
            s: c * self.component_rows() + (y - 1) * self.spo + 1,
        })
    }

    /// Direct physical placement of object `(x, y)` (first sector), written
    /// without going through RS addresses.
    pub fn map_phys(&self, x: u32, y: u32) -> Result<PhysAddr> {
        self.space.check(x, y)?;
        let p = &self.params;
        let n_pt = p.n_pt();
        let c = (x - 1) / n_pt;
        let xl = x - c * n_pt;
        let yl = c * self.component_rows() + (y - 1) * self.spo + 1;
        let s_x = yl.div_ceil(p.s_y);
        let s_y = if s_x % 2 == 1 {
            (yl - 1) % p.s_y + 1
        } else {
            p.s_y - (yl - 1) % p.s_y
        };
        Ok(PhysAddr {
            r_x: (xl - 1) % p.r_x + 1,
            r_y: xl.div_ceil(p.r_x),
            s_x,
            s_y,
        })
    }

    /// `ceil(qx / N_APT)` alternating scans over the query rows of each
    /// component the query touches.
    pub fn compile(&self, q: &QueryRegion) -> AccessPlan {
        let mut b = PlanBuilder::new(self.params.n_apt);
        let Some(q) = q.clip(&self.space) else {
            return b.finish();
        };
        let n_pt = self.params.n_pt();
        for c in (q.x0 - 1) / n_pt..=(q.x1() - 1) / n_pt {
            let lo = q.x0.max(c * n_pt + 1) - c * n_pt;
            let hi = q.x1().min((c + 1) * n_pt) - c * n_pt;
            let first = c * self.component_rows() + (q.y0 - 1) * self.spo + 1;
            b.sweep_uniform(first, q.qy * self.spo, &TipSet::range(lo, hi));
        }
        b.finish()
    }

    pub fn k_values(&self, q: &QueryRegion) -> CostInput {
        let n_pt = self.params.n_pt();
        let (bits, k_parallel, k_random) = match q.clip(&self.space) {
            None => (0.0, self.params.n_apt as f64, 0.0),
            Some(q) => (
                q.size() as f64 * self.space.obj_bits as f64,
                q.qx.min(self.params.n_apt) as f64,
                ((q.x1() - 1) / n_pt - (q.x0 - 1) / n_pt + 1) as f64,
            ),
        };
        CostInput {
            retrieval_data_bits: bits,
            k_parallel,
            k_random,
        }
    }
}

/// Block partition and block order of Spatial-Parallel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    /// Block width in objects.
    pub b_x: u32,
    /// Block height in objects.
    pub b_y: u32,
    /// Blocks across.
    pub g_x: u32,
    /// Blocks down.
    pub g_y: u32,
    pub curve: Curve,
    /// 1-based curve position of each block, indexed `gy * g_x + gx`.
    position: Vec<u32>,
}

impl BlockGrid {
    pub fn n_blocks(&self) -> u32 {
        self.g_x * self.g_y
    }

    /// Curve position (1-based) of the zero-based block `(gx, gy)`.
    pub fn position(&self, gx: u32, gy: u32) -> u32 {
        self.position[(gy * self.g_x + gx) as usize]
    }

    /// Zero-based blocks in curve order.
    pub fn blocks_in_order(&self) -> Vec<(u32, u32)> {
        let mut out = vec![(0, 0); self.position.len()];
        for (i, &p) in self.position.iter().enumerate() {
            out[p as usize - 1] = (i as u32 % self.g_x, i as u32 / self.g_x);
        }
        out
    }
}

/// Factor pairs `(b_x, b_y)` of `n` whose ratio is a power of two, or all
/// factor pairs when there is none.
pub fn block_shapes(n: u32) -> Vec<(u32, u32)> {
    let pairs: Vec<(u32, u32)> = (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| (d, n / d))
        .collect();
    let pow2: Vec<(u32, u32)> = pairs
        .iter()
        .copied()
        .filter(|&(a, b)| {
            let (hi, lo) = (a.max(b), a.min(b));
            hi % lo == 0 && (hi / lo).is_power_of_two()
        })
        .collect();
    if pow2.is_empty() {
        pairs
    } else {
        pow2
    }
}

/// Picks the block shape whose aspect is closest to `target` on a log
/// scale, preferring shapes that fit inside the space and, on ties, the
/// wider one.
pub fn choose_block_shape(n_r: u32, target: f64, space: &SpatialSpace) -> (u32, u32) {
    let shapes = block_shapes(n_r);
    let fitting: Vec<(u32, u32)> = shapes
        .iter()
        .copied()
        .filter(|&(bx, by)| bx <= space.w && by <= space.h)
        .collect();
    let pool = if fitting.is_empty() { shapes } else { fitting };
    let goal = target.log2();
    let mut best = pool[0];
    let mut best_d = f64::INFINITY;
    for (bx, by) in pool {
        let d = ((bx as f64 / by as f64).log2() - goal).abs();
        if d < best_d - 1e-12 || ((d - best_d).abs() <= 1e-12 && bx > best.0) {
            best = (bx, by);
            best_d = d;
        }
    }
    best
}

pub fn build_block_grid(
    space: &SpatialSpace,
    profile: &WorkloadProfile,
    curve: Curve,
    params: &DeviceParams,
) -> Result<BlockGrid> {
    let target = profile.weighted_aspect()?;
    let (b_x, b_y) = choose_block_shape(params.n_r(), target, space);
    block_grid_with_shape(space, b_x, b_y, curve)
}

/// Grid with an explicit block shape.
pub fn block_grid_with_shape(
    space: &SpatialSpace,
    b_x: u32,
    b_y: u32,
    curve: Curve,
) -> Result<BlockGrid> {
    if b_x == 0 || b_y == 0 {
        return Err(Error::InfeasibleShape(format!("block {b_x} x {b_y}")));
    }
    let g_x = space.w.div_ceil(b_x);
    let g_y = space.h.div_ceil(b_y);
    let mut position = vec![0u32; g_x as usize * g_y as usize];
    for (i, (gx, gy)) in curve.order(g_x, g_y).into_iter().enumerate() {
        position[(gy * g_x + gx) as usize] = i as u32 + 1;
    }
    Ok(BlockGrid {
        b_x,
        b_y,
        g_x,
        g_y,
        curve,
        position,
    })
}

/// Spatial-Parallel.
#[derive(Debug, Clone)]
pub struct SpLayout {
    space: SpatialSpace,
    params: DeviceParams,
    grid: BlockGrid,
    spo: u32,
    whole_groups: bool,
}

impl SpLayout {
    pub fn new(space: SpatialSpace, grid: BlockGrid, params: &DeviceParams) -> Result<Self> {
        if grid.b_x as u64 * grid.b_y as u64 != params.n_r() as u64 {
            return Err(Error::InfeasibleShape(format!(
                "block {} x {} does not hold N_R = {} objects",
                grid.b_x,
                grid.b_y,
                params.n_r()
            )));
        }
        let spo = space.sectors_per_object(params);
        let rows = grid.n_blocks() as u64 * spo as u64;
        if rows > params.n_s() as u64 {
            return Err(Error::Capacity {
                needed: rows,
                available: params.n_s() as u64,
                unit: "sector rows",
            });
        }
        Ok(SpLayout {
            space,
            params: *params,
            grid,
            spo,
            whole_groups: false,
        })
    }

    /// Read every cell of each touched block instead of only the cells
    /// inside the query.
    pub fn with_whole_groups(mut self, on: bool) -> Self {
        self.whole_groups = on;
        self
    }

    pub fn grid(&self) -> &BlockGrid {
        &self.grid
    }

    pub fn space(&self) -> &SpatialSpace {
        &self.space
    }

    pub fn map(&self, x: u32, y: u32) -> Result<RsAddr> {
        self.space.check(x, y)?;
        let g = &self.grid;
        let (gx, gy) = ((x - 1) / g.b_x, (y - 1) / g.b_y);
        let xl = (x - 1) % g.b_x + 1;
        let yl = (y - 1) % g.b_y + 1;
        Ok(RsAddr {
            r: (yl - 1) * g.b_x + xl,
            s: (g.position(gx, gy) - 1) * self.spo + 1,
        })
    }

    /// Blocks overlapping the query, zero-based.
    pub fn query_blocks(&self, q: &QueryRegion) -> Vec<(u32, u32)> {
        let Some(q) = q.clip(&self.space) else {
            return Vec::new();
        };
        let g = &self.grid;
        let mut out = Vec::new();
        for gy in (q.y0 - 1) / g.b_y..=(q.y1() - 1) / g.b_y {
            for gx in (q.x0 - 1) / g.b_x..=(q.x1() - 1) / g.b_x {
                out.push((gx, gy));
            }
        }
        out
    }

    /// Tips of block `(gx, gy)` holding cells of `q` (or every existing cell
    /// in whole-group mode).
    fn block_tips(&self, gx: u32, gy: u32, q: &QueryRegion) -> TipSet {
        let g = &self.grid;
        let bx0 = gx * g.b_x + 1;
        let by0 = gy * g.b_y + 1;
        let bx1 = (bx0 + g.b_x - 1).min(self.space.w);
        let by1 = (by0 + g.b_y - 1).min(self.space.h);
        let (x0, x1, y0, y1) = if self.whole_groups {
            (bx0, bx1, by0, by1)
        } else {
            (
                q.x0.max(bx0),
                q.x1().min(bx1),
                q.y0.max(by0),
                q.y1().min(by1),
            )
        };
        let mut t = TipSet::new();
        for y in y0..=y1 {
            let base = (y - by0) * g.b_x;
            t.push_range(base + x0 - bx0 + 1, base + x1 - bx0 + 1);
        }
        t
    }

    /// Reads the query's blocks in curve order. Blocks at consecutive
    /// positions share one scan; each new run of blocks starts with a seek.
    pub fn compile(&self, q: &QueryRegion) -> AccessPlan {
        let mut b = PlanBuilder::new(self.params.n_apt);
        let Some(q) = q.clip(&self.space) else {
            return b.finish();
        };
        let mut blocks: Vec<(u32, TipSet)> = self
            .query_blocks(&q)
            .into_iter()
            .map(|(gx, gy)| (self.grid.position(gx, gy), self.block_tips(gx, gy, &q)))
            .collect();
        blocks.sort_unstable_by_key(|(pos, _)| *pos);
        let spo = self.spo as usize;
        let mut i = 0;
        while i < blocks.len() {
            let mut j = i + 1;
            while j < blocks.len() && blocks[j].0 == blocks[j - 1].0 + 1 {
                j += 1;
            }
            let rows: Vec<TipSet> = blocks[i..j]
                .iter()
                .flat_map(|(_, t)| std::iter::repeat_n(t.clone(), spo))
                .collect();
            b.cut();
            b.sweep_rows((blocks[i].0 - 1) * self.spo + 1, &rows, Gap::Step);
            i = j;
        }
        b.finish()
    }

    pub fn k_values(&self, q: &QueryRegion) -> CostInput {
        let plan = self.compile(q);
        let bits = q
            .clip(&self.space)
            .map_or(0.0, |q| q.size() as f64 * self.space.obj_bits as f64);
        let rows = plan.row_steps();
        CostInput {
            retrieval_data_bits: bits,
            k_parallel: if rows == 0 {
                self.params.n_apt as f64
            } else {
                plan.sectors() as f64 / rows as f64
            },
            k_random: self.query_blocks(q).len() as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::execute;
    use crate::params::cmu_defaults;
    use crate::rs::{mems_to_rs, rs_to_mems};
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn cmu_space() -> SpatialSpace {
        SpatialSpace::new(6400, 6400, 64).unwrap()
    }

    fn cmu_sp(aspect: f64) -> SpLayout {
        let p = cmu_defaults();
        let s = cmu_space();
        let (bx, by) = choose_block_shape(p.n_r(), aspect, &s);
        SpLayout::new(
            s,
            block_grid_with_shape(&s, bx, by, Curve::Hilbert).unwrap(),
            &p,
        )
        .unwrap()
    }

    #[test]
    fn ssy_hand_evaluated() {
        let p = cmu_defaults();
        let l = SsyLayout::new(cmu_space(), &p).unwrap();
        assert_eq!(l.map(1, 1).unwrap(), RsAddr::new(1, 1));
        assert_eq!(l.map(100, 200).unwrap(), RsAddr::new(100, 200));
        let expect = PhysAddr {
            r_x: 20,
            r_y: 2,
            s_x: 8,
            s_y: 17,
        };
        assert_eq!(l.map_phys(100, 200).unwrap(), expect);
        assert_eq!(rs_to_mems(l.map(100, 200).unwrap(), &p).unwrap(), expect);
    }

    #[test]
    fn ssy_scan_counts() {
        let p = cmu_defaults();
        let l = SsyLayout::new(cmu_space(), &p).unwrap();
        for (qx, scans) in [(640, 1), (1810, 2), (1280, 1), (2560, 2), (160, 1)] {
            let q = QueryRegion {
                x0: 1,
                y0: 1,
                qx,
                qy: 409_600 / qx,
            };
            assert_eq!(l.compile(&q).len(), scans, "qx = {qx}");
        }
        let q = QueryRegion {
            x0: 1,
            y0: 1,
            qx: 160,
            qy: 2560,
        };
        assert_eq!(l.k_values(&q).k_parallel, 160.0);
        let q = QueryRegion {
            qx: 2560,
            qy: 160,
            ..q
        };
        assert_eq!(l.k_values(&q).k_parallel, 1280.0);
        assert_eq!(l.k_values(&q).k_random, 1.0);
    }

    #[test]
    fn ssy_components() {
        let p = DeviceParams {
            r_x: 2,
            r_y: 2,
            s_x: 4,
            s_y: 5,
            n_apt: 2,
            ..cmu_defaults()
        };
        let s = SpatialSpace::new(10, 6, 64).unwrap();
        let l = SsyLayout::new(s, &p).unwrap();
        assert_eq!(l.components(), 3);
        assert_eq!(l.map(5, 1).unwrap(), RsAddr::new(1, 7));
        let q = QueryRegion {
            x0: 3,
            y0: 2,
            qx: 4,
            qy: 2,
        };
        let plan = l.compile(&q);
        // components 1 and 2, one scan each
        assert_eq!(plan.len(), 2);
        assert_eq!(plan.sectors(), 8);
        assert_eq!(l.k_values(&q).k_random, 2.0);
        assert!(SsyLayout::new(SpatialSpace::new(13, 6, 64).unwrap(), &p).is_err());
    }

    #[test]
    fn block_shape_rule() {
        let s = cmu_space();
        assert_eq!(choose_block_shape(6400, 1.0, &s), (80, 80));
        assert_eq!(choose_block_shape(6400, 0.25, &s), (40, 160));
        assert_eq!(choose_block_shape(6400, 16.0, &s), (320, 20));
        // 2 sits between 1 and 4 on a log scale: the wider shape wins
        assert_eq!(choose_block_shape(6400, 2.0, &s), (160, 40));
        let small = SpatialSpace::new(4, 4, 64).unwrap();
        assert_eq!(choose_block_shape(4, 1.0, &small), (2, 2));
        let shapes = block_shapes(6400);
        assert!(shapes.contains(&(1280, 5)) && !shapes.contains(&(100, 64)));
    }

    #[test]
    fn grid_order_is_hilbert() {
        let s = SpatialSpace::new(4, 4, 64).unwrap();
        let g = block_grid_with_shape(&s, 2, 2, Curve::Hilbert).unwrap();
        assert_eq!(g.blocks_in_order(), vec![(0, 0), (0, 1), (1, 1), (1, 0)]);
        let g = block_grid_with_shape(&cmu_space(), 80, 80, Curve::Hilbert).unwrap();
        assert_eq!((g.g_x, g.g_y, g.n_blocks()), (80, 80, 6400));
        let order = g.blocks_in_order();
        assert_eq!(order.iter().collect::<HashSet<_>>().len(), 6400);
    }

    #[test]
    fn sp_mapping() {
        let l = cmu_sp(1.0);
        let (gx, gy) = l.grid().blocks_in_order()[0];
        let (x, y) = (gx * 80 + 1, gy * 80 + 1);
        assert_eq!(l.map(x, y).unwrap(), RsAddr::new(1, 1));
        assert_eq!(l.map(x, y + 1).unwrap(), RsAddr::new(81, 1));
        assert_eq!(l.map(x + 5, y).unwrap().s, 1);
    }

    #[test]
    fn sp_aligned_block_query() {
        let l = cmu_sp(1.0);
        let q = QueryRegion {
            x0: 81,
            y0: 161,
            qx: 80,
            qy: 80,
        };
        let plan = l.compile(&q);
        assert_eq!(plan.len(), 5);
        assert_eq!(plan.row_steps(), 5);
        let t = execute(&plan, &cmu_defaults()).unwrap();
        assert_eq!(t.n_moves, 1);
        assert_eq!(l.query_blocks(&q).len(), 1);
    }

    #[test]
    fn sp_whole_space_needs_one_move() {
        let p = DeviceParams {
            r_x: 2,
            r_y: 2,
            s_x: 10,
            s_y: 5,
            n_apt: 2,
            ..cmu_defaults()
        };
        let s = SpatialSpace::new(8, 8, 64).unwrap();
        let grid =
            build_block_grid(&s, &WorkloadProfile::single(1, 1), Curve::Hilbert, &p).unwrap();
        let l = SpLayout::new(s, grid, &p).unwrap();
        let q = QueryRegion {
            x0: 1,
            y0: 1,
            qx: 8,
            qy: 8,
        };
        let t = execute(&l.compile(&q), &p).unwrap();
        assert_eq!(t.n_moves, 1);
        assert_eq!(t.sectors, 64);
    }

    #[test]
    fn small_query_touches_at_most_four_blocks() {
        let l = cmu_sp(1.0);
        let q = QueryRegion {
            x0: 50,
            y0: 50,
            qx: 64,
            qy: 64,
        };
        assert_eq!(l.query_blocks(&q).len(), 4);
        let plan = l.compile(&q);
        assert_eq!(plan.sectors(), 4096);
        let t = execute(&plan, &cmu_defaults()).unwrap();
        assert!(t.n_moves <= 4);
    }

    #[test]
    fn whole_group_mode_reads_full_blocks() {
        let l = cmu_sp(1.0).with_whole_groups(true);
        let q = QueryRegion {
            x0: 50,
            y0: 50,
            qx: 64,
            qy: 64,
        };
        assert_eq!(l.compile(&q).sectors(), 4 * 6400);
    }

    #[test]
    fn clipped_and_empty_queries() {
        let l = cmu_sp(1.0);
        let q = QueryRegion {
            x0: 6401,
            y0: 1,
            qx: 5,
            qy: 5,
        };
        assert!(l.compile(&q).is_empty());
        let q = QueryRegion {
            x0: 6399,
            y0: 6399,
            qx: 5,
            qy: 5,
        };
        assert_eq!(l.compile(&q).sectors(), 4);
    }

    #[test]
    fn profile_parsing() {
        let p: WorkloadProfile = "# f qx qy\n1 100 10\n3 10 10\n".parse().unwrap();
        assert!((p.weighted_aspect().unwrap() - 130.0 / 40.0).abs() < 1e-12);
        assert!(matches!(
            "# nothing\n".parse::<WorkloadProfile>(),
            Err(Error::EmptyProfile)
        ));
        assert!("0 1 1".parse::<WorkloadProfile>().is_err());
        assert!("1 2".parse::<WorkloadProfile>().is_err());
        assert!(matches!(
            WorkloadProfile::default().weighted_aspect(),
            Err(Error::EmptyProfile)
        ));
    }

    #[test]
    fn small_layouts_are_injective_and_compose() {
        let p = DeviceParams {
            r_x: 3,
            r_y: 3,
            s_x: 4,
            s_y: 3,
            n_apt: 3,
            ..cmu_defaults()
        };
        let s = SpatialSpace::new(9, 12, 64).unwrap();
        let ssy = SsyLayout::new(s, &p).unwrap();
        let grid = block_grid_with_shape(&s, 3, 3, Curve::Hilbert).unwrap();
        let sp = SpLayout::new(s, grid, &p).unwrap();
        let (mut a, mut b) = (HashSet::new(), HashSet::new());
        for x in 1..=9 {
            for y in 1..=12 {
                let rs = ssy.map(x, y).unwrap();
                assert!(a.insert(rs));
                assert_eq!(mems_to_rs(ssy.map_phys(x, y).unwrap(), &p).unwrap(), rs);
                assert!(b.insert(sp.map(x, y).unwrap()));
            }
        }
    }

    proptest! {
        #[test]
        fn ssy_composition_cmu(x in 1u32..=6400, y in 1u32..=6400) {
            let p = cmu_defaults();
            let l = SsyLayout::new(cmu_space(), &p).unwrap();
            prop_assert_eq!(mems_to_rs(l.map_phys(x, y).unwrap(), &p).unwrap(), l.map(x, y).unwrap());
        }

        #[test]
        fn sp_seeks_bounded_by_blocks(x0 in 1u32..6000, y0 in 1u32..6000, qx in 1u32..400, qy in 1u32..400) {
            let l = cmu_sp(1.0);
            let q = QueryRegion { x0, y0, qx, qy };
            let plan = l.compile(&q);
            let clipped = q.clip(l.space()).unwrap();
            prop_assert_eq!(plan.sectors(), clipped.size());
            let t = execute(&plan, &cmu_defaults()).unwrap();
            prop_assert!(t.n_moves as usize <= l.query_blocks(&q).len());
        }
    }
}
