//! Retrieval-time experiments over every placement.
//!
//! Each sweep point is measured on a fresh emulator per query and averaged
//! over `repeats` seeds (`seed`, `seed + 1`, ...). Points run in parallel;
//! rows come back sorted by experiment, placement and sweep variable, so
//! the CSV for a given configuration is byte-for-byte reproducible.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use crate::cost::{estimate, lower_bound, CostEstimate, CostInput};
use crate::emulator::{AccessPlan, Emulator, SeekModel, Timing};
use crate::error::{Error, Result};
use crate::linear::{DsmLayout, NsmLayout};
use crate::params::{cmu_defaults, DeviceParams};
use crate::relational::{answer_bits, RangeQuery, RpLayout, RsyLayout};
use crate::rs::rs_params;
use crate::spatial::{
    build_block_grid, Curve, QueryRegion, SpLayout, SpatialSpace, SsyLayout, WorkloadProfile,
};
use crate::workload::{
    gen_query_region, gen_relation, gen_spatial, rng, tuples_for_mb, Distribution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Placement {
    RelationalParallel,
    RelationalSequentialYu,
    RelationalLowerBound,
    NsmGriffin,
    DsmGriffin,
    SpatialParallel,
    SpatialSequentialYu,
    SpatialLowerBound,
}

impl Placement {
    pub const RELATIONAL: [Placement; 5] = [
        Placement::RelationalParallel,
        Placement::RelationalSequentialYu,
        Placement::RelationalLowerBound,
        Placement::NsmGriffin,
        Placement::DsmGriffin,
    ];

    pub const SPATIAL: [Placement; 3] = [
        Placement::SpatialParallel,
        Placement::SpatialSequentialYu,
        Placement::SpatialLowerBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Placement::RelationalParallel => "relational-parallel",
            Placement::RelationalSequentialYu => "relational-sequential-yu",
            Placement::RelationalLowerBound => "relational-lowerbound",
            Placement::NsmGriffin => "nsm-griffin",
            Placement::DsmGriffin => "dsm-griffin",
            Placement::SpatialParallel => "spatial-parallel",
            Placement::SpatialSequentialYu => "spatial-sequential-yu",
            Placement::SpatialLowerBound => "spatial-lowerbound",
        }
    }

    pub fn is_relational(self) -> bool {
        Self::RELATIONAL.contains(&self)
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::RELATIONAL
            .iter()
            .chain(Self::SPATIAL.iter())
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPlacement(s.to_string()))
    }
}

/// Which attributes a relational query projects.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ProjectionPick {
    /// Attributes `1..=N_projection`.
    Leading,
    /// Attribute 1 plus `N_projection - 1` others drawn per seed.
    #[default]
    Random,
}

impl FromStr for ProjectionPick {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "leading" => Ok(ProjectionPick::Leading),
            "random" => Ok(ProjectionPick::Random),
            _ => Err(Error::Config(format!("unknown projection pick `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub params: DeviceParams,
    pub seek_model: SeekModel,
    pub seed: u64,
    pub repeats: u32,
    pub projection: ProjectionPick,
    pub distribution: Distribution,
    pub curve: Curve,
    /// Attributes per tuple.
    pub k: u32,
    pub attr_bytes: u32,
    pub objects: u64,
    pub obj_bytes: u32,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            params: cmu_defaults(),
            seek_model: SeekModel::Average,
            seed: 1,
            repeats: 20,
            projection: ProjectionPick::Random,
            distribution: Distribution::Uniform,
            curve: Curve::Hilbert,
            k: 16,
            attr_bytes: 8,
            objects: 40_960_000,
            obj_bytes: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationalSweep {
    pub sizes_mb: Vec<f64>,
    pub n_projections: Vec<u32>,
    pub selectivity: f64,
    /// Projection width held fixed while the size varies.
    pub size_sweep_projection: u32,
    /// Relation size held fixed while the projection varies.
    pub projection_sweep_mb: f64,
}

impl Default for RelationalSweep {
    fn default() -> Self {
        RelationalSweep {
            sizes_mb: vec![5.0, 10.0, 20.0, 40.0, 80.0, 160.0, 320.0],
            n_projections: (1..=16).collect(),
            selectivity: 0.1,
            size_sweep_projection: 8,
            projection_sweep_mb: 320.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSweep {
    /// Fractions of the space.
    pub query_sizes: Vec<f64>,
    pub aspects: Vec<f64>,
    /// Aspect held fixed while the size varies.
    pub size_sweep_aspect: f64,
    /// Size held fixed while the aspect varies.
    pub aspect_sweep_size: f64,
}

impl Default for SpatialSweep {
    fn default() -> Self {
        SpatialSweep {
            query_sizes: vec![0.0001, 0.001, 0.01, 0.1],
            aspects: (0..9).map(|i| 16.0 / (1u32 << i) as f64).collect(),
            size_sweep_aspect: 1.0,
            aspect_sweep_size: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RelationalRow {
    pub experiment: u8,
    pub placement: String,
    pub data_mb: f64,
    pub n_projection: u32,
    pub selectivity: f64,
    pub meas_total_s: f64,
    pub est_total_s: f64,
    pub seek_s: f64,
    pub transfer_s: f64,
    pub settle_s: f64,
    pub turnaround_s: f64,
    pub scans: f64,
    pub k_parallel: f64,
    pub k_random: f64,
    /// Bits the query logically returns.
    pub retrieval_bits: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SpatialRow {
    pub experiment: u8,
    pub placement: String,
    pub query_size: f64,
    pub aspect: f64,
    pub qx: u32,
    pub qy: u32,
    pub meas_total_s: f64,
    pub est_total_s: f64,
    pub seek_s: f64,
    pub transfer_s: f64,
    pub settle_s: f64,
    pub turnaround_s: f64,
    pub scans: f64,
    pub k_parallel: f64,
    pub k_random: f64,
    pub n_query_blocks: f64,
    pub retrieval_bits: f64,
    pub seed: u64,
}

/// One executed query.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Measurement {
    pub timing: Timing,
    pub estimate: CostEstimate,
    pub k_parallel: f64,
    pub k_random: f64,
}

/// Runs `plan` on a fresh emulator and prices the same trace with the
/// analytic model: the transferred bits at the observed parallelism plus
/// one average seek per sled move.
pub fn measure(plan: &AccessPlan, params: &DeviceParams, model: SeekModel) -> Result<Measurement> {
    let timing = Emulator::new(*params)
        .with_seek_model(model)
        .execute(plan)?;
    let k_parallel = timing.k_parallel();
    let k_random = timing.n_moves as f64;
    let estimate = if timing.n_row_steps == 0 {
        CostEstimate::default()
    } else {
        estimate(
            &CostInput {
                retrieval_data_bits: timing.sectors as f64 * params.sector_size_bits as f64,
                k_parallel,
                k_random,
            },
            &rs_params(params),
        )?
    };
    Ok(Measurement {
        timing,
        estimate,
        k_parallel,
        k_random,
    })
}

fn lower_bound_measurement(bits: f64, params: &DeviceParams) -> Measurement {
    let lb = lower_bound(bits, &rs_params(params), params.n_apt);
    Measurement {
        timing: Timing {
            total_s: lb.total_s,
            transfer_s: lb.transfer_s,
            ..Timing::default()
        },
        estimate: lb,
        k_parallel: params.n_apt as f64,
        k_random: 0.0,
    }
}

#[derive(Default)]
struct Mean {
    n: f64,
    total: f64,
    est: f64,
    seek: f64,
    transfer: f64,
    settle: f64,
    turnaround: f64,
    scans: f64,
    k_par: f64,
    k_rand: f64,
    blocks: f64,
    bits: f64,
}

impl Mean {
    fn add(&mut self, m: &Measurement, bits: f64, blocks: f64) {
        self.n += 1.0;
        self.total += m.timing.total_s;
        self.est += m.estimate.total_s;
        self.seek += m.timing.seek_s;
        self.transfer += m.timing.transfer_s;
        self.settle += m.timing.settle_s;
        self.turnaround += m.timing.turnaround_s;
        self.scans += m.timing.n_seeks as f64;
        self.k_par += m.k_parallel;
        self.k_rand += m.k_random;
        self.blocks += blocks;
        self.bits += bits;
    }

    fn get(&self, x: f64) -> f64 {
        if self.n == 0.0 {
            0.0
        } else {
            x / self.n
        }
    }
}

/// Projected attributes for repeat `seed`.
pub fn pick_projection(
    pick: ProjectionPick,
    k: u32,
    n_projection: u32,
    seed: u64,
) -> Result<RangeQuery> {
    if n_projection < 1 || n_projection > k {
        return Err(Error::InvalidQuery(format!(
            "N_projection {n_projection} outside [1, {k}]"
        )));
    }
    let attrs: Vec<u32> = match pick {
        ProjectionPick::Leading => (1..=n_projection).collect(),
        ProjectionPick::Random => {
            let mut r = rng(seed ^ PROJECTION_SALT);
            std::iter::once(1)
                .chain(
                    sample(&mut r, (k - 1) as usize, (n_projection - 1) as usize)
                        .into_iter()
                        .map(|i| i as u32 + 2),
                )
                .collect()
        }
    };
    Ok(RangeQuery::new(attrs, 1, 0.0))
}

const PROJECTION_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Averages one relational placement at one sweep point.
pub fn relational_point(
    placement: Placement,
    experiment: u8,
    data_mb: f64,
    n_projection: u32,
    selectivity: f64,
    cfg: &BenchConfig,
) -> Result<RelationalRow> {
    if !placement.is_relational() {
        return Err(Error::UnknownPlacement(format!(
            "{placement} is not a relational placement"
        )));
    }
    let p = &cfg.params;
    let n = tuples_for_mb(data_mb, cfg.k, cfg.attr_bytes)?;
    let mut mean = Mean::default();
    for r in 0..cfg.repeats.max(1) {
        let seed = cfg.seed.wrapping_add(r as u64);
        let rel = gen_relation(
            n,
            cfg.k,
            cfg.attr_bytes,
            selectivity,
            cfg.distribution,
            seed,
            p,
        )?;
        let mut q = pick_projection(cfg.projection, cfg.k, n_projection, seed)?;
        q.selectivity = selectivity;
        let n_qual = rel.qualifying.len() as u32;
        let bits = answer_bits(&rel.schema, &q, n_qual);
        let m = match placement {
            Placement::RelationalParallel => {
                let l = RpLayout::new(rel.schema, p)?;
                measure(&l.compile(&q, &rel.qualifying)?, p, cfg.seek_model)?
            }
            Placement::RelationalSequentialYu => {
                let l = RsyLayout::new(rel.schema, p)?;
                measure(&l.compile(&q)?, p, cfg.seek_model)?
            }
            Placement::NsmGriffin => {
                let l = NsmLayout::new(rel.schema, p)?;
                measure(&l.compile(&q)?, p, cfg.seek_model)?
            }
            Placement::DsmGriffin => {
                let l = DsmLayout::new(rel.schema, p)?;
                measure(&l.compile(&q)?, p, cfg.seek_model)?
            }
            _ => lower_bound_measurement(bits, p),
        };
        mean.add(&m, bits, 0.0);
    }
    Ok(RelationalRow {
        experiment,
        placement: placement.name().to_string(),
        data_mb,
        n_projection,
        selectivity,
        meas_total_s: mean.get(mean.total),
        est_total_s: mean.get(mean.est),
        seek_s: mean.get(mean.seek),
        transfer_s: mean.get(mean.transfer),
        settle_s: mean.get(mean.settle),
        turnaround_s: mean.get(mean.turnaround),
        scans: mean.get(mean.scans),
        k_parallel: mean.get(mean.k_par),
        k_random: mean.get(mean.k_rand),
        retrieval_bits: mean.get(mean.bits),
        seed: cfg.seed,
    })
}

/// Averages one spatial placement at one sweep point over random query
/// origins.
pub fn spatial_point(
    placement: Placement,
    experiment: u8,
    query_size: f64,
    aspect: f64,
    cfg: &BenchConfig,
) -> Result<SpatialRow> {
    if placement.is_relational() {
        return Err(Error::UnknownPlacement(format!(
            "{placement} is not a spatial placement"
        )));
    }
    let p = &cfg.params;
    let (space, _) = gen_spatial(cfg.objects, cfg.obj_bytes, cfg.seed, p)?;
    let mut mean = Mean::default();
    let mut shape = (0, 0);
    let mut sp: Option<SpLayout> = None;
    let ssy = match placement {
        Placement::SpatialSequentialYu => Some(SsyLayout::new(space, p)?),
        _ => None,
    };
    for r in 0..cfg.repeats.max(1) {
        let seed = cfg.seed.wrapping_add(r as u64);
        let q = gen_query_region(&space, query_size, aspect, &mut rng(seed))?;
        shape = (q.qx, q.qy);
        let bits = q.size() as f64 * space.obj_bits as f64;
        let (m, blocks) = match placement {
            Placement::SpatialParallel => {
                if sp.is_none() {
                    sp = Some(sp_layout(space, &q, cfg)?);
                }
                let l = sp.as_ref().unwrap();
                let blocks = l.query_blocks(&q).len() as f64;
                (measure(&l.compile(&q), p, cfg.seek_model)?, blocks)
            }
            Placement::SpatialSequentialYu => {
                let l = ssy.as_ref().unwrap();
                (measure(&l.compile(&q), p, cfg.seek_model)?, 0.0)
            }
            _ => (lower_bound_measurement(bits, p), 0.0),
        };
        mean.add(&m, bits, blocks);
    }
    Ok(SpatialRow {
        experiment,
        placement: placement.name().to_string(),
        query_size,
        aspect,
        qx: shape.0,
        qy: shape.1,
        meas_total_s: mean.get(mean.total),
        est_total_s: mean.get(mean.est),
        seek_s: mean.get(mean.seek),
        transfer_s: mean.get(mean.transfer),
        settle_s: mean.get(mean.settle),
        turnaround_s: mean.get(mean.turnaround),
        scans: mean.get(mean.scans),
        k_parallel: mean.get(mean.k_par),
        k_random: mean.get(mean.k_rand),
        n_query_blocks: mean.get(mean.blocks),
        retrieval_bits: mean.get(mean.bits),
        seed: cfg.seed,
    })
}

/// SP layout tuned for a workload of queries shaped like `q`.
fn sp_layout(space: SpatialSpace, q: &QueryRegion, cfg: &BenchConfig) -> Result<SpLayout> {
    let profile = WorkloadProfile::single(q.qx, q.qy);
    let grid = build_block_grid(&space, &profile, cfg.curve, &cfg.params)?;
    SpLayout::new(space, grid, &cfg.params)
}

/// Size sweep (experiment 1) and projection sweep (experiment 2).
pub fn run_relational(
    placements: &[Placement],
    sweep: &RelationalSweep,
    cfg: &BenchConfig,
) -> Result<Vec<RelationalRow>> {
    let mut jobs = Vec::new();
    for &pl in placements {
        for &mb in &sweep.sizes_mb {
            jobs.push((pl, 1u8, mb, sweep.size_sweep_projection));
        }
        for &np in &sweep.n_projections {
            jobs.push((pl, 2u8, sweep.projection_sweep_mb, np));
        }
    }
    let mut rows = jobs
        .into_par_iter()
        .map(|(pl, e, mb, np)| relational_point(pl, e, mb, np, sweep.selectivity, cfg))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        (a.experiment, &a.placement)
            .cmp(&(b.experiment, &b.placement))
            .then(a.data_mb.total_cmp(&b.data_mb))
            .then(a.n_projection.cmp(&b.n_projection))
    });
    Ok(rows)
}

/// Size sweep (experiment 3) and aspect sweep (experiment 4).
pub fn run_spatial(
    placements: &[Placement],
    sweep: &SpatialSweep,
    cfg: &BenchConfig,
) -> Result<Vec<SpatialRow>> {
    let mut jobs = Vec::new();
    for &pl in placements {
        for &s in &sweep.query_sizes {
            jobs.push((pl, 3u8, s, sweep.size_sweep_aspect));
        }
        for &a in &sweep.aspects {
            jobs.push((pl, 4u8, sweep.aspect_sweep_size, a));
        }
    }
    let mut rows = jobs
        .into_par_iter()
        .map(|(pl, e, s, a)| spatial_point(pl, e, s, a, cfg))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| {
        (a.experiment, &a.placement)
            .cmp(&(b.experiment, &b.placement))
            .then(a.query_size.total_cmp(&b.query_size))
            .then(a.aspect.total_cmp(&b.aspect))
    });
    Ok(rows)
}

pub fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `16`, `0.5`, `1/16` or `0.01%`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Config(format!("bad number `{s}`"));
    let v = if let Some(pct) = s.strip_suffix('%') {
        pct.trim().parse::<f64>().map_err(|_| bad())? / 100.0
    } else if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        a / b
    } else {
        s.parse().map_err(|_| bad())?
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Comma-separated [`parse_number`] values.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_number)
        .collect()
}
