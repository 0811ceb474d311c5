//! Relational placements.
//!
//! Relational-Sequential-Yu (RSY) puts `m = floor(N_R / k)` whole tuples in
//! each simultaneous-access sector group, attribute values side by side
//! along the Region axis. Relational-Parallel (RP) gives every attribute its
//! own band of sector groups so that each group holds `N_PT` values of one
//! attribute.

use serde::{Deserialize, Serialize};

use crate::cost::CostInput;
use crate::emulator::{AccessPlan, Gap, PhysAddr, PlanBuilder, TipSet};
use crate::error::{Error, Result};
use crate::params::DeviceParams;
use crate::rs::RsAddr;

/// Predicate threshold used by generated relations: `attr > BOUND` holds
/// exactly for qualifying tuples.
pub const BOUND: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationSchema {
    /// Attributes per tuple.
    pub k: u32,
    /// Fixed (maximum) size of every attribute value.
    pub attr_bits: u32,
    /// Tuples.
    pub n: u32,
}

impl RelationSchema {
    pub fn new(k: u32, attr_bits: u32, n: u32) -> Result<Self> {
        for (name, v) in [("k", k), ("attr_bits", attr_bits), ("n", n)] {
            if v == 0 {
                return Err(Error::InvalidQuery(format!("relation needs {name} >= 1")));
            }
        }
        Ok(RelationSchema { k, attr_bits, n })
    }

    /// Tip sectors taken by one attribute value.
    pub fn sectors_per_value(&self, p: &DeviceParams) -> u32 {
        self.attr_bits.div_ceil(p.sector_size_bits)
    }

    pub fn bits(&self) -> u64 {
        self.n as u64 * self.k as u64 * self.attr_bits as u64
    }

    fn check_value(&self, v: u32, w: u32) -> Result<()> {
        if v < 1 || v > self.n || w < 1 || w > self.k {
            return Err(Error::OutOfBounds(format!(
                "a[{v},{w}] outside {} tuples x {} attributes",
                self.n, self.k
            )));
        }
        Ok(())
    }
}

/// `SELECT projected FROM R WHERE attr[predicate_attr] > bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeQuery {
    /// Ascending, without duplicates.
    pub projected: Vec<u32>,
    pub predicate_attr: u32,
    pub bound: u64,
    pub selectivity: f64,
}

impl RangeQuery {
    pub fn new(
        projected: impl IntoIterator<Item = u32>,
        predicate_attr: u32,
        selectivity: f64,
    ) -> Self {
        let mut projected: Vec<u32> = projected.into_iter().collect();
        projected.sort_unstable();
        projected.dedup();
        RangeQuery {
            projected,
            predicate_attr,
            bound: BOUND,
            selectivity,
        }
    }

    /// Projects attributes `1..=n_projection`, predicate on attribute 1.
    pub fn leading(n_projection: u32, selectivity: f64) -> Self {
        Self::new(1..=n_projection, 1, selectivity)
    }

    pub fn n_projection(&self) -> u32 {
        self.projected.len() as u32
    }

    pub fn validate(&self, schema: &RelationSchema) -> Result<()> {
        if self.projected.is_empty() {
            return Err(Error::InvalidQuery("nothing projected".into()));
        }
        if let Some(&w) = self.projected.iter().find(|&&w| w < 1 || w > schema.k) {
            return Err(Error::InvalidQuery(format!(
                "attribute {w} outside [1, {}]",
                schema.k
            )));
        }
        if self.projected.binary_search(&self.predicate_attr).is_err() {
            return Err(Error::InvalidQuery(format!(
                "predicate attribute {} is not projected",
                self.predicate_attr
            )));
        }
        if !(0.0..=1.0).contains(&self.selectivity) {
            return Err(Error::InvalidQuery(format!(
                "selectivity {} outside [0, 1]",
                self.selectivity
            )));
        }
        Ok(())
    }

    fn others(&self) -> impl Iterator<Item = u32> + '_ {
        let pred = self.predicate_attr;
        self.projected.iter().copied().filter(move |&w| w != pred)
    }
}

fn check_qualifying(qualifying: &[u32], n: u32) -> Result<()> {
    if qualifying.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidQuery(
            "qualifying tuples must be strictly ascending".into(),
        ));
    }
    if qualifying.first().is_some_and(|&v| v < 1) || qualifying.last().is_some_and(|&v| v > n) {
        return Err(Error::InvalidQuery(format!(
            "qualifying tuple outside [1, {n}]"
        )));
    }
    Ok(())
}

/// Relational-Sequential-Yu.
#[derive(Debug, Clone)]
pub struct RsyLayout {
    schema: RelationSchema,
    params: DeviceParams,
    m: u32,
    spv: u32,
    groups: u32,
}

impl RsyLayout {
    pub fn new(schema: RelationSchema, params: &DeviceParams) -> Result<Self> {
        if schema.k > params.n_r() {
            return Err(Error::Capacity {
                needed: schema.k as u64,
                available: params.n_r() as u64,
                unit: "regions per tuple",
            });
        }
        let m = params.n_r() / schema.k;
        let spv = schema.sectors_per_value(params);
        let groups = schema.n.div_ceil(m);
        let rows = groups as u64 * spv as u64;
        if rows > params.n_s() as u64 {
            return Err(Error::Capacity {
                needed: rows,
                available: params.n_s() as u64,
                unit: "sector rows",
            });
        }
        Ok(RsyLayout {
            schema,
            params: *params,
            m,
            spv,
            groups,
        })
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    /// Tuples per sector group.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn rows_used(&self) -> u32 {
        self.groups * self.spv
    }

    pub fn map(&self, v: u32, w: u32) -> Result<RsAddr> {
        self.schema.check_value(v, w)?;
        let r = self.schema.k * ((v - 1) % self.m) + w;
        let s = (v.div_ceil(self.m) - 1) * self.spv + 1;
        Ok(RsAddr { r, s })
    }

    /// Direct physical placement of `a[v,w]` (first sector of the value),
    /// written without going through RS addresses.
    pub fn map_phys(&self, v: u32, w: u32) -> Result<PhysAddr> {
        self.schema.check_value(v, w)?;
        let p = &self.params;
        let (k, m) = (self.schema.k, self.m);
        let slot = k * ((v - 1) % m) + w;
        let group = (v.div_ceil(m) - 1) * self.spv + 1;
        let s_x = group.div_ceil(p.s_y);
        let s_y = if s_x % 2 == 1 {
            (group - 1) % p.s_y + 1
        } else {
            p.s_y - (group - 1) % p.s_y
        };
        Ok(PhysAddr {
            r_x: (slot - 1) % p.r_x + 1,
            r_y: slot.div_ceil(p.r_x),
            s_x,
            s_y,
        })
    }

    /// `ceil(m * N_projection / N_APT)`.
    pub fn scan_count(&self, n_projection: u32) -> u32 {
        (self.m * n_projection).div_ceil(self.params.n_apt)
    }

    /// Reads every projected attribute of every tuple.
    pub fn compile(&self, q: &RangeQuery) -> Result<AccessPlan> {
        q.validate(&self.schema)?;
        let k = self.schema.k;
        let tips_for = |tuples: u32| -> TipSet {
            let mut t = TipSet::new();
            for j in 0..tuples {
                for &w in &q.projected {
                    t.push(k * j + w);
                }
            }
            t
        };
        let full = tips_for(self.m);
        let tail = self.schema.n - (self.groups - 1) * self.m;
        let mut rows = vec![full; (self.groups - 1) as usize * self.spv as usize];
        let last = tips_for(tail);
        rows.extend(std::iter::repeat_n(last, self.spv as usize));
        let mut b = PlanBuilder::new(self.params.n_apt);
        b.sweep_rows(1, &rows, Gap::Step);
        Ok(b.finish())
    }

    pub fn k_values(&self, q: &RangeQuery) -> CostInput {
        let n_proj = q.n_projection();
        CostInput {
            retrieval_data_bits: self.schema.n as f64
                * n_proj as f64
                * self.schema.attr_bits as f64,
            k_parallel: (self.m * n_proj).min(self.params.n_apt) as f64,
            k_random: 1.0,
        }
    }
}

/// Relational-Parallel.
#[derive(Debug, Clone)]
pub struct RpLayout {
    schema: RelationSchema,
    params: DeviceParams,
    spv: u32,
    groups: u32,
}

impl RpLayout {
    pub fn new(schema: RelationSchema, params: &DeviceParams) -> Result<Self> {
        let spv = schema.sectors_per_value(params);
        let groups = schema.n.div_ceil(params.n_pt());
        let rows = schema.k as u64 * groups as u64 * spv as u64;
        if rows > params.n_s() as u64 {
            return Err(Error::Capacity {
                needed: rows,
                available: params.n_s() as u64,
                unit: "sector rows",
            });
        }
        Ok(RpLayout {
            schema,
            params: *params,
            spv,
            groups,
        })
    }

    pub fn schema(&self) -> &RelationSchema {
        &self.schema
    }

    /// Rows per attribute band.
    pub fn band_rows(&self) -> u32 {
        self.groups * self.spv
    }

    pub fn band_start(&self, w: u32) -> u32 {
        (w - 1) * self.band_rows() + 1
    }

    pub fn map(&self, v: u32, w: u32) -> Result<RsAddr> {
        self.schema.check_value(v, w)?;
        let n_pt = self.params.n_pt();
        Ok(RsAddr {
            r: (v - 1) % n_pt + 1,
            s: self.band_start(w) + (v.div_ceil(n_pt) - 1) * self.spv,
        })
    }

    /// Reads the predicate attribute of every tuple, then each other
    /// projected attribute of the `qualifying` tuples only. A band row
    /// without qualifying tuples is skipped, which ends the scan.
    pub fn compile(&self, q: &RangeQuery, qualifying: &[u32]) -> Result<AccessPlan> {
        q.validate(&self.schema)?;
        check_qualifying(qualifying, self.schema.n)?;
        let n_pt = self.params.n_pt();
        let n = self.schema.n;
        let spv = self.spv as usize;

        let mut all = Vec::with_capacity(self.band_rows() as usize);
        for g in 0..self.groups {
            let t = TipSet::range(1, (n - g * n_pt).min(n_pt));
            all.extend(std::iter::repeat_n(t, spv));
        }

        let mut selected = vec![TipSet::new(); self.groups as usize];
        for &v in qualifying {
            selected[((v - 1) / n_pt) as usize].push((v - 1) % n_pt + 1);
        }
        let selected: Vec<TipSet> = selected
            .into_iter()
            .flat_map(|t| std::iter::repeat_n(t, spv))
            .collect();

        let mut b = PlanBuilder::new(self.params.n_apt);
        b.sweep_rows(self.band_start(q.predicate_attr), &all, Gap::Seek);
        for w in q.others() {
            b.sweep_rows(self.band_start(w), &selected, Gap::Seek);
        }
        Ok(b.finish())
    }

    pub fn k_values(&self, q: &RangeQuery, n_qualifying: u32) -> CostInput {
        let attr = self.schema.attr_bits as f64;
        let others = q.n_projection().saturating_sub(1) as f64;
        CostInput {
            retrieval_data_bits: self.schema.n as f64 * attr + n_qualifying as f64 * others * attr,
            k_parallel: self.params.n_apt as f64,
            k_random: q.n_projection() as f64,
        }
    }
}

/// Bits a query logically returns: the predicate attribute of every tuple
/// plus the other projected attributes of the qualifying ones.
pub fn answer_bits(schema: &RelationSchema, q: &RangeQuery, n_qualifying: u32) -> f64 {
    let attr = schema.attr_bits as f64;
    schema.n as f64 * attr + n_qualifying as f64 * q.n_projection().saturating_sub(1) as f64 * attr
}
