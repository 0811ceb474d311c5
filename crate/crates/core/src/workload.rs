//! Synthetic relations, spatial grids and query regions.
//!
//! Content is procedural: every attribute value or object payload is
//! derived from `(seed, position)` on demand, so large workloads cost
//! nothing until a test actually writes them to a media image.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DeviceParams;
use crate::relational::{RelationSchema, BOUND};
use crate::spatial::{QueryRegion, SpatialSpace};

pub const MB: u64 = 1 << 20;

/// Tuples in a relation of `mb` megabytes (2^20 bytes).
pub fn tuples_for_mb(mb: f64, k: u32, attr_bytes: u32) -> Result<u32> {
    let n = (mb * MB as f64 / (k as f64 * attr_bytes as f64)).round();
    if !(n >= 1.0) || n > u32::MAX as f64 {
        return Err(Error::InvalidQuery(format!("{mb} MB gives {n} tuples")));
    }
    Ok(n as u32)
}

/// `ceil(fraction * n)`, treating values within rounding noise of an
/// integer as that integer.
pub fn exact_ceil(fraction: f64, n: u64) -> u64 {
    let x = fraction * n as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Where qualifying tuples sit in the relation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// A uniformly random subset.
    #[default]
    Uniform,
    /// The first tuples.
    Clustered,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Clustered => "clustered",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "clustered" => Ok(Distribution::Clustered),
            _ => Err(Error::Config(format!("unknown distribution `{s}`"))),
        }
    }
}

/// One 64-bit word of the pseudo-random stream `(seed, stream)`.
fn word(seed: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(index as u128 * 2);
    rng.next_u64()
}

/// Fills `len` bytes from the stream `(seed, stream)` starting at word
/// `first`. Byte strings that come out all zero get their first byte set,
/// so written data never looks like blank media.
fn bytes(seed: u64, stream: u64, first: u64, len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(first as u128 * 2);
    let mut out = vec![0u8; len];
    rng.fill_bytes(&mut out);
    if out.iter().all(|&b| b == 0) {
        out[0] = 1;
    }
    out
}

/// A generated relation with a fixed qualifying set.
#[derive(Debug, Clone)]
pub struct Relation {
    pub schema: RelationSchema,
    pub seed: u64,
    pub predicate_attr: u32,
    /// Tuples with `attr[predicate_attr] > BOUND`, ascending.
    pub qualifying: Vec<u32>,
}

pub fn gen_relation(
    n: u32,
    k: u32,
    attr_bytes: u32,
    selectivity: f64,
    distribution: Distribution,
    seed: u64,
    params: &DeviceParams,
) -> Result<Relation> {
    if attr_bytes < 8 {
        return Err(Error::InvalidQuery(format!(
            "attributes need at least 8 bytes, got {attr_bytes}"
        )));
    }
    if !(0.0..=1.0).contains(&selectivity) {
        return Err(Error::InvalidQuery(format!(
            "selectivity {selectivity} outside [0, 1]"
        )));
    }
    let schema = RelationSchema::new(k, attr_bytes * 8, n)?;
    let needed = n as u64 * k as u64 * schema.sectors_per_value(params) as u64;
    if needed > params.capacity_sectors() {
        return Err(Error::Capacity {
            needed,
            available: params.capacity_sectors(),
            unit: "tip sectors",
        });
    }
    let count = exact_ceil(selectivity, n as u64) as usize;
    let qualifying = match distribution {
        Distribution::Clustered => (1..=count as u32).collect(),
        Distribution::Uniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<u32> = sample(&mut rng, n as usize, count)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            v.sort_unstable();
            v
        }
    };
    Ok(Relation {
        schema,
        seed,
        predicate_attr: 1,
        qualifying,
    })
}

impl Relation {
    pub fn qualifies(&self, v: u32) -> bool {
        self.qualifying.binary_search(&v).is_ok()
    }

    /// Leading 64-bit word of `a[v,w]`, the part predicates compare.
    pub fn value(&self, v: u32, w: u32) -> u64 {
        let h = word(self.seed, v as u64, w as u64 * 64);
        if w != self.predicate_attr {
            h
        } else if self.qualifies(v) {
            BOUND | h | 1
        } else {
            h & !BOUND
        }
    }

    /// Full stored bytes of `a[v,w]`: the value, little-endian, followed by
    /// filler words.
    pub fn value_bytes(&self, v: u32, w: u32) -> Vec<u8> {
        let len = self.schema.attr_bits as usize / 8;
        let mut out = bytes(self.seed, v as u64, w as u64 * 64 + 1, len);
        out[..8].copy_from_slice(&self.value(v, w).to_le_bytes());
        out
    }

    pub fn tuple_bytes(&self, v: u32) -> Vec<u8> {
        (1..=self.schema.k)
            .flat_map(|w| self.value_bytes(v, w))
            .collect()
    }
}

/// A `W x H` grid of objects, all of size `obj_bits`.
pub fn gen_spatial(
    count: u64,
    obj_bytes: u32,
    seed: u64,
    params: &DeviceParams,
) -> Result<(SpatialSpace, u64)> {
    let side = (count as f64).sqrt().round() as u64;
    if side * side != count || side == 0 || side > u32::MAX as u64 {
        return Err(Error::InvalidQuery(format!(
            "{count} objects do not form a square grid"
        )));
    }
    let space = SpatialSpace::new(side as u32, side as u32, obj_bytes * 8)?;
    let needed = count * space.sectors_per_object(params) as u64;
    if needed > params.capacity_sectors() {
        return Err(Error::Capacity {
            needed,
            available: params.capacity_sectors(),
            unit: "tip sectors",
        });
    }
    Ok((space, seed))
}

/// Payload of object `(x, y)` in a space generated with `seed`.
pub fn object_bytes(space: &SpatialSpace, seed: u64, x: u32, y: u32) -> Vec<u8> {
    let stream = (y as u64) << 32 | x as u64;
    bytes(seed, stream, 0, space.obj_bits as usize / 8)
}

/// A query of `size_fraction` of the space with width/height `aspect`,
/// at a uniformly random position.
pub fn gen_query_region(
    space: &SpatialSpace,
    size_fraction: f64,
    aspect: f64,
    rng: &mut impl Rng,
) -> Result<QueryRegion> {
    let (qx, qy) = query_shape(space, size_fraction, aspect)?;
    let x0 = rng.gen_range(1..=space.w - qx + 1);
    let y0 = rng.gen_range(1..=space.h - qy + 1);
    Ok(QueryRegion { x0, y0, qx, qy })
}

/// `qx = round(sqrt(area * aspect))`, `qy = round(area / qx)`.
pub fn query_shape(space: &SpatialSpace, size_fraction: f64, aspect: f64) -> Result<(u32, u32)> {
    if !(size_fraction > 0.0 && size_fraction <= 1.0) || !(aspect > 0.0) || !aspect.is_finite() {
        return Err(Error::InfeasibleShape(format!(
            "size {size_fraction}, aspect {aspect}"
        )));
    }
    let area = size_fraction * space.w as f64 * space.h as f64;
    let qx = (area * aspect).sqrt().round();
    let qy = (area / qx).round();
    if qx < 1.0 || qy < 1.0 || qx > space.w as f64 || qy > space.h as f64 {
        return Err(Error::InfeasibleShape(format!(
            "{qx} x {qy} does not fit a {} x {} space",
            space.w, space.h
        )));
    }
    Ok((qx as u32, qy as u32))
}

/// Seeded generator used for query origins and projection choices.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::cmu_defaults;

    #[test]
    fn relation_sizes() {
        assert_eq!(tuples_for_mb(320.0, 16, 8).unwrap(), 2_621_440);
        assert_eq!(tuples_for_mb(5.0, 16, 8).unwrap(), 40_960);
        assert_eq!(335_544_320 / (16 * 8), 2_621_440);
    }

    #[test]
    fn qualifying_counts_are_exact() {
        let p = cmu_defaults();
        for (sigma, n) in [
            (0.1, 40_960u32),
            (0.3, 1000),
            (0.0, 500),
            (1.0, 77),
            (0.001, 999),
        ] {
            let expect = (sigma * n as f64 - 1e-9).ceil().max(0.0) as usize;
            for d in [Distribution::Uniform, Distribution::Clustered] {
                let r = gen_relation(n, 16, 8, sigma, d, 7, &p).unwrap();
                assert_eq!(r.qualifying.len(), expect, "sigma {sigma} n {n}");
                let above = (1..=n).filter(|&v| r.value(v, 1) > BOUND).count();
                assert_eq!(above, expect);
            }
        }
    }

    #[test]
    fn deterministic_by_seed() {
        let p = cmu_defaults();
        let a = gen_relation(1000, 4, 16, 0.2, Distribution::Uniform, 3, &p).unwrap();
        let b = gen_relation(1000, 4, 16, 0.2, Distribution::Uniform, 3, &p).unwrap();
        let c = gen_relation(1000, 4, 16, 0.2, Distribution::Uniform, 4, &p).unwrap();
        assert_eq!(a.qualifying, b.qualifying);
        assert_ne!(a.qualifying, c.qualifying);
        assert_eq!(a.value_bytes(10, 2), b.value_bytes(10, 2));
        assert_eq!(a.value_bytes(10, 2).len(), 16);
        assert_ne!(a.value(10, 2), a.value(10, 3));
    }

    #[test]
    fn capacity_rejected() {
        let p = cmu_defaults();
        let too_big = (p.capacity_sectors() / 16 + 1) as u32;
        assert!(matches!(
            gen_relation(too_big, 16, 8, 0.1, Distribution::Uniform, 1, &p),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn spatial_defaults() {
        let p = cmu_defaults();
        let (s, _) = gen_spatial(40_960_000, 8, 1, &p).unwrap();
        assert_eq!((s.w, s.h), (6400, 6400));
        assert_eq!(40_960_000u64 * 8, 327_680_000);
        let (s, _) = gen_spatial(16, 8, 1, &p).unwrap();
        assert_eq!((s.w, s.h), (4, 4));
        assert!(gen_spatial(15, 8, 1, &p).is_err());
    }

    #[test]
    fn query_shapes() {
        let s = SpatialSpace::new(6400, 6400, 64).unwrap();
        assert_eq!(query_shape(&s, 0.0001, 1.0).unwrap(), (64, 64));
        assert_eq!(query_shape(&s, 0.01, 1.0).unwrap(), (640, 640));
        assert_eq!(query_shape(&s, 0.01, 16.0).unwrap(), (2560, 160));
        assert_eq!(query_shape(&s, 0.01, 1.0 / 16.0).unwrap(), (160, 2560));
        assert_eq!(query_shape(&s, 0.01, 8.0).unwrap().0, 1810);
        assert!(query_shape(&s, 0.5, 1000.0).is_err());
        let mut r = rng(1);
        for _ in 0..100 {
            let q = gen_query_region(&s, 0.01, 4.0, &mut r).unwrap();
            assert!(q.x0 + q.qx - 1 <= 6400 && q.y0 + q.qy - 1 <= 6400);
        }
    }
}
