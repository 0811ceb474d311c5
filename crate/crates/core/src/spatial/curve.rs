use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Space-filling curve used to order blocks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curve {
    #[default]
    Hilbert,
    #[serde(rename = "zorder")]
    ZOrder,
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Curve::Hilbert => "hilbert",
            Curve::ZOrder => "zorder",
        })
    }
}

impl FromStr for Curve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hilbert" => Ok(Curve::Hilbert),
            "zorder" | "z-order" => Ok(Curve::ZOrder),
            _ => Err(Error::Config(format!("unknown curve `{s}`"))),
        }
    }
}

impl Curve {
    /// Zero-based cell visited at step `d` on a `side x side` grid, where
    /// `side` is a power of two.
    pub fn point(self, side: u32, d: u64) -> (u32, u32) {
        debug_assert!(side.is_power_of_two());
        match self {
            Curve::Hilbert => hilbert_d2xy(side, d),
            Curve::ZOrder => morton_decode(d),
        }
    }

    /// Cells of a `w x h` grid in curve order, walking the enclosing
    /// power-of-two square and skipping cells outside the grid.
    pub fn order(self, w: u32, h: u32) -> Vec<(u32, u32)> {
        let side = w.max(h).max(1).next_power_of_two();
        let mut out = Vec::with_capacity(w as usize * h as usize);
        for d in 0..side as u64 * side as u64 {
            let (x, y) = self.point(side, d);
            if x < w && y < h {
                out.push((x, y));
            }
        }
        out
    }
}

fn hilbert_d2xy(side: u32, d: u64) -> (u32, u32) {
    let (mut x, mut y) = (0u32, 0u32);
    let mut t = d;
    let mut s = 1u32;
    while s < side {
        let rx = (1 & (t / 2)) as u32;
        let ry = (1 & (t ^ rx as u64)) as u32;
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (x, y)
}

fn morton_decode(d: u64) -> (u32, u32) {
    let (mut x, mut y) = (0u32, 0u32);
    for bit in 0..32 {
        x |= (((d >> (2 * bit)) & 1) as u32) << bit;
        y |= (((d >> (2 * bit + 1)) & 1) as u32) << bit;
    }
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn hilbert_two_by_two() {
        assert_eq!(
            Curve::Hilbert.order(2, 2),
            vec![(0, 0), (0, 1), (1, 1), (1, 0)]
        );
    }

    #[test]
    fn zorder_two_by_two() {
        assert_eq!(
            Curve::ZOrder.order(2, 2),
            vec![(0, 0), (1, 0), (0, 1), (1, 1)]
        );
    }

    #[test]
    fn hilbert_steps_are_edge_adjacent() {
        for side in [1u32, 2, 4, 8, 16, 64, 128] {
            let cells = Curve::Hilbert.order(side, side);
            assert_eq!(cells.len(), (side * side) as usize);
            let unique: HashSet<_> = cells.iter().collect();
            assert_eq!(unique.len(), cells.len());
            for pair in cells.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                assert_eq!(a.0.abs_diff(b.0) + a.1.abs_diff(b.1), 1, "side {side}");
            }
        }
    }

    #[test]
    fn partial_grids_are_permutations() {
        for curve in [Curve::Hilbert, Curve::ZOrder] {
            for (w, h) in [(3, 5), (80, 80), (20, 320), (1, 7)] {
                let cells = curve.order(w, h);
                let unique: HashSet<_> = cells.iter().collect();
                assert_eq!(unique.len(), (w * h) as usize);
                assert!(cells.iter().all(|&(x, y)| x < w && y < h));
            }
        }
    }
}
