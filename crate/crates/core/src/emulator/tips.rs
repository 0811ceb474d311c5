use std::fmt;
use std::str::FromStr;

/// A set of probe-tip (linearized region) indices, stored as sorted,
/// disjoint, non-adjacent inclusive ranges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TipSet {
    ranges: Vec<(u32, u32)>,
    len: u32,
}

impl TipSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inclusive range `lo..=hi`; empty when `lo > hi`.
    pub fn range(lo: u32, hi: u32) -> Self {
        let mut s = Self::new();
        s.push_range(lo, hi);
        s
    }

    pub fn from_ranges(ranges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut v: Vec<(u32, u32)> = ranges.into_iter().filter(|(a, b)| a <= b).collect();
        v.sort_unstable();
        let mut s = Self::new();
        for (a, b) in v {
            s.push_range(a, b);
        }
        s
    }

    /// Appends `lo..=hi`. Ranges must arrive in ascending order; overlapping
    /// or touching ranges are coalesced.
    pub fn push_range(&mut self, lo: u32, hi: u32) {
        if lo > hi {
            return;
        }
        if let Some(last) = self.ranges.last_mut() {
            assert!(lo >= last.0, "tip ranges must be pushed in ascending order");
            if lo <= last.1.saturating_add(1) {
                if hi > last.1 {
                    self.len += hi - last.1;
                    last.1 = hi;
                }
                return;
            }
        }
        self.ranges.push((lo, hi));
        self.len += hi - lo + 1;
    }

    pub fn push(&mut self, tip: u32) {
        self.push_range(tip, tip);
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    pub fn min(&self) -> Option<u32> {
        self.ranges.first().map(|r| r.0)
    }

    pub fn max(&self) -> Option<u32> {
        self.ranges.last().map(|r| r.1)
    }

    pub fn contains(&self, tip: u32) -> bool {
        match self.ranges.binary_search_by(|&(a, _)| a.cmp(&tip)) {
            Ok(_) => true,
            Err(0) => false,
            Err(i) => self.ranges[i - 1].1 >= tip,
        }
    }

    pub fn is_subset(&self, other: &TipSet) -> bool {
        self.ranges.iter().all(|&(a, b)| {
            match other.ranges.binary_search_by(|&(oa, _)| oa.cmp(&a)) {
                Ok(i) => other.ranges[i].1 >= b,
                Err(0) => false,
                Err(i) => other.ranges[i - 1].1 >= b,
            }
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.ranges.iter().flat_map(|&(a, b)| a..=b)
    }

    /// Splits the set, in ascending tip order, into consecutive pieces of at
    /// most `max` tips each.
    pub fn chunks(&self, max: u32) -> Vec<TipSet> {
        assert!(max > 0);
        let mut out = Vec::new();
        let mut cur = TipSet::new();
        for &(a, b) in &self.ranges {
            let mut lo = a;
            while lo <= b {
                let room = max - cur.len;
                let hi = b.min(lo + room - 1);
                cur.push_range(lo, hi);
                if cur.len == max {
                    out.push(std::mem::take(&mut cur));
                }
                if hi == u32::MAX {
                    break;
                }
                lo = hi + 1;
            }
        }
        if !cur.is_empty() {
            out.push(cur);
        }
        out
    }
}

impl FromIterator<u32> for TipSet {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        let mut v: Vec<u32> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let mut s = TipSet::new();
        for t in v {
            s.push(t);
        }
        s
    }
}

/// Run-length form: `1-8,17,20-31`; the empty set is `-`.
impl fmt::Display for TipSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ranges.is_empty() {
            return f.write_str("-");
        }
        for (i, &(a, b)) in self.ranges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if a == b {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}-{b}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for TipSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(TipSet::new());
        }
        let mut ranges = Vec::new();
        for part in s.split(',') {
            let (a, b) = match part.split_once('-') {
                Some((a, b)) => (a, b),
                None => (part, part),
            };
            let a: u32 = a.trim().parse().map_err(|_| format!("bad tip `{part}`"))?;
            let b: u32 = b.trim().parse().map_err(|_| format!("bad tip `{part}`"))?;
            if a > b {
                return Err(format!("descending range `{part}`"));
            }
            ranges.push((a, b));
        }
        Ok(TipSet::from_ranges(ranges))
    }
}
