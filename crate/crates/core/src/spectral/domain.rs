//! Index sets of a tail: a sorted union of disjoint half-open ranges, the last
//! of which may be unbounded.

use std::fmt;

/// Sentinel end of an unbounded range.
const OPEN: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexDomain {
    ranges: Vec<(u64, u64)>,
}

impl IndexDomain {
    pub fn empty() -> Self {
        Self { ranges: Vec::new() }
    }

    /// `{n : n ≥ start}`.
    pub fn from(start: u64) -> Self {
        Self {
            ranges: vec![(start, OPEN)],
        }
    }

    /// `{n : a ≤ n < b}`.
    pub fn range(a: u64, b: u64) -> Self {
        let mut d = Self::empty();
        d.push(a, b);
        d
    }

    /// Build from arbitrary half-open ranges (`b = None` for unbounded).
    pub fn from_ranges<I: IntoIterator<Item = (u64, Option<u64>)>>(it: I) -> Self {
        let mut raw: Vec<(u64, u64)> = it
            .into_iter()
            .map(|(a, b)| (a, b.unwrap_or(OPEN)))
            .filter(|(a, b)| a < b)
            .collect();
        raw.sort();
        let mut d = Self::empty();
        for (a, b) in raw {
            d.push(a, b);
        }
        d
    }

    fn push(&mut self, a: u64, b: u64) {
        if a >= b {
            return;
        }
        if let Some(last) = self.ranges.last_mut() {
            if a <= last.1 {
                last.1 = last.1.max(b);
                return;
            }
        }
        self.ranges.push((a, b));
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.unbounded_start().is_none()
    }

    /// Start of the unbounded part, if any.
    pub fn unbounded_start(&self) -> Option<u64> {
        self.ranges.last().filter(|r| r.1 == OPEN).map(|r| r.0)
    }

    /// Bounded ranges only (the unbounded part excluded).
    pub fn bounded_ranges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.ranges.iter().copied().filter(|r| r.1 != OPEN)
    }

    pub fn min(&self) -> Option<u64> {
        self.ranges.first().map(|r| r.0)
    }

    /// Number of indices (`None` when infinite).
    pub fn count(&self) -> Option<u64> {
        if self.is_finite() {
            Some(self.ranges.iter().map(|r| r.1 - r.0).sum())
        } else {
            None
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.ranges.iter().any(|&(a, b)| a <= n && n < b)
    }

    /// Indices of the bounded part, ascending.
    pub fn iter_bounded(&self) -> impl Iterator<Item = u64> + '_ {
        self.bounded_ranges().flat_map(|(a, b)| a..b)
    }

    pub fn intersect(&self, other: &IndexDomain) -> IndexDomain {
        let mut out = IndexDomain::empty();
        for &(a, b) in &self.ranges {
            for &(c, d) in &other.ranges {
                out.push(a.max(c), b.min(d));
            }
        }
        out.normalize()
    }

    pub fn minus(&self, other: &IndexDomain) -> IndexDomain {
        let mut out = IndexDomain::empty();
        for &(a, b) in &self.ranges {
            let mut pieces = vec![(a, b)];
            for &(c, d) in &other.ranges {
                let mut next = Vec::new();
                for (x, y) in pieces {
                    if d <= x || c >= y {
                        next.push((x, y));
                    } else {
                        if x < c {
                            next.push((x, c));
                        }
                        if d < y {
                            next.push((d, y));
                        }
                    }
                }
                pieces = next;
            }
            for (x, y) in pieces {
                out.ranges.push((x, y));
            }
        }
        out.normalize()
    }

    fn normalize(self) -> IndexDomain {
        IndexDomain::from_ranges(
            self.ranges
                .into_iter()
                .map(|(a, b)| (a, if b == OPEN { None } else { Some(b) })),
        )
    }

    /// Parse `a..b` (inclusive), `a` and `a..` items separated by commas.
    pub fn parse(s: &str) -> Result<IndexDomain, String> {
        let mut ranges = Vec::new();
        for item in s.split(',') {
            let item = item.trim();
            let bad = || format!("invalid index range `{item}`");
            if let Some((a, b)) = item.split_once("..") {
                let a: u64 = a.parse().map_err(|_| bad())?;
                if b.is_empty() {
                    ranges.push((a, None));
                } else {
                    let b: u64 = b.parse().map_err(|_| bad())?;
                    if b < a {
                        return Err(bad());
                    }
                    ranges.push((a, Some(b + 1)));
                }
            } else {
                let a: u64 = item.parse().map_err(|_| bad())?;
                ranges.push((a, Some(a + 1)));
            }
        }
        Ok(IndexDomain::from_ranges(ranges))
    }
}

impl fmt::Display for IndexDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(a, b)) in self.ranges.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            if b == OPEN {
                write!(f, "{a}..")?;
            } else if b == a + 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}..{}", b - 1)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        let d = IndexDomain::parse("1..2,4..40,50..").unwrap();
        assert_eq!(d.to_string(), "1..2,4..40,50..");
        assert!(d.contains(4) && !d.contains(3) && d.contains(10_000));
        assert_eq!(IndexDomain::parse("7").unwrap().count(), Some(1));
        assert!(IndexDomain::parse("5..3").is_err());
    }

    #[test]
    fn set_algebra() {
        let a = IndexDomain::from(2);
        let b = IndexDomain::parse("1..5,10..").unwrap();
        assert_eq!(a.intersect(&b).to_string(), "2..5,10..");
        assert_eq!(a.minus(&b).to_string(), "6..9");
        assert_eq!(b.minus(&a).to_string(), "1");
        assert!(a.minus(&a).is_empty());
    }

    #[test]
    fn adjacent_ranges_merge() {
        let d = IndexDomain::from_ranges([(1, Some(3)), (3, Some(5)), (5, None)]);
        assert_eq!(d, IndexDomain::from(1));
    }
}
