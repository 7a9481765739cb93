use std::fmt;

use crate::error::{LabError, Result};

/// Open interval `(lo, hi)` of the extended real line.
///
/// `lo = -inf` and `hi = +inf` are allowed. The interval is empty iff `lo == hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(LabError::invalid("interval", "endpoint is NaN"));
        }
        if lo > hi {
            return Err(LabError::invalid("interval", format!("lo {lo} exceeds hi {hi}")));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(LabError::invalid("interval", "endpoints must satisfy lo < +inf, hi > -inf"));
        }
        Ok(Interval { lo, hi })
    }

    pub fn full() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// True when the interiors are disjoint.
    pub fn disjoint(&self, other: &Interval) -> bool {
        self.is_empty() || other.is_empty() || self.hi <= other.lo || other.hi <= self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Finite union of open intervals in normalized form: sorted, nonempty,
/// separated by gaps of positive length. Touching intervals are merged,
/// so sets are identified up to finitely many points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn full() -> Self {
        IntervalSet {
            intervals: vec![Interval::full()],
        }
    }

    pub fn from_interval(iv: Interval) -> Self {
        IntervalSet::new([iv])
    }

    /// Builds a set from `(lo, hi)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let ivs = pairs
            .iter()
            .map(|&(a, b)| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalSet::new(ivs))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure (may be infinite).
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
    }

    /// Complement up to endpoints.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = f64::NEG_INFINITY;
        for iv in &self.intervals {
            if cursor < iv.lo {
                out.push(Interval { lo: cursor, hi: iv.lo });
            }
            cursor = iv.hi;
        }
        if cursor < f64::INFINITY {
            out.push(Interval {
                lo: cursor,
                hi: f64::INFINITY,
            });
        }
        IntervalSet { intervals: out }
    }

    pub fn intersect(&self, other: &IntervalSet) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let a = self.intervals[i];
            let b = other.intervals[j];
            if let Some(c) = a.intersect(&b) {
                out.push(c);
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::new(out)
    }

    pub fn union(&self, other: &IntervalSet) -> Self {
        IntervalSet::new(self.intervals.iter().chain(other.intervals.iter()).copied())
    }

    pub fn difference(&self, other: &IntervalSet) -> Self {
        self.intersect(&other.complement())
    }

    /// Open `eps`-neighborhood `{x : dist(x, self) < eps}`.
    pub fn dilate(&self, eps: f64) -> Self {
        IntervalSet::new(self.intervals.iter().map(|iv| Interval {
            lo: iv.lo - eps,
            hi: iv.hi + eps,
        }))
    }

    /// True when every pair of components has disjoint interiors.
    pub fn disjoint(&self, other: &IntervalSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// True when `self` is contained in `other` up to finitely many points.
    pub fn subset_of(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Infimum of `|x - y|` over `x` in `self`, `y` in `other`; `+inf` if either is empty.
    pub fn distance(&self, other: &IntervalSet) -> f64 {
        let mut best = f64::INFINITY;
        for a in &self.intervals {
            for b in &other.intervals {
                let d = if a.hi <= b.lo {
                    b.lo - a.hi
                } else if b.hi <= a.lo {
                    a.lo - b.hi
                } else {
                    0.0
                };
                best = best.min(d);
            }
        }
        best
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|iv| iv.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}
