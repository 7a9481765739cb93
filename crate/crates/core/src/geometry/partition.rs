use serde::{Deserialize, Serialize};

use super::interval::{Interval, IntervalSet};
use super::label::PhaseLabel;
use crate::error::{LabError, Result};

/// Bounded open interval `(a, b)` used as the reference domain in 1D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain1D {
    a: f64,
    b: f64,
}

impl Domain1D {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(LabError::invalid("domain", "endpoints must be finite"));
        }
        if a >= b {
            return Err(LabError::invalid("domain", format!("need a < b, got ({a}, {b})")));
        }
        Ok(Domain1D { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn as_interval(&self) -> Interval {
        Interval::new(self.a, self.b).expect("validated")
    }

    pub fn as_set(&self) -> IntervalSet {
        IntervalSet::from_interval(self.as_interval())
    }

    pub fn contains_open(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn dist_to_boundary(&self, x: f64) -> f64 {
        (x - self.a).abs().min((self.b - x).abs())
    }
}

/// Three-phase partition of the real line by breakpoints `x_1 < ... < x_m`
/// and labels `l_0, ..., l_m`, where `l_k` applies on `(x_k, x_{k+1})`
/// with `x_0 = -inf`, `x_{m+1} = +inf`.
///
/// Stored in normalized form: adjacent labels always differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPartition", into = "RawPartition")]
pub struct Partition1D {
    breakpoints: Vec<f64>,
    labels: Vec<PhaseLabel>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPartition {
    breakpoints: Vec<f64>,
    labels: Vec<PhaseLabel>,
}

impl TryFrom<RawPartition> for Partition1D {
    type Error = LabError;
    fn try_from(r: RawPartition) -> Result<Self> {
        Partition1D::new(r.breakpoints, r.labels)
    }
}

impl From<Partition1D> for RawPartition {
    fn from(p: Partition1D) -> Self {
        RawPartition {
            breakpoints: p.breakpoints,
            labels: p.labels,
        }
    }
}

impl Partition1D {
    /// Validates and normalizes (drops breakpoints between equal labels).
    pub fn new(breakpoints: Vec<f64>, labels: Vec<PhaseLabel>) -> Result<Self> {
        if labels.len() != breakpoints.len() + 1 {
            return Err(LabError::invalid(
                "partition.labels",
                format!(
                    "expected {} labels for {} breakpoints, got {}",
                    breakpoints.len() + 1,
                    breakpoints.len(),
                    labels.len()
                ),
            ));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(LabError::invalid("partition.breakpoints", "must be finite"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LabError::invalid("partition.breakpoints", "must be strictly increasing"));
        }
        let mut bp = Vec::with_capacity(breakpoints.len());
        let mut lb = vec![labels[0]];
        for (k, &x) in breakpoints.iter().enumerate() {
            if labels[k + 1] != *lb.last().expect("nonempty") {
                bp.push(x);
                lb.push(labels[k + 1]);
            }
        }
        Ok(Partition1D {
            breakpoints: bp,
            labels: lb,
        })
    }

    /// Single phase filling the line.
    pub fn uniform(label: PhaseLabel) -> Self {
        Partition1D {
            breakpoints: Vec::new(),
            labels: vec![label],
        }
    }

    /// Parses labels given as integers in {-1, 0, 1}.
    pub fn from_values(breakpoints: &[f64], labels: &[i8]) -> Result<Self> {
        let labels = labels
            .iter()
            .map(|&v| PhaseLabel::from_value(v))
            .collect::<Result<Vec<_>>>()?;
        Partition1D::new(breakpoints.to_vec(), labels)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn labels(&self) -> &[PhaseLabel] {
        &self.labels
    }

    /// Open interval carrying `labels[k]`.
    pub fn piece(&self, k: usize) -> Interval {
        let lo = if k == 0 { f64::NEG_INFINITY } else { self.breakpoints[k - 1] };
        let hi = self.breakpoints.get(k).copied().unwrap_or(f64::INFINITY);
        Interval::new(lo, hi).expect("breakpoints increasing")
    }

    /// Union of the open pieces labelled `label`.
    pub fn phase_set(&self, label: PhaseLabel) -> IntervalSet {
        IntervalSet::new(
            (0..self.labels.len())
                .filter(|&k| self.labels[k] == label)
                .map(|k| self.piece(k)),
        )
    }

    /// Label just left of `x`.
    pub fn label_left_of(&self, x: f64) -> PhaseLabel {
        self.labels[self.breakpoints.partition_point(|&b| b < x)]
    }

    /// Label just right of `x`.
    pub fn label_right_of(&self, x: f64) -> PhaseLabel {
        self.labels[self.breakpoints.partition_point(|&b| b <= x)]
    }

    /// `(x, left label, right label)` for every breakpoint.
    pub fn interfaces(&self) -> impl Iterator<Item = (f64, PhaseLabel, PhaseLabel)> + '_ {
        self.breakpoints
            .iter()
            .enumerate()
            .map(move |(k, &x)| (x, self.labels[k], self.labels[k + 1]))
    }

    /// Breakpoints separating the phases `-1` and `+1`.
    pub fn direct_contacts(&self) -> Vec<f64> {
        self.interfaces()
            .filter(|&(_, l, r)| PhaseLabel::is_direct_pair(l, r))
            .map(|(x, _, _)| x)
            .collect()
    }

    /// Assigns `label` on `set`, keeping the old labels elsewhere.
    pub fn relabel(&self, set: &IntervalSet, label: PhaseLabel) -> Partition1D {
        let mut cuts: Vec<f64> = self.breakpoints.clone();
        for iv in set.intervals() {
            for x in [iv.lo(), iv.hi()] {
                if x.is_finite() {
                    cuts.push(x);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let sample = |k: usize| -> f64 {
            match (k.checked_sub(1).map(|j| cuts[j]), cuts.get(k)) {
                (None, None) => 0.0,
                (None, Some(&hi)) => hi - 1.0,
                (Some(lo), None) => lo + 1.0,
                (Some(lo), Some(&hi)) => 0.5 * (lo + hi),
            }
        };
        let labels: Vec<PhaseLabel> = (0..=cuts.len())
            .map(|k| {
                let x = sample(k);
                if set.contains(x) {
                    label
                } else {
                    self.label_left_of(x)
                }
            })
            .collect();
        Partition1D::new(cuts, labels).expect("cuts sorted and deduplicated")
    }
}

/// The strip `A^eps` next to a `(-1 | +1)` interface at `x0`, carved out of
/// the `+1` side: `(x0, x0 + eps)` when `+1` lies to the right, otherwise
/// `(x0 - eps, x0)`.
pub fn strip_region_1d(p: &Partition1D, x0: f64, eps: f64) -> Result<Interval> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::invalid("eps", format!("must be positive, got {eps}")));
    }
    let Some(k) = p.breakpoints().iter().position(|&x| x == x0) else {
        return Err(LabError::invalid("x0", format!("{x0} is not a breakpoint")));
    };
    match (p.labels()[k], p.labels()[k + 1]) {
        (PhaseLabel::Minus, PhaseLabel::Plus) => Interval::new(x0, x0 + eps),
        (PhaseLabel::Plus, PhaseLabel::Minus) => Interval::new(x0 - eps, x0),
        (l, r) => Err(LabError::invalid(
            "x0",
            format!("breakpoint {x0} separates {l} and {r}, not -1 and +1"),
        )),
    }
}
