//! Closed-form 1D interactions for the kernel `|x - y|^{-1-s}`.

use crate::energy::PerimeterModel;
use crate::error::{LabError, Result};
use crate::geometry::{Domain1D, Interval, IntervalSet, Partition1D, PhaseLabel};
use crate::sum::NeumaierSum;

/// Fractional order `s` in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s < 1.0 {
            Ok(FractionalOrder(s))
        } else {
            Err(LabError::invalid("s", format!("must lie in (0, 1), got {s}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `s (1 - s)`.
    #[inline]
    pub fn normalizer(self) -> f64 {
        self.0 * (1.0 - self.0)
    }
}

/// `(y + w)^p - y^p` for `y, w >= 0`, without cancellation for small `w / y`.
#[inline]
fn growth(y: f64, w: f64, p: f64) -> f64 {
    if y == 0.0 {
        w.powf(p)
    } else {
        y.powf(p) * (p * (w / y).ln_1p()).exp_m1()
    }
}

/// `L(I, J) = int_I int_J |x - y|^{-1-s} dy dx` for intervals with disjoint
/// interiors. Infinite endpoints are handled by their limit formulas.
pub fn l_interval(s: FractionalOrder, i: &Interval, j: &Interval) -> Result<f64> {
    if i.is_empty() || j.is_empty() {
        return Ok(0.0);
    }
    let (left, right) = if j.hi() <= i.lo() {
        (j, i)
    } else if i.hi() <= j.lo() {
        (i, j)
    } else {
        return Err(LabError::Overlap(i.to_string(), j.to_string()));
    };
    let p = 1.0 - s.get();
    let (a, b, c, d) = (left.lo(), left.hi(), right.lo(), right.hi());
    let gap = c - b;
    let scaled = match (a == f64::NEG_INFINITY, d == f64::INFINITY) {
        (true, true) => {
            return Err(LabError::Divergent(format!(
                "half-lines {left} and {right} face each other"
            )))
        }
        (true, false) => growth(gap, d - c, p),
        (false, true) => growth(gap, b - a, p),
        (false, false) => growth(gap, d - c, p) - growth(c - a, d - c, p),
    };
    Ok(scaled.max(0.0) / s.normalizer())
}

/// Bilinear extension of [`l_interval`] over components.
pub fn l_sets_1d(s: FractionalOrder, a: &IntervalSet, b: &IntervalSet) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    for i in a.intervals() {
        for j in b.intervals() {
            acc.add(l_interval(s, i, j)?);
        }
    }
    Ok(acc.value())
}

/// `Per^s_Omega(A, B) = L(A∩Ω, B∩Ω) + L(A∩Ω, B∖Ω) + L(A∖Ω, B∩Ω)`.
pub fn per_s_omega_1d(s: FractionalOrder, om: &Domain1D, a: &IntervalSet, b: &IntervalSet) -> Result<f64> {
    if !a.disjoint(b) {
        return Err(LabError::Overlap(a.to_string(), b.to_string()));
    }
    let o = om.as_set();
    let (a_in, a_out) = (a.intersect(&o), a.difference(&o));
    let (b_in, b_out) = (b.intersect(&o), b.difference(&o));
    let mut acc = NeumaierSum::new();
    acc.add(l_sets_1d(s, &a_in, &b_in)?);
    acc.add(l_sets_1d(s, &a_in, &b_out)?);
    acc.add(l_sets_1d(s, &a_out, &b_in)?);
    Ok(acc.value())
}

/// `Per^s_Omega(E) = Per^s_Omega(E, E^c)`.
pub fn per_s_1d(s: FractionalOrder, om: &Domain1D, e: &IntervalSet) -> Result<f64> {
    per_s_omega_1d(s, om, e, &e.complement())
}

fn in_domain(om: &Domain1D, x: f64, closure: bool) -> bool {
    if closure {
        om.contains_closed(x)
    } else {
        om.contains_open(x)
    }
}

/// Number of `(i | j)` interface points in `Omega` (or its closure).
pub fn classical_per_pair_1d(p: &Partition1D, om: &Domain1D, i: PhaseLabel, j: PhaseLabel, closure: bool) -> f64 {
    p.interfaces()
        .filter(|&(x, l, r)| ((l == i && r == j) || (l == j && r == i)) && in_domain(om, x, closure))
        .count() as f64
}

/// Number of boundary points of phase `i` in `Omega` (or its closure).
pub fn classical_per_1d(p: &Partition1D, om: &Domain1D, i: PhaseLabel, closure: bool) -> f64 {
    p.interfaces()
        .filter(|&(x, l, r)| (l == i || r == i) && in_domain(om, x, closure))
        .count() as f64
}

/// `½ ∬ |u(x) - u(y)|^2 |x-y|^{-1-s}` over `(ℝ×ℝ) ∖ (Ω^c×Ω^c)` with `u` the
/// label value, summed piece by piece over the partition refined by `∂Ω`.
pub fn phase_field_lhs_1d(s: FractionalOrder, p: &Partition1D, om: &Domain1D) -> Result<f64> {
    let mut cuts: Vec<f64> = p.breakpoints().to_vec();
    cuts.extend([om.a(), om.b()]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut pieces: Vec<(Interval, f64, bool)> = Vec::with_capacity(cuts.len() + 1);
    for k in 0..=cuts.len() {
        let lo = if k == 0 { f64::NEG_INFINITY } else { cuts[k - 1] };
        let hi = cuts.get(k).copied().unwrap_or(f64::INFINITY);
        let iv = Interval::new(lo, hi)?;
        let probe = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (false, _) => hi - 1.0,
            (_, false) => lo + 1.0,
        };
        let u = f64::from(p.label_left_of(probe).value());
        pieces.push((iv, u, om.contains_open(probe)));
    }
    let mut acc = NeumaierSum::new();
    for k in 0..pieces.len() {
        for l in k + 1..pieces.len() {
            let (ik, uk, ink) = pieces[k];
            let (il, ul, inl) = pieces[l];
            if (!ink && !inl) || uk == ul {
                continue;
            }
            acc.add((uk - ul).powi(2) * l_interval(s, &ik, &il)?);
        }
    }
    Ok(acc.value())
}

/// Exact 1D perimeter model on a fixed domain.
#[derive(Debug, Clone, Copy)]
pub struct LineModel {
    pub s: FractionalOrder,
    pub domain: Domain1D,
}

impl LineModel {
    pub fn new(s: FractionalOrder, domain: Domain1D) -> Self {
        LineModel { s, domain }
    }
}

impl PerimeterModel for LineModel {
    type Cluster = Partition1D;
    type Region = IntervalSet;

    fn per_pair(&self, c: &Partition1D, i: PhaseLabel, j: PhaseLabel) -> Result<f64> {
        per_s_omega_1d(self.s, &self.domain, &c.phase_set(i), &c.phase_set(j))
    }

    fn per_single(&self, c: &Partition1D, i: PhaseLabel) -> Result<f64> {
        per_s_1d(self.s, &self.domain, &c.phase_set(i))
    }

    fn classical_pair(&self, c: &Partition1D, i: PhaseLabel, j: PhaseLabel, closure: bool) -> f64 {
        classical_per_pair_1d(c, &self.domain, i, j, closure)
    }

    fn classical_single(&self, c: &Partition1D, i: PhaseLabel, closure: bool) -> f64 {
        classical_per_1d(c, &self.domain, i, closure)
    }

    fn phase_field_lhs(&self, c: &Partition1D) -> Result<f64> {
        phase_field_lhs_1d(self.s, c, &self.domain)
    }

    fn phase(&self, c: &Partition1D, i: PhaseLabel) -> IntervalSet {
        c.phase_set(i)
    }

    fn interaction(&self, a: &IntervalSet, b: &IntervalSet) -> Result<f64> {
        l_sets_1d(self.s, a, b)
    }

    fn intersect(&self, a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
        a.intersect(b)
    }

    fn difference(&self, a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
        a.difference(b)
    }

    fn is_empty(&self, a: &IntervalSet) -> bool {
        a.is_empty()
    }

    fn within_omega(&self, _c: &Partition1D, a: &IntervalSet) -> bool {
        a.subset_of(&self.domain.as_set())
    }

    fn relabel(&self, c: &Partition1D, a: &IntervalSet, label: PhaseLabel) -> Partition1D {
        c.relabel(a, label)
    }
}
