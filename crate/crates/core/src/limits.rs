//! Behaviour as s ↗ 1: ball measures, the 2D normalizing constant, scaled
//! s-sweeps, phase separation and the decay of the cross interaction.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::energy::{alphas_from_sigmas, f_one, f_s, PerimeterModel, SigmaWeights};
use crate::error::{LabError, Result};
use crate::geometry::{interface_neighborhood, CellSet, Domain1D, Frame2D, GridPartition2D, Partition1D, PhaseLabel};
use crate::kernel1d::{classical_per_1d, FractionalOrder, LineModel};
use crate::kernel2d::{GridModel, HIGH_ORDER_WARNING};
use crate::quad::integrate;

use PhaseLabel::{Minus, Plus, Zero};

/// Lebesgue measure of the unit ball in `R^k`.
pub fn omega_measure(k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / k as f64 * omega_measure(k - 2),
    }
}

/// Normalizing constant `ν(n, s)` with `ν(n, 1) = ω_{n−1}`. Zero for `n = 1`.
pub fn nu(n: u32, s: FractionalOrder) -> Result<f64> {
    match n {
        1 => Ok(0.0),
        2 => {
            let sv = s.get();
            // t = tan θ turns ∫₀^∞ (1+t²)^{−(2+s)/2} dt into ∫₀^{π/2} cos^s θ dθ.
            let integral = integrate(|th: f64| th.cos().powf(sv), 0.0, FRAC_PI_2, 1e-13, 1e-13)?;
            Ok(2.0 * (1.0 - 2f64.powf(-sv)) * omega_measure(1) * integral)
        }
        _ => Err(LabError::invalid("n", format!("only n = 1, 2 are supported, got {n}"))),
    }
}

/// Quantity tracked along an s-sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    /// `F^s`, compared against the classical `F¹`.
    Energy,
    /// `Per^s_Ω(E_i)`, compared against the classical perimeter of `E_i`.
    Perimeter(PhaseLabel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub s: f64,
    pub raw: f64,
    pub scaled_nu: f64,
    pub scaled_omega: f64,
    pub target_open: f64,
    pub target_closure: f64,
    /// Bound on `|scaled_nu − target_closure|`; 1D only.
    pub bound_1d: Option<f64>,
    pub warn_quadrature: bool,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "s,raw,scaled_nu,scaled_omega,target_open,target_closure,bound_1d,warn_quadrature";

    pub fn csv_row(&self) -> String {
        let bound = self.bound_1d.map(|b| b.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.s,
            self.raw,
            self.scaled_nu,
            self.scaled_omega,
            self.target_open,
            self.target_closure,
            bound,
            u8::from(self.warn_quadrature)
        )
    }
}

fn check_s_list(s_list: &[f64]) -> Result<Vec<FractionalOrder>> {
    if s_list.is_empty() {
        return Err(LabError::invalid("s_list", "must not be empty"));
    }
    if !s_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(LabError::invalid("s_list", "must be strictly increasing"));
    }
    s_list.iter().map(|&s| FractionalOrder::new(s)).collect()
}

fn raw_and_targets<M: PerimeterModel>(
    model: &M,
    sw: &SigmaWeights,
    c: &M::Cluster,
    target: SweepTarget,
) -> Result<(f64, f64, f64)> {
    Ok(match target {
        SweepTarget::Energy => (
            f_s(model, sw, c)?.total,
            f_one(model, sw, c, false).total,
            f_one(model, sw, c, true).total,
        ),
        SweepTarget::Perimeter(i) => (
            model.per_single(c, i)?,
            model.classical_single(c, i, false),
            model.classical_single(c, i, true),
        ),
    })
}

/// Half the smallest gap between points of `(∂E ∩ Ω) ∪ ∂Ω`.
fn boundary_spacing(p: &Partition1D, dom: &Domain1D, target: SweepTarget) -> f64 {
    let mut pts: Vec<f64> = p
        .interfaces()
        .filter(|&(x, l, r)| {
            dom.contains_open(x)
                && match target {
                    SweepTarget::Energy => true,
                    SweepTarget::Perimeter(i) => (l == i) != (r == i),
                }
        })
        .map(|(x, _, _)| x)
        .collect();
    pts.push(dom.a());
    pts.push(dom.b());
    pts.sort_by(f64::total_cmp);
    0.5 * pts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// `|(2 − 2^{1−s}) r^{1−s} − 1|`.
fn spacing_factor(s: f64, r: f64) -> f64 {
    ((2.0 - 2f64.powf(1.0 - s)) * r.powf(1.0 - s) - 1.0).abs()
}

/// 1D sweep. Scalings use `s(1−s)` and `(1−s)/ω₀`. The bound is
/// `|(2−2^{1−s}) r^{1−s} − 1|·Per_Ω(E) + (1−s)K` for a perimeter target and
/// `Σ_i |α_i|·|(2−2^{1−s}) r_i^{1−s} − 1|·Per_Ω(E_i) + (1−s)K` for the
/// energy, with `K` fitted at the first `s`.
pub fn s_sweep_1d(
    sw: &SigmaWeights,
    p: &Partition1D,
    dom: &Domain1D,
    s_list: &[f64],
    target: SweepTarget,
) -> Result<Vec<SweepRow>> {
    let orders = check_s_list(s_list)?;
    let phase_terms: Vec<(f64, f64, f64)> = match target {
        SweepTarget::Perimeter(i) => vec![(1.0, boundary_spacing(p, dom, target), classical_per_1d(p, dom, i, false))],
        SweepTarget::Energy => {
            let aw = alphas_from_sigmas(sw);
            PhaseLabel::ALL
                .iter()
                .map(|&i| {
                    let t = SweepTarget::Perimeter(i);
                    (aw.get(i).abs(), boundary_spacing(p, dom, t), classical_per_1d(p, dom, i, false))
                })
                .collect()
        }
    };
    let lead = |s: f64| -> f64 {
        phase_terms
            .iter()
            .map(|&(w, r, per)| w * spacing_factor(s, r) * per)
            .sum()
    };
    let mut rows = orders
        .par_iter()
        .map(|&s| {
            let model = LineModel::new(s, *dom);
            let (raw, target_open, target_closure) = raw_and_targets(&model, sw, p, target)?;
            let sv = s.get();
            Ok(SweepRow {
                s: sv,
                raw,
                scaled_nu: s.normalizer() * raw,
                scaled_omega: (1.0 - sv) / omega_measure(0) * raw,
                target_open,
                target_closure,
                bound_1d: None,
                warn_quadrature: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = &rows[0];
    let k = (((first.scaled_nu - first.target_closure).abs() - lead(first.s)) / (1.0 - first.s)).max(0.0);
    for row in &mut rows {
        row.bound_1d = Some(lead(row.s) + (1.0 - row.s) * k);
    }
    Ok(rows)
}

/// 2D sweep; one offset table per `s`. Rows with `s` above the high-order
/// threshold carry the quadrature warning.
pub fn s_sweep_2d(
    sw: &SigmaWeights,
    g: &GridPartition2D,
    s_list: &[f64],
    target: SweepTarget,
    far_cutoff: usize,
    near_depth: u32,
) -> Result<Vec<SweepRow>> {
    let orders = check_s_list(s_list)?;
    let mut rows = Vec::with_capacity(orders.len());
    for s in orders {
        let model = GridModel::build(s, g.frame(), far_cutoff, near_depth)?;
        let (raw, target_open, target_closure) = raw_and_targets(&model, sw, g, target)?;
        let sv = s.get();
        rows.push(SweepRow {
            s: sv,
            raw,
            scaled_nu: s.normalizer() / nu(2, s)? * raw,
            scaled_omega: (1.0 - sv) / omega_measure(1) * raw,
            target_open,
            target_closure,
            bound_1d: None,
            warn_quadrature: sv > HIGH_ORDER_WARNING,
        });
    }
    Ok(rows)
}

fn separation_violation(d: f64, eps: f64) -> bool {
    d < eps * (1.0 - 1e-12)
}

/// `(dist(E_1 ∩ Ω, E_{−1}), dist(E_{−1} ∩ Ω, E_1))`.
pub fn separation_1d(p: &Partition1D, dom: &Domain1D) -> (f64, f64) {
    let om = dom.as_set();
    let (em, e1) = (p.phase_set(Minus), p.phase_set(Plus));
    (e1.intersect(&om).distance(&em), em.intersect(&om).distance(&e1))
}

/// Moves to phase 0 every point of `Ω` within `eps` of a `(-1 | +1)` contact,
/// then whatever of `E_1 ∩ Ω` and `E_{−1} ∩ Ω` is still closer than `eps` to
/// the opposite phase.
pub fn separate_phases_1d(p: &Partition1D, dom: &Domain1D, eps: f64) -> Result<Partition1D> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::invalid("eps", format!("must be positive, got {eps}")));
    }
    let om = dom.as_set();
    let contacts: Vec<(f64, f64)> = p
        .direct_contacts()
        .into_iter()
        .filter(|&x| dom.contains_closed(x))
        .map(|x| (x - eps, x + eps))
        .collect();
    let band = crate::geometry::IntervalSet::from_pairs(&contacts)?.intersect(&om);
    let mut out = p.relabel(&band, Zero);
    for (mine, other) in [(Plus, Minus), (Minus, Plus)] {
        let near = out.phase_set(mine).intersect(&om).intersect(&out.phase_set(other).dilate(eps));
        out = out.relabel(&near, Zero);
    }
    let (d1, d2) = separation_1d(&out, dom);
    if separation_violation(d1, eps) || separation_violation(d2, eps) {
        return Err(LabError::Numeric(format!("separation {d1}, {d2} below eps = {eps}")));
    }
    Ok(out)
}

/// Cells of `from` whose center is closer than `eps` to a cell labeled `other`.
fn cells_near(g: &GridPartition2D, from: &CellSet, other: PhaseLabel, eps: f64) -> CellSet {
    let f = g.frame();
    let reach = (eps / f.h()).ceil() as isize;
    let lim = (eps / f.h()).powi(2);
    let hits: Vec<usize> = from
        .as_slice()
        .par_iter()
        .copied()
        .filter(|&p| {
            let (pi, pj) = f.coords(p);
            let (pi, pj) = (pi as isize, pj as isize);
            for dj in -reach..=reach {
                let j = pj + dj;
                if j < 0 || j >= f.ny() as isize {
                    continue;
                }
                for di in -reach..=reach {
                    let i = pi + di;
                    if i < 0 || i >= f.nx() as isize || ((di * di + dj * dj) as f64) >= lim {
                        continue;
                    }
                    if g.label(f.index(i as usize, j as usize)) == other {
                        return true;
                    }
                }
            }
            false
        })
        .collect();
    CellSet::new(hits)
}

/// True when no cell of `E_1 ∩ Ω` has its center closer than `eps` to a
/// `-1` cell, and symmetrically.
pub fn is_separated_2d(g: &GridPartition2D, eps: f64) -> bool {
    let om = g.omega_cells();
    [(Plus, Minus), (Minus, Plus)]
        .iter()
        .all(|&(mine, other)| cells_near(g, &g.phase_cells(mine).intersect(&om), other, eps).is_empty())
}

/// Grid version of [`separate_phases_1d`], with distances between cell centers.
pub fn separate_phases_2d(g: &GridPartition2D, eps: f64) -> Result<GridPartition2D> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::invalid("eps", format!("must be positive, got {eps}")));
    }
    let mut out = g.relabel(&interface_neighborhood(g, eps), Zero);
    let om = out.omega_cells();
    for (mine, other) in [(Plus, Minus), (Minus, Plus)] {
        let near = cells_near(&out, &out.phase_cells(mine).intersect(&om), other, eps);
        out = out.relabel(&near, Zero);
    }
    if !is_separated_2d(&out, eps) {
        return Err(LabError::Numeric(format!("phases closer than eps = {eps} after separation")));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow {
    pub s: f64,
    /// `(1−s)·Per^s_Ω(E_1, E_{−1})`.
    pub value: f64,
    /// `(1−s)·C/(s·eps^s)`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    /// `C = 2·n·ω_n·|Ω|`.
    pub c_const: f64,
    pub rows: Vec<DecayRow>,
}

impl DecayTable {
    pub const CSV_HEADER: &'static str = "s,value,bound,c_const";

    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| format!("{},{},{},{}", r.s, r.value, r.bound, self.c_const))
            .collect()
    }
}

fn decay_row(s: FractionalOrder, per: f64, c: f64, eps: f64) -> DecayRow {
    let sv = s.get();
    DecayRow {
        s: sv,
        value: (1.0 - sv) * per,
        bound: (1.0 - sv) * c / (sv * eps.powf(sv)),
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::invalid("eps", format!("must be positive, got {eps}")));
    }
    Ok(())
}

/// Cross interaction of a separated 1D cluster along `s_list`.
pub fn cross_interaction_decay_1d(p: &Partition1D, dom: &Domain1D, eps: f64, s_list: &[f64]) -> Result<DecayTable> {
    check_eps(eps)?;
    let orders = check_s_list(s_list)?;
    let c = 2.0 * omega_measure(1) * dom.length();
    let rows = orders
        .par_iter()
        .map(|&s| Ok(decay_row(s, LineModel::new(s, *dom).per_pair(p, Plus, Minus)?, c, eps)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayTable { c_const: c, rows })
}

/// Cross interaction of a separated grid cluster along `s_list`.
pub fn cross_interaction_decay_2d(
    g: &GridPartition2D,
    eps: f64,
    s_list: &[f64],
    far_cutoff: usize,
    near_depth: u32,
) -> Result<DecayTable> {
    check_eps(eps)?;
    let orders = check_s_list(s_list)?;
    let f: &Frame2D = g.frame();
    let c = 2.0 * 2.0 * omega_measure(2) * g.omega().cell_count() as f64 * f.h() * f.h();
    let mut rows = Vec::with_capacity(orders.len());
    for s in orders {
        let model = GridModel::build(s, f, far_cutoff, near_depth)?;
        rows.push(decay_row(s, model.per_pair(g, Plus, Minus)?, c, eps));
    }
    Ok(DecayTable { c_const: c, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::f_star;
    use crate::geometry::{CellRect, Frame2D};
    use statrs::function::beta::beta;

    fn s(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    fn half_lines() -> Partition1D {
        Partition1D::from_values(&[0.0], &[-1, 1]).unwrap()
    }

    fn om() -> Domain1D {
        Domain1D::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn ball_measures() {
        assert_eq!(omega_measure(0), 1.0);
        assert_eq!(omega_measure(1), 2.0);
        assert!((omega_measure(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((omega_measure(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn nu_values() {
        assert!((nu(2, s(0.999_999_999)).unwrap() - 2.0).abs() < 1e-6);
        let want = |sv: f64| 2.0 * (1.0 - 2f64.powf(-sv)) * 2.0 * 0.5 * beta(0.5, 0.5 * (sv + 1.0));
        for sv in [0.1, 0.3, 0.5, 0.7, 0.9] {
            assert!((nu(2, s(sv)).unwrap() - want(sv)).abs() < 1e-10);
        }
        assert!((nu(2, s(0.5)).unwrap() - 1.403_73).abs() < 1e-4);
        assert!((nu(2, s(0.999)).unwrap() - 2.0).abs() <= 0.01);
        assert_eq!(nu(1, s(0.5)).unwrap(), 0.0);
        assert!(nu(3, s(0.5)).is_err());
        let ratio = 0.99 * 2.0 / nu(2, s(0.99)).unwrap();
        assert!((ratio - 1.0).abs() <= 0.02);
    }

    #[test]
    fn half_line_sweep() {
        let sw = SigmaWeights::new(1.0, 4.0, 1.0).unwrap();
        let s_list = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99];
        let rows = s_sweep_1d(&sw, &Partition1D::from_values(&[0.0], &[0, 1]).unwrap(), &om(), &s_list, SweepTarget::Perimeter(Plus)).unwrap();
        for r in &rows {
            assert!((r.scaled_nu - 2f64.powf(1.0 - r.s)).abs() < 1e-13);
            assert_eq!(r.target_closure, 1.0);
            assert!((r.scaled_nu - r.target_closure).abs() <= r.bound_1d.unwrap() + 1e-12);
        }
        assert!((rows[4].scaled_nu - 1.071_773_462_536_293).abs() < 1e-12);
        let whole = s_sweep_1d(&sw, &Partition1D::uniform(Plus), &om(), &[0.5], SweepTarget::Energy).unwrap();
        assert_eq!((whole[0].raw, whole[0].target_open, whole[0].target_closure), (0.0, 0.0, 0.0));
        assert!(s_sweep_1d(&sw, &half_lines(), &om(), &[0.7, 0.5], SweepTarget::Energy).is_err());
    }

    #[test]
    fn separation_in_one_dimension() {
        let out = separate_phases_1d(&half_lines(), &om(), 0.1).unwrap();
        assert_eq!(out, Partition1D::from_values(&[-0.1, 0.1], &[-1, 0, 1]).unwrap());
        let layered = Partition1D::from_values(&[0.0, 0.5], &[-1, 0, 1]).unwrap();
        assert_eq!(separate_phases_1d(&layered, &om(), 0.1).unwrap(), layered);
        let thin = Partition1D::from_values(&[0.0, 0.05], &[-1, 0, 1]).unwrap();
        let out = separate_phases_1d(&thin, &om(), 0.1).unwrap();
        let (d1, d2) = separation_1d(&out, &om());
        assert!(d1 >= 0.1 * (1.0 - 1e-12) && d2 >= 0.1 * (1.0 - 1e-12));
        let edge = Partition1D::from_values(&[1.0], &[-1, 1]).unwrap();
        let out = separate_phases_1d(&edge, &om(), 0.1).unwrap();
        assert_eq!(out, Partition1D::from_values(&[0.9, 1.0], &[-1, 0, 1]).unwrap());
    }

    #[test]
    fn separation_on_grid() {
        let n = 24;
        let f = Frame2D::new((0.0, 0.0), 1.0 / n as f64, n, n).unwrap();
        let g = GridPartition2D::from_fn(f, CellRect::new(1, 1, n - 1, n - 1).unwrap(), |i, j| {
            if i + j < n {
                Minus
            } else {
                Plus
            }
        })
        .unwrap();
        assert!(!is_separated_2d(&g, 0.1));
        let out = separate_phases_2d(&g, 0.1).unwrap();
        assert!(is_separated_2d(&out, 0.1));
        for idx in 0..f.len() {
            if !g.in_omega(idx) {
                assert_eq!(out.label(idx), g.label(idx));
            }
        }
        let plain = GridPartition2D::from_fn(f, *g.omega(), |_, j| if j < 12 { Zero } else { Plus }).unwrap();
        assert_eq!(separate_phases_2d(&plain, 0.1).unwrap(), plain);
    }

    #[test]
    fn decay_rows_respect_bound() {
        let sep = separate_phases_1d(&half_lines(), &om(), 0.1).unwrap();
        let t = cross_interaction_decay_1d(&sep, &om(), 0.1, &[0.5, 0.7, 0.9, 0.99]).unwrap();
        assert_eq!(t.c_const, 8.0);
        for r in &t.rows {
            assert!(r.value <= r.bound);
        }
        assert!(t.rows[3].value < t.rows[0].value);
        assert!(t.rows[3].bound <= 0.01 * 8.0 / (0.99 * 0.1f64.powf(0.99)) * (1.0 + 1e-12));
    }

    #[test]
    fn recovery_energy_approaches_star_energy() {
        let sw = SigmaWeights::new(1.0, 4.0, 1.0).unwrap();
        let sep = separate_phases_1d(&half_lines(), &om(), 1e-3).unwrap();
        let sv = s(1.0 - 1e-6);
        let model = LineModel::new(sv, om());
        let scaled = (1.0 - sv.get()) * f_s(&model, &sw, &sep).unwrap().total;
        let star = f_star(&model, &sw, &half_lines(), true).total;
        assert_eq!(star, 2.0);
        assert!((scaled - star).abs() < 1e-3, "{scaled}");
    }
}
