//! Shared generators and identity checks for the integration tests.
#![allow(dead_code)]

use ncl::energy::{
    alphas_from_sigmas, f_one, f_s, f_s_alpha, f_s_star_form, f_star, phase_field_identity_check, PerimeterModel,
    SigmaWeights,
};
use ncl::geometry::{CellRect, CellSet, Domain1D, Frame2D, GridPartition2D, IntervalSet, Partition1D, PhaseLabel};
use ncl::kernel1d::{l_sets_1d, per_s_omega_1d, FractionalOrder};
use ncl::kernel2d::{l_grid, relative_interaction, GridModel};
use rand::Rng;

use PhaseLabel::{Minus, Plus, Zero};

/// `|a − b| ≤ tol·scale`, with `scale` at least `max(|a|, |b|)`.
pub fn close(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    let scale = scale.max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale || a == b
}

pub fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn label_of(v: u8) -> PhaseLabel {
    PhaseLabel::ALL[v as usize % 3]
}

pub fn random_sigma(rng: &mut impl Rng) -> SigmaWeights {
    SigmaWeights::new(rng.gen_range(0.2..3.0), rng.gen_range(0.2..6.0), rng.gen_range(0.2..3.0)).unwrap()
}

/// Partition with up to six breakpoints in `(−2.5, 2.5)` and a domain
/// inside `(−2, 2)`.
pub fn random_line(rng: &mut impl Rng) -> (Partition1D, Domain1D) {
    let k = rng.gen_range(0..=6);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.5..2.5)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let labels: Vec<PhaseLabel> = (0..=xs.len()).map(|_| label_of(rng.gen_range(0..3))).collect();
    let a = rng.gen_range(-2.0..-0.1);
    let b = rng.gen_range(0.1..2.0);
    (Partition1D::new(xs, labels).unwrap(), Domain1D::new(a, b).unwrap())
}

/// `n × n` unit-spaced-by-`1/n` frame, omega one cell in from the edge,
/// cell labels drawn independently.
pub fn random_grid(rng: &mut impl Rng, n: usize) -> GridPartition2D {
    let f = Frame2D::new((0.0, 0.0), 1.0 / n as f64, n, n).unwrap();
    let labels: Vec<PhaseLabel> = (0..n * n).map(|_| label_of(rng.gen_range(0..3))).collect();
    GridPartition2D::new(f, labels, CellRect::new(1, 1, n - 1, n - 1).unwrap()).unwrap()
}

/// `n × n` frame whose labels are constant on blocks of `block × block` cells.
pub fn blocky_grid(rng: &mut impl Rng, n: usize, block: usize) -> GridPartition2D {
    let f = Frame2D::new((0.0, 0.0), 1.0 / n as f64, n, n).unwrap();
    let nb = n.div_ceil(block);
    let blocks: Vec<u8> = (0..nb * nb).map(|_| rng.gen_range(0..3)).collect();
    GridPartition2D::from_fn(f, CellRect::new(1, 1, n - 1, n - 1).unwrap(), |i, j| {
        label_of(blocks[(j / block) * nb + i / block])
    })
    .unwrap()
}

/// Both pair-splitting identities for every ordering of the three phases.
fn pair_splitting<M: PerimeterModel>(model: &M, c: &M::Cluster, tol: f64) -> Result<(), String> {
    for (i, j, k) in [(Minus, Zero, Plus), (Zero, Plus, Minus), (Plus, Minus, Zero)] {
        let (pi, pj, pk) = (
            model.per_single(c, i).unwrap(),
            model.per_single(c, j).unwrap(),
            model.per_single(c, k).unwrap(),
        );
        let (pij, pik) = (model.per_pair(c, i, j).unwrap(), model.per_pair(c, i, k).unwrap());
        let scale = pi.max(pj).max(pk);
        ensure(close(pi, pij + pik, tol, scale), || format!("Per({i}) = {pi} vs {pij} + {pik}"))?;
        ensure(close(pij, 0.5 * (pi + pj - pk), tol, scale), || {
            format!("Per({i},{j}) = {pij} vs ({pi} + {pj} - {pk})/2")
        })?;
    }
    Ok(())
}

/// Energy-level identities shared by both dimensions.
fn energy_identities<M: PerimeterModel>(model: &M, sw: &SigmaWeights, c: &M::Cluster, tol: f64) -> Result<(), String> {
    let fs = f_s(model, sw, c).unwrap();
    let fa = f_s_alpha(model, &alphas_from_sigmas(sw), c).unwrap();
    let scale = fs.terms().iter().zip(&fs.weights).map(|(t, w)| t * w).sum::<f64>()
        + fa.terms().iter().zip(&fa.weights).map(|(t, w)| (t * w).abs()).sum::<f64>();
    ensure(close(fs.total, fa.total, tol, scale), || format!("sigma form {} vs alpha form {}", fs.total, fa.total))?;
    let star_form = f_s_star_form(model, sw, c).unwrap();
    ensure(close(fs.total, star_form, tol, scale), || format!("F^s {} vs star form {star_form}", fs.total))?;
    let a0 = alphas_from_sigmas(sw).a_0;
    for closure in [false, true] {
        let one = f_one(model, sw, c, closure).total;
        let star = f_star(model, sw, c, closure).total;
        let direct = model.classical_pair(c, Plus, Minus, closure);
        ensure(close(one, star - 2.0 * a0 * direct, 1e-12, one.max(star)), || {
            format!("F1 {one} vs F* {star} - 2 a0 {direct}")
        })?;
    }
    let (lhs, rhs) = phase_field_identity_check(model, c).unwrap();
    ensure(close(lhs, rhs, tol, rhs), || format!("phase-field lhs {lhs} vs rhs {rhs}"))?;
    Ok(())
}

/// `Per_Ω(A,B) − Per_Ω′(A,B) = L(A∩(Ω∖Ω′), B∖Ω′) + L(A∖Ω, B∩(Ω∖Ω′))`.
fn domain_decomposition_1d(s: FractionalOrder, p: &Partition1D, dom: &Domain1D, tol: f64) -> Result<(), String> {
    let inner = Domain1D::new(dom.a() + 0.25 * dom.length(), dom.b() - 0.125 * dom.length()).unwrap();
    let (om, om2) = (dom.as_set(), inner.as_set());
    let ring = om.difference(&om2);
    for (i, j) in [(Minus, Zero), (Zero, Plus), (Plus, Minus), (Minus, Plus)] {
        let (a, b) = (p.phase_set(i), p.phase_set(j));
        let lhs = per_s_omega_1d(s, dom, &a, &b).unwrap() - per_s_omega_1d(s, &inner, &a, &b).unwrap();
        let rhs = l_sets_1d(s, &a.intersect(&ring), &b.difference(&om2)).unwrap()
            + l_sets_1d(s, &a.difference(&om), &b.intersect(&ring)).unwrap();
        let scale = per_s_omega_1d(s, dom, &a, &b).unwrap();
        ensure(close(lhs, rhs, tol, scale), || format!("domain decomposition ({i},{j}): {lhs} vs {rhs}"))?;
    }
    Ok(())
}

fn domain_decomposition_2d(model: &GridModel, g: &GridPartition2D, tol: f64) -> Result<(), String> {
    let f = g.frame();
    let om = g.omega();
    let inner = CellRect::new(om.i0 + 2, om.j0 + 1, om.i1 - 1, om.j1 - 3).unwrap();
    let in_rect = |r: &CellRect| CellSet::new((0..f.len()).filter(|&q| {
        let (i, j) = f.coords(q);
        r.contains(i, j)
    }));
    let (om_cells, inner_cells) = (in_rect(om), in_rect(&inner));
    let ring = om_cells.difference(&inner_cells);
    let k = model.kernel();
    for (i, j) in [(Minus, Zero), (Zero, Plus), (Plus, Minus)] {
        let (a, b) = (g.phase_cells(i), g.phase_cells(j));
        let outer_val = relative_interaction(k, f, om, &a, &b).unwrap();
        let lhs = outer_val - relative_interaction(k, f, &inner, &a, &b).unwrap();
        let rhs = l_grid(k, &a.intersect(&ring), &b.difference(&inner_cells)).unwrap()
            + l_grid(k, &a.difference(&om_cells), &b.intersect(&ring)).unwrap();
        ensure(close(lhs, rhs, tol, outer_val), || format!("grid domain decomposition ({i},{j}): {lhs} vs {rhs}"))?;
    }
    Ok(())
}

/// The identity suite on one 1D configuration.
pub fn identity_suite_1d(s: FractionalOrder, sw: &SigmaWeights, p: &Partition1D, dom: &Domain1D, tol: f64) -> Result<(), String> {
    let model = ncl::kernel1d::LineModel::new(s, *dom);
    pair_splitting(&model, p, tol)?;
    domain_decomposition_1d(s, p, dom, tol)?;
    energy_identities(&model, sw, p, tol)
}

/// The identity suite on one grid.
pub fn identity_suite_2d(model: &GridModel, sw: &SigmaWeights, g: &GridPartition2D, tol: f64) -> Result<(), String> {
    pair_splitting(model, g, tol)?;
    domain_decomposition_2d(model, g, tol)?;
    energy_identities(model, sw, g, tol)
}

/// A random subset of the omega part of phase `label` in 1D: up to three
/// subintervals of its components.
pub fn random_subregion_1d(rng: &mut impl Rng, p: &Partition1D, dom: &Domain1D, labels: &[PhaseLabel]) -> IntervalSet {
    let mut pairs = Vec::new();
    for &l in labels {
        for iv in p.phase_set(l).intersect(&dom.as_set()).intervals() {
            if rng.gen_bool(0.7) {
                let u: f64 = rng.gen_range(0.0..1.0);
                let v = rng.gen_range(0.0..1.0);
                let (lo, hi) = (u.min(v), u.max(v));
                let len = iv.length();
                if hi - lo > 1e-3 {
                    pairs.push((iv.lo() + lo * len, iv.lo() + hi * len));
                }
            }
        }
    }
    IntervalSet::from_pairs(&pairs).unwrap()
}
