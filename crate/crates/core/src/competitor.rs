//! ε-strip competitors, the two gap formulas, the 1D ε₀ estimate and the
//! log-log fit of the gap exponent.

use rayon::prelude::*;

use crate::energy::{alphas_from_sigmas, f_s, PerimeterModel, SigmaWeights};
use crate::error::{LabError, Result};
use crate::geometry::{
    strip_region_1d, strip_region_2d, Domain1D, GridPartition2D, IntervalSet, LipschitzGraph, Partition1D,
    PhaseLabel,
};
use crate::kernel1d::{FractionalOrder, LineModel};
use crate::kernel2d::GridModel;
use crate::sum::compensated;

use PhaseLabel::{Minus, Plus, Zero};

/// Which phases a strip may be carved from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripVariant {
    /// Strip inside `E_1 ∩ Ω`.
    OneSided,
    /// Strip inside `(E_1 ∪ E_{-1}) ∩ Ω`.
    TwoSided,
}

/// Relabels `strip` to phase 0 after checking it lies where `variant` allows.
pub fn build_strip_competitor<M: PerimeterModel>(
    model: &M,
    c: &M::Cluster,
    strip: &M::Region,
    variant: StripVariant,
) -> Result<M::Cluster> {
    if !model.within_omega(c, strip) {
        return Err(LabError::invalid("strip", "leaves omega"));
    }
    let outside = match variant {
        StripVariant::OneSided => model.difference(strip, &model.phase(c, Plus)),
        StripVariant::TwoSided => {
            let rest = model.difference(strip, &model.phase(c, Plus));
            model.difference(&rest, &model.phase(c, Minus))
        }
    };
    if !model.is_empty(&outside) {
        let allowed = match variant {
            StripVariant::OneSided => "phase +1",
            StripVariant::TwoSided => "phases -1 and +1",
        };
        return Err(LabError::invalid("strip", format!("not inside {allowed}")));
    }
    Ok(model.relabel(c, strip, Zero))
}

/// `F^s(E) − F^s(E^ε)` for a strip `A ⊂ E_1 ∩ Ω` moved to phase 0:
/// `−2α₀ L(A, E_{-1}) + σ_{0,1}[L(A, E_1^c) − L(A, E_1 ∖ A)]`.
pub fn gap_formula_one_sided<M: PerimeterModel>(
    model: &M,
    sw: &SigmaWeights,
    c: &M::Cluster,
    a: &M::Region,
) -> Result<f64> {
    let a0 = alphas_from_sigmas(sw).a_0;
    let (em, e0, e1) = (model.phase(c, Minus), model.phase(c, Zero), model.phase(c, Plus));
    let to_minus = model.interaction(a, &em)?;
    let to_zero = model.interaction(a, &e0)?;
    let to_rest = model.interaction(a, &model.difference(&e1, a))?;
    Ok(compensated([
        -2.0 * a0 * to_minus,
        sw.s_01 * to_zero,
        sw.s_01 * to_minus,
        -sw.s_01 * to_rest,
    ]))
}

/// `F^s(E) − F^s(Ẽ)` for `A ⊂ (E_1 ∪ E_{-1}) ∩ Ω` moved to phase 0.
pub fn gap_formula_two_sided<M: PerimeterModel>(
    model: &M,
    sw: &SigmaWeights,
    c: &M::Cluster,
    a: &M::Region,
) -> Result<f64> {
    let a0 = alphas_from_sigmas(sw).a_0;
    let (em, e0, e1) = (model.phase(c, Minus), model.phase(c, Zero), model.phase(c, Plus));
    let am = model.intersect(&em, a);
    let ap = model.intersect(&e1, a);
    let em_rest = model.difference(&em, a);
    let e1_rest = model.difference(&e1, a);
    let l = |x: &M::Region, y: &M::Region| model.interaction(x, y);
    Ok(compensated([
        // σ_{-1,0}[L(A_-, E_{-1}^c) − L(A_-, E_{-1} ∖ A)]
        sw.s_m10 * l(&am, &e0)?,
        sw.s_m10 * l(&am, &e1)?,
        -sw.s_m10 * l(&am, &em_rest)?,
        // σ_{0,1}[L(A_+, E_1^c) − L(A_+, E_1 ∖ A)]
        sw.s_01 * l(&ap, &e0)?,
        sw.s_01 * l(&ap, &em)?,
        -sw.s_01 * l(&ap, &e1_rest)?,
        // −2α₀[L(A_-, A_+) + L(A_-, E_1 ∖ A) + L(A_+, E_{-1} ∖ A)]
        -2.0 * a0 * l(&am, &ap)?,
        -2.0 * a0 * l(&am, &e1_rest)?,
        -2.0 * a0 * l(&ap, &em_rest)?,
    ]))
}

/// Threshold below which the 1D strip provably lowers the energy, with the
/// two constants it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonZeroEstimate {
    pub value: f64,
    pub c0_const: f64,
    pub c1_const: f64,
}

/// `min{dist(x₀, ∂Ω), r, (|α₀| C₀ / (σ_{0,1} C₁))^{1/s}}` with
/// `C₀ = (2 − 2^{1−s})/(s(1−s))` and `C₁ = 2^{1+s}/(s r^s)`. `r = ∞` is allowed.
pub fn epsilon_zero_1d(s: FractionalOrder, sw: &SigmaWeights, r: f64, dist_to_boundary: f64) -> Result<EpsilonZeroEstimate> {
    let a0 = alphas_from_sigmas(sw).a_0;
    if a0 >= 0.0 {
        return Err(LabError::invalid(
            "sigma",
            format!("the strip estimate needs alpha_0 < 0, got {a0}"),
        ));
    }
    if !(r > 0.0) {
        return Err(LabError::invalid("r", format!("must be positive, got {r}")));
    }
    if !(dist_to_boundary > 0.0) {
        return Err(LabError::invalid("x0", "must lie inside omega"));
    }
    let sv = s.get();
    let c0 = (2.0 - 2f64.powf(1.0 - sv)) / s.normalizer();
    let c1 = 2f64.powf(1.0 + sv) / (sv * r.powf(sv));
    let third = if c1 == 0.0 {
        f64::INFINITY
    } else {
        (a0.abs() * c0 / (sw.s_01 * c1)).powf(1.0 / sv)
    };
    Ok(EpsilonZeroEstimate {
        value: dist_to_boundary.min(r).min(third),
        c0_const: c0,
        c1_const: c1,
    })
}

/// One ε of a strip scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapScanRow {
    pub eps: f64,
    pub f_original: f64,
    pub f_competitor: f64,
    pub gap_direct: f64,
    pub gap_formula: f64,
    pub below_eps0: bool,
}

impl GapScanRow {
    pub const CSV_HEADER: &'static str = "eps,f_original,f_competitor,gap_direct,gap_formula,below_eps0";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.eps,
            self.f_original,
            self.f_competitor,
            self.gap_direct,
            self.gap_formula,
            u8::from(self.below_eps0)
        )
    }
}

fn check_eps_list(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(LabError::invalid("eps_list", "must not be empty"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(LabError::invalid("eps_list", "entries must be positive and finite"));
    }
    let up = eps_list.windows(2).all(|w| w[0] < w[1]);
    let down = eps_list.windows(2).all(|w| w[0] > w[1]);
    if !(up || down) {
        return Err(LabError::invalid("eps_list", "must be strictly sorted"));
    }
    Ok(())
}

/// Distance from breakpoint `x0` to its nearest neighbouring breakpoint.
fn interface_clearance(p: &Partition1D, x0: f64) -> f64 {
    p.breakpoints()
        .iter()
        .filter(|&&x| x != x0)
        .map(|&x| (x - x0).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Strip scan at the `(-1 | +1)` interface `x0` of a 1D partition.
pub fn scan_gap_1d(
    s: FractionalOrder,
    sw: &SigmaWeights,
    p: &Partition1D,
    dom: &Domain1D,
    x0: f64,
    eps_list: &[f64],
) -> Result<Vec<GapScanRow>> {
    check_eps_list(eps_list)?;
    let model = LineModel::new(s, *dom);
    let eps0 = if alphas_from_sigmas(sw).a_0 < 0.0 && dom.contains_open(x0) {
        Some(epsilon_zero_1d(s, sw, interface_clearance(p, x0), dom.dist_to_boundary(x0))?.value)
    } else {
        None
    };
    let f_original = f_s(&model, sw, p)?.total;
    eps_list
        .par_iter()
        .map(|&eps| {
            let strip = IntervalSet::from_interval(strip_region_1d(p, x0, eps)?);
            let comp = build_strip_competitor(&model, p, &strip, StripVariant::OneSided)?;
            let f_competitor = f_s(&model, sw, &comp)?.total;
            Ok(GapScanRow {
                eps,
                f_original,
                f_competitor,
                gap_direct: f_original - f_competitor,
                gap_formula: gap_formula_one_sided(&model, sw, p, &strip)?,
                below_eps0: eps0.is_some_and(|e0| eps < e0),
            })
        })
        .collect()
}

/// Strip scan above the graph `psi` on a grid; the strip is the set of `+1`
/// cells whose centers lie in the band. Rows are flagged below the scale
/// `min{½, R/2}`.
pub fn scan_gap_2d(
    model: &GridModel,
    sw: &SigmaWeights,
    g: &GridPartition2D,
    psi: &LipschitzGraph,
    eps_list: &[f64],
) -> Result<Vec<GapScanRow>> {
    check_eps_list(eps_list)?;
    let scale = 0.5f64.min(0.5 * psi.big_r());
    let f_original = f_s(model, sw, g)?.total;
    let plus = g.phase_cells(Plus);
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let strip = strip_region_2d(g, psi, eps)?.intersect(&plus);
        let comp = build_strip_competitor(model, g, &strip, StripVariant::OneSided)?;
        let f_competitor = f_s(model, sw, &comp)?.total;
        rows.push(GapScanRow {
            eps,
            f_original,
            f_competitor,
            gap_direct: f_original - f_competitor,
            gap_formula: gap_formula_one_sided(model, sw, g, &strip)?,
            below_eps0: eps < scale,
        });
    }
    Ok(rows)
}

/// Least-squares line through `(ln ε, ln gap_direct)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub residual: f64,
    /// Indices of rows left out because their gap was not positive.
    pub excluded: Vec<usize>,
}

pub fn fit_gap_exponent(rows: &[GapScanRow]) -> Result<GapFit> {
    let mut excluded = Vec::new();
    let mut pts = Vec::with_capacity(rows.len());
    for (k, r) in rows.iter().enumerate() {
        if r.gap_direct > 0.0 && r.eps > 0.0 {
            pts.push((r.eps.ln(), r.gap_direct.ln()));
        } else {
            excluded.push(k);
        }
    }
    if pts.len() < 3 {
        return Err(LabError::invalid(
            "rows",
            format!("need at least 3 rows with positive gap, have {}", pts.len()),
        ));
    }
    let n = pts.len() as f64;
    let mx = compensated(pts.iter().map(|p| p.0)) / n;
    let my = compensated(pts.iter().map(|p| p.1)) / n;
    let sxx = compensated(pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)));
    let sxy = compensated(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    if sxx == 0.0 {
        return Err(LabError::invalid("rows", "all eps values coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok(GapFit {
        slope,
        intercept,
        residual,
        excluded,
    })
}
