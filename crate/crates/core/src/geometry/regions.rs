use super::grid::{CellSet, GridPartition2D};
use super::lipschitz::LipschitzGraph;
use crate::error::{LabError, Result};

/// Cells whose centers lie in the band `{psi(x') < x_n < psi(x') + eps}` over
/// the base `|x'| < r` of `psi`.
///
/// The band must fit inside omega. The result may contain cells of any label;
/// its `+1` cells form the discrete strip.
pub fn strip_region_2d(g: &GridPartition2D, psi: &LipschitzGraph, eps: f64) -> Result<CellSet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(LabError::invalid("eps", format!("must be positive, got {eps}")));
    }
    let f = g.frame();
    let h = f.h();
    let (ox, oy) = f.origin();
    let om = g.omega();
    let (xlo, xhi) = (ox + om.i0 as f64 * h, ox + om.i1 as f64 * h);
    let (ylo, yhi) = (oy + om.j0 as f64 * h, oy + om.j1 as f64 * h);
    let (cx, cy) = psi.center();
    let fits = cx - psi.r() >= xlo
        && cx + psi.r() <= xhi
        && cy + psi.min_value() >= ylo
        && cy + psi.max_value() + eps <= yhi;
    if !fits {
        return Err(LabError::invalid("psi", "strip band leaves omega"));
    }
    let cells = (0..f.len()).filter(|&idx| {
        let (x, y) = f.center(idx);
        let xp = x - cx;
        if !(xp.abs() < psi.r()) {
            return false;
        }
        let base = psi.eval(xp).expect("inside base");
        let t = y - cy;
        base < t && t < base + eps
    });
    Ok(CellSet::new(cells))
}

/// Omega cells whose centers lie within distance `< eps` of an edge shared by
/// a `-1` cell and a `+1` cell.
pub fn interface_neighborhood(g: &GridPartition2D, eps: f64) -> CellSet {
    let f = g.frame();
    let h = f.h();
    let (ox, oy) = f.origin();
    let reach = (eps / h).ceil() as isize + 1;
    let mut out = Vec::new();
    for seg in g.direct_contact_edges() {
        let i_mid = ((0.5 * (seg.a.0 + seg.b.0) - ox) / h).floor() as isize;
        let j_mid = ((0.5 * (seg.a.1 + seg.b.1) - oy) / h).floor() as isize;
        for j in (j_mid - reach).max(0)..=(j_mid + reach).min(f.ny() as isize - 1) {
            for i in (i_mid - reach).max(0)..=(i_mid + reach).min(f.nx() as isize - 1) {
                let idx = f.index(i as usize, j as usize);
                if g.in_omega(idx) && seg.distance(f.center(idx)) < eps {
                    out.push(idx);
                }
            }
        }
    }
    CellSet::new(out)
}
