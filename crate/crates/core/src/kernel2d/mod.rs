//! Grid quadrature of 2D interactions through a translation-invariant
//! cell-pair weight table, classical grid perimeters and the far-field bound.

mod table;

pub use table::OffsetWeightTable;

use crate::energy::PerimeterModel;
use crate::error::{LabError, Result};
use crate::geometry::{CellRect, CellSet, Frame2D, GridPartition2D, PhaseLabel};
use crate::kernel1d::FractionalOrder;
use crate::sum::blocked_sum;

/// Above this order the near-field weights are dominated by quadrature error.
pub const HIGH_ORDER_WARNING: f64 = 0.95;

/// Dense weights for every offset occurring inside an `nx × ny` frame,
/// `w[(dy + ny - 1) * (2 nx - 1) + dx + nx - 1]`.
#[derive(Debug, Clone)]
pub struct GridKernel {
    s: FractionalOrder,
    h: f64,
    nx: usize,
    ny: usize,
    weights: Vec<f64>,
}

impl GridKernel {
    pub fn new(table: &OffsetWeightTable, nx: usize, ny: usize) -> Self {
        let (wx, wy) = (2 * nx - 1, 2 * ny - 1);
        let mut weights = vec![0.0; wx * wy];
        for ry in 0..wy {
            for rx in 0..wx {
                let dx = rx as i64 - (nx as i64 - 1);
                let dy = ry as i64 - (ny as i64 - 1);
                weights[ry * wx + rx] = table.weight(dx, dy);
            }
        }
        GridKernel {
            s: table.s(),
            h: table.h(),
            nx,
            ny,
            weights,
        }
    }

    pub fn for_frame(table: &OffsetWeightTable, frame: &Frame2D) -> Result<Self> {
        if (table.h() - frame.h()).abs() > 1e-15 * frame.h() {
            return Err(LabError::invalid(
                "h",
                format!("weight table built for h = {}, frame has h = {}", table.h(), frame.h()),
            ));
        }
        Ok(GridKernel::new(table, frame.nx(), frame.ny()))
    }

    pub fn s(&self) -> FractionalOrder {
        self.s
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    fn check_frame(&self, frame: &Frame2D) {
        assert_eq!(
            (frame.nx(), frame.ny()),
            (self.nx, self.ny),
            "grid kernel built for a different frame"
        );
    }

    #[inline]
    fn base(&self, p: usize) -> usize {
        let (i, j) = (p % self.nx, p / self.nx);
        (j + self.ny - 1) * (2 * self.nx - 1) + i + self.nx - 1
    }

    #[inline]
    fn offset_key(&self, q: usize) -> usize {
        let (i, j) = (q % self.nx, q / self.nx);
        j * (2 * self.nx - 1) + i
    }

    /// Weight between cells `p` and `q`.
    #[inline]
    pub fn pair(&self, p: usize, q: usize) -> f64 {
        self.weights[self.base(p) - self.offset_key(q)]
    }

    /// `Σ_{q ∈ qs} w(p - q)` for precomputed offset keys.
    #[inline]
    fn row_sum(&self, p: usize, keys: &[usize]) -> f64 {
        let b = self.base(p);
        keys.iter().map(|&k| self.weights[b - k]).sum()
    }

    fn keys(&self, cells: impl Iterator<Item = usize>) -> Vec<usize> {
        cells.map(|q| self.offset_key(q)).collect()
    }

    /// `Σ_{q ∈ B} w(p - q)` for every `p`.
    pub fn field(&self, b: &CellSet, targets: &[usize]) -> Vec<f64> {
        let keys = self.keys(b.iter());
        targets.iter().map(|&p| self.row_sum(p, &keys)).collect()
    }
}

/// `L(A, B) = Σ_{p ∈ A, q ∈ B} w(p - q)` over the frame.
pub fn l_grid(kernel: &GridKernel, a: &CellSet, b: &CellSet) -> Result<f64> {
    if let Some(c) = a.first_common(b) {
        return Err(LabError::CellOverlap(c));
    }
    let keys = kernel.keys(b.iter());
    Ok(blocked_sum(a.as_slice(), |&p, acc| acc.add(kernel.row_sum(p, &keys))))
}

/// `Per^s_Ω(A, B)`: all pairs except those with both cells outside omega.
pub fn relative_interaction(kernel: &GridKernel, frame: &Frame2D, omega: &CellRect, a: &CellSet, b: &CellSet) -> Result<f64> {
    kernel.check_frame(frame);
    if let Some(c) = a.first_common(b) {
        return Err(LabError::CellOverlap(c));
    }
    let inside = |p: usize| {
        let (i, j) = frame.coords(p);
        omega.contains(i, j)
    };
    let all = kernel.keys(b.iter());
    let within = kernel.keys(b.iter().filter(|&q| inside(q)));
    Ok(blocked_sum(a.as_slice(), |&p, acc| {
        let keys = if inside(p) { &all } else { &within };
        acc.add(kernel.row_sum(p, keys));
    }))
}

/// `Per^s_Ω(E_i, E_j)` with the exterior of the frame omitted.
pub fn per_s_omega_2d(kernel: &GridKernel, g: &GridPartition2D, i: PhaseLabel, j: PhaseLabel) -> Result<f64> {
    if i == j {
        return Err(LabError::invalid("phases", "need two distinct phases"));
    }
    relative_interaction(kernel, g.frame(), g.omega(), &g.phase_cells(i), &g.phase_cells(j))
}

/// `Per^s_Ω(E_i)` against the complement of `E_i` within the frame.
pub fn per_s_2d(kernel: &GridKernel, g: &GridPartition2D, i: PhaseLabel) -> Result<f64> {
    let e = g.phase_cells(i);
    let rest = CellSet::new((0..g.frame().len()).filter(|&p| g.label(p) != i));
    relative_interaction(kernel, g.frame(), g.omega(), &e, &rest)
}

#[inline]
fn edge_in_omega(om: &CellRect, p: (usize, usize), horizontal: bool, closure: bool) -> bool {
    let (i, j) = p;
    // The shared edge sits on the line `i + 1` (horizontal pair) or `j + 1`.
    let (across, along, lo, hi, lo2, hi2) = if horizontal {
        (i + 1, j, om.i0, om.i1, om.j0, om.j1)
    } else {
        (j + 1, i, om.j0, om.j1, om.i0, om.i1)
    };
    let line_ok = if closure {
        lo <= across && across <= hi
    } else {
        lo < across && across < hi
    };
    line_ok && lo2 <= along && along < hi2
}

fn count_edges(g: &GridPartition2D, closure: bool, pred: impl Fn(PhaseLabel, PhaseLabel) -> bool) -> f64 {
    let f = g.frame();
    let n = g
        .adjacent_pairs()
        .filter(|&(p, q, horizontal)| {
            pred(g.label(p), g.label(q)) && edge_in_omega(g.omega(), f.coords(p), horizontal, closure)
        })
        .count();
    n as f64 * f.h()
}

/// Length of the `(i | j)` interface with edge midpoints in omega (or its closure).
pub fn classical_per_pair(g: &GridPartition2D, i: PhaseLabel, j: PhaseLabel, closure: bool) -> f64 {
    count_edges(g, closure, |a, b| (a == i && b == j) || (a == j && b == i))
}

/// Length of the boundary of phase `i` with edge midpoints in omega (or its closure).
pub fn classical_per_2d(g: &GridPartition2D, i: PhaseLabel, closure: bool) -> f64 {
    count_edges(g, closure, |a, b| (a == i) != (b == i))
}

/// Upper bound `2π |Ω| / (s D^s)` for all omitted interactions between omega
/// and points at distance at least `d` from it.
pub fn truncation_bound(s: FractionalOrder, om_cells: usize, h: f64, d: f64) -> f64 {
    let sv = s.get();
    2.0 * std::f64::consts::PI * (om_cells as f64 * h * h) / (sv * d.powf(sv))
}

/// Distance from omega to the frame boundary.
pub fn frame_margin(g: &GridPartition2D) -> f64 {
    let (f, om) = (g.frame(), g.omega());
    let m = om.i0.min(om.j0).min(f.nx() - om.i1).min(f.ny() - om.j1);
    m as f64 * f.h()
}

/// Grid perimeter model with a fixed weight kernel.
#[derive(Debug, Clone)]
pub struct GridModel {
    kernel: GridKernel,
}

impl GridModel {
    pub fn new(kernel: GridKernel) -> Self {
        if kernel.s().get() > HIGH_ORDER_WARNING {
            log::warn!(
                "s = {} > {HIGH_ORDER_WARNING}: near-field grid weights are dominated by quadrature error",
                kernel.s().get()
            );
        }
        GridModel { kernel }
    }

    /// Builds the weight table and kernel for the frame of `g`.
    pub fn build(s: FractionalOrder, frame: &Frame2D, far_cutoff: usize, near_depth: u32) -> Result<Self> {
        let table = OffsetWeightTable::build(s, frame.h(), far_cutoff, near_depth)?;
        Ok(GridModel::new(GridKernel::for_frame(&table, frame)?))
    }

    pub fn kernel(&self) -> &GridKernel {
        &self.kernel
    }
}

impl PerimeterModel for GridModel {
    type Cluster = GridPartition2D;
    type Region = CellSet;

    fn per_pair(&self, c: &GridPartition2D, i: PhaseLabel, j: PhaseLabel) -> Result<f64> {
        per_s_omega_2d(&self.kernel, c, i, j)
    }

    fn per_single(&self, c: &GridPartition2D, i: PhaseLabel) -> Result<f64> {
        per_s_2d(&self.kernel, c, i)
    }

    fn classical_pair(&self, c: &GridPartition2D, i: PhaseLabel, j: PhaseLabel, closure: bool) -> f64 {
        classical_per_pair(c, i, j, closure)
    }

    fn classical_single(&self, c: &GridPartition2D, i: PhaseLabel, closure: bool) -> f64 {
        classical_per_2d(c, i, closure)
    }

    /// Cell-by-cell double sum with weights `(u_p - u_q)^2`, each unordered pair once.
    fn phase_field_lhs(&self, c: &GridPartition2D) -> Result<f64> {
        self.kernel.check_frame(c.frame());
        let n = c.frame().len();
        let cells: Vec<usize> = (0..n).collect();
        let u = |p: usize| f64::from(c.label(p).value());
        Ok(blocked_sum(&cells, |&p, acc| {
            let (up, pin) = (u(p), c.in_omega(p));
            let mut row = 0.0;
            for q in p + 1..n {
                if !pin && !c.in_omega(q) {
                    continue;
                }
                let d = up - u(q);
                if d != 0.0 {
                    row += d * d * self.kernel.pair(p, q);
                }
            }
            acc.add(row);
        }))
    }

    fn phase(&self, c: &GridPartition2D, i: PhaseLabel) -> CellSet {
        c.phase_cells(i)
    }

    fn interaction(&self, a: &CellSet, b: &CellSet) -> Result<f64> {
        l_grid(&self.kernel, a, b)
    }

    fn intersect(&self, a: &CellSet, b: &CellSet) -> CellSet {
        a.intersect(b)
    }

    fn difference(&self, a: &CellSet, b: &CellSet) -> CellSet {
        a.difference(b)
    }

    fn is_empty(&self, a: &CellSet) -> bool {
        a.is_empty()
    }

    fn within_omega(&self, c: &GridPartition2D, a: &CellSet) -> bool {
        a.iter().all(|p| c.in_omega(p))
    }

    fn relabel(&self, c: &GridPartition2D, a: &CellSet, label: PhaseLabel) -> GridPartition2D {
        c.relabel(a, label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use PhaseLabel::*;

    fn model(s: f64, n: usize) -> (GridModel, Frame2D) {
        let f = Frame2D::new((0.0, 0.0), 1.0 / n as f64, n, n).unwrap();
        (GridModel::build(FractionalOrder::new(s).unwrap(), &f, 8, 6).unwrap(), f)
    }

    fn vertical_split(f: Frame2D, col: usize) -> GridPartition2D {
        let n = f.nx();
        GridPartition2D::from_fn(f, CellRect::new(1, 1, n - 1, n - 1).unwrap(), |i, _| {
            if i < col {
                Minus
            } else {
                Plus
            }
        })
        .unwrap()
    }

    #[test]
    fn single_pair_is_table_value() {
        let (m, f) = model(0.5, 8);
        let a = CellSet::new([f.index(3, 3)]);
        let b = CellSet::new([f.index(3, 4)]);
        let table = OffsetWeightTable::build(FractionalOrder::new(0.5).unwrap(), f.h(), 8, 6).unwrap();
        assert_eq!(l_grid(m.kernel(), &a, &b).unwrap(), table.weight(0, 1));
        assert!(matches!(l_grid(m.kernel(), &a, &a), Err(LabError::CellOverlap(_))));
    }

    #[test]
    fn additivity_and_far_bound() {
        let (m, f) = model(0.5, 16);
        let a = CellSet::new((0..3).map(|i| f.index(i, 0)));
        let b1 = CellSet::new((10..13).map(|i| f.index(i, 0)));
        let b2 = CellSet::new((10..13).map(|i| f.index(i, 5)));
        let k = m.kernel();
        let whole = l_grid(k, &a, &b1.union(&b2)).unwrap();
        let parts = l_grid(k, &a, &b1).unwrap() + l_grid(k, &a, &b2).unwrap();
        assert!((whole - parts).abs() <= 1e-14 * whole);
        // cell centers at distance >= 7 cells, gap between cells >= 6 cells
        let h = f.h();
        let d = 7.0 * h;
        let bound = (3.0 * h * h) * (3.0 * h * h) * d.powf(-2.5) * 1.02;
        assert!(l_grid(k, &a, &b1).unwrap() <= bound);
    }

    #[test]
    fn classical_counts() {
        let f = Frame2D::new((0.0, 0.0), 1.0 / 16.0, 18, 18).unwrap();
        let g = GridPartition2D::from_fn(f, CellRect::new(1, 1, 17, 17).unwrap(), |i, _| {
            if i < 9 {
                Minus
            } else {
                Plus
            }
        })
        .unwrap();
        assert_eq!(classical_per_pair(&g, Minus, Plus, false), 1.0);
        assert_eq!(classical_per_pair(&g, Minus, Zero, false), 0.0);
        let island = GridPartition2D::from_fn(f, CellRect::new(1, 1, 17, 17).unwrap(), |i, j| {
            if (5..9).contains(&i) && (5..9).contains(&j) {
                Plus
            } else {
                Zero
            }
        })
        .unwrap();
        assert_eq!(classical_per_pair(&island, Plus, Zero, false), 16.0 * f.h());
    }

    #[test]
    fn closure_counts_boundary_edges() {
        let f = Frame2D::new((0.0, 0.0), 1.0, 6, 6).unwrap();
        let om = CellRect::new(1, 1, 5, 5).unwrap();
        // interface on the left boundary line of omega (between columns 0 and 1)
        let g = GridPartition2D::from_fn(f, om, |i, _| if i < 1 { Minus } else { Plus }).unwrap();
        assert_eq!(classical_per_pair(&g, Minus, Plus, false), 0.0);
        assert_eq!(classical_per_pair(&g, Minus, Plus, true), 4.0);
    }

    #[test]
    fn pair_decomposition_on_grid() {
        let (m, f) = model(0.4, 12);
        let g = GridPartition2D::from_fn(f, CellRect::new(1, 1, 11, 11).unwrap(), |i, j| {
            PhaseLabel::ALL[(i * 7 + j * 3 + i * j) % 3]
        })
        .unwrap();
        for i in PhaseLabel::ALL {
            let [j, k] = i.others();
            let whole = m.per_single(&g, i).unwrap();
            let parts = m.per_pair(&g, i, j).unwrap() + m.per_pair(&g, i, k).unwrap();
            assert!((whole - parts).abs() <= 1e-10 * whole);
        }
        let (lhs, rhs) = crate::energy::phase_field_identity_check(&m, &g).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn symmetric_and_empty_cases() {
        let (m, f) = model(0.5, 10);
        let g = vertical_split(f, 5);
        let ab = per_s_omega_2d(m.kernel(), &g, Minus, Plus).unwrap();
        let ba = per_s_omega_2d(m.kernel(), &g, Plus, Minus).unwrap();
        assert!(ab > 0.0);
        assert!((ab - ba).abs() <= 1e-12 * ab);
        assert_eq!(per_s_omega_2d(m.kernel(), &g, Zero, Plus).unwrap(), 0.0);
        let full = GridPartition2D::from_fn(f, *g.omega(), |_, _| Plus).unwrap();
        assert_eq!(per_s_2d(m.kernel(), &full, Plus).unwrap(), 0.0);
    }

    #[test]
    fn truncation_bound_examples() {
        let s = FractionalOrder::new(0.5).unwrap();
        let v = truncation_bound(s, 1, 1.0, 100.0);
        assert!((v - 2.0 * std::f64::consts::PI * 0.1 / 0.5).abs() < 1e-12);
        let r = truncation_bound(s, 4, 0.5, 20.0) / truncation_bound(s, 4, 0.5, 10.0);
        assert!((r - 2f64.powf(-0.5)).abs() < 1e-14);
        assert!(truncation_bound(s, 4, 0.5, 1e300) < 1e-140);
    }
}
