use super::label::PhaseLabel;
use crate::error::{LabError, Result};

/// Uniform grid of `nx * ny` square cells of side `h`, cell `(i, j)` covering
/// `origin + [i h, (i+1) h] x [j h, (j+1) h]`. Cells are indexed row-major,
/// `idx = j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame2D {
    origin: (f64, f64),
    h: f64,
    nx: usize,
    ny: usize,
}

impl Frame2D {
    pub fn new(origin: (f64, f64), h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(LabError::invalid("grid.h", format!("must be positive, got {h}")));
        }
        if !(origin.0.is_finite() && origin.1.is_finite()) {
            return Err(LabError::invalid("grid.origin", "must be finite"));
        }
        if nx == 0 || ny == 0 {
            return Err(LabError::invalid("grid", "nx and ny must be at least 1"));
        }
        Ok(Frame2D { origin, h, nx, ny })
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn center(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.coords(idx);
        (
            self.origin.0 + (i as f64 + 0.5) * self.h,
            self.origin.1 + (j as f64 + 0.5) * self.h,
        )
    }
}

/// Half-open block of cells `[i0, i1) x [j0, j1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRect {
    pub i0: usize,
    pub j0: usize,
    pub i1: usize,
    pub j1: usize,
}

impl CellRect {
    pub fn new(i0: usize, j0: usize, i1: usize, j1: usize) -> Result<Self> {
        if i0 >= i1 || j0 >= j1 {
            return Err(LabError::invalid(
                "omega",
                format!("empty rectangle [{i0},{i1}) x [{j0},{j1})"),
            ));
        }
        Ok(CellRect { i0, j0, i1, j1 })
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.i0 <= i && i < self.i1 && self.j0 <= j && j < self.j1
    }

    pub fn cell_count(&self) -> usize {
        (self.i1 - self.i0) * (self.j1 - self.j0)
    }
}

/// Sorted set of cell indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CellSet {
    cells: Vec<usize>,
}

impl CellSet {
    pub fn new(cells: impl IntoIterator<Item = usize>) -> Self {
        let mut cells: Vec<usize> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        CellSet { cells }
    }

    pub fn empty() -> Self {
        CellSet::default()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cells
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().copied()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.cells.binary_search(&idx).is_ok()
    }

    /// First common cell, if any.
    pub fn first_common(&self, other: &CellSet) -> Option<usize> {
        let (mut i, mut j) = (0, 0);
        while i < self.cells.len() && j < other.cells.len() {
            match self.cells[i].cmp(&other.cells[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(self.cells[i]),
            }
        }
        None
    }

    pub fn intersect(&self, other: &CellSet) -> CellSet {
        CellSet {
            cells: self.cells.iter().copied().filter(|&c| other.contains(c)).collect(),
        }
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        CellSet {
            cells: self.cells.iter().copied().filter(|&c| !other.contains(c)).collect(),
        }
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        CellSet::new(self.iter().chain(other.iter()))
    }

    pub fn subset_of(&self, other: &CellSet) -> bool {
        self.cells.iter().all(|&c| other.contains(c))
    }
}

/// Labelled grid with a designated reference domain `omega`.
///
/// Cells outside the frame are not part of the computation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPartition2D {
    frame: Frame2D,
    labels: Vec<PhaseLabel>,
    omega: CellRect,
}

impl GridPartition2D {
    pub fn new(frame: Frame2D, labels: Vec<PhaseLabel>, omega: CellRect) -> Result<Self> {
        if labels.len() != frame.len() {
            return Err(LabError::invalid(
                "grid.labels",
                format!("expected {} labels, got {}", frame.len(), labels.len()),
            ));
        }
        if omega.i0 < 1 || omega.j0 < 1 || omega.i1 + 1 > frame.nx || omega.j1 + 1 > frame.ny {
            return Err(LabError::invalid(
                "omega",
                "must keep at least one cell of margin inside the frame",
            ));
        }
        Ok(GridPartition2D {
            frame,
            labels,
            omega,
        })
    }

    /// Parses a row-major label string of `-`, `0`, `+` (row `j = 0` first,
    /// whitespace ignored).
    pub fn from_label_string(frame: Frame2D, omega: CellRect, text: &str) -> Result<Self> {
        let labels = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(PhaseLabel::from_char)
            .collect::<Result<Vec<_>>>()?;
        GridPartition2D::new(frame, labels, omega)
    }

    /// Fills each cell with `f(i, j)`.
    pub fn from_fn(
        frame: Frame2D,
        omega: CellRect,
        f: impl Fn(usize, usize) -> PhaseLabel,
    ) -> Result<Self> {
        let labels = (0..frame.len())
            .map(|idx| {
                let (i, j) = frame.coords(idx);
                f(i, j)
            })
            .collect();
        GridPartition2D::new(frame, labels, omega)
    }

    pub fn frame(&self) -> &Frame2D {
        &self.frame
    }

    pub fn omega(&self) -> &CellRect {
        &self.omega
    }

    pub fn labels(&self) -> &[PhaseLabel] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, idx: usize) -> PhaseLabel {
        self.labels[idx]
    }

    #[inline]
    pub fn in_omega(&self, idx: usize) -> bool {
        let (i, j) = self.frame.coords(idx);
        self.omega.contains(i, j)
    }

    pub fn phase_cells(&self, label: PhaseLabel) -> CellSet {
        CellSet {
            cells: (0..self.labels.len()).filter(|&k| self.labels[k] == label).collect(),
        }
    }

    pub fn omega_cells(&self) -> CellSet {
        CellSet {
            cells: (0..self.labels.len()).filter(|&k| self.in_omega(k)).collect(),
        }
    }

    pub fn relabel(&self, cells: &CellSet, label: PhaseLabel) -> GridPartition2D {
        let mut out = self.clone();
        for c in cells.iter() {
            out.labels[c] = label;
        }
        out
    }

    pub fn to_label_string(&self) -> String {
        let mut s = String::with_capacity(self.labels.len() + self.frame.ny);
        for j in 0..self.frame.ny {
            if j > 0 {
                s.push('\n');
            }
            for i in 0..self.frame.nx {
                s.push(self.labels[self.frame.index(i, j)].to_char());
            }
        }
        s
    }

    /// Neighbour pairs `(p, q)` sharing an edge, each listed once, with `q` the
    /// right or upper neighbour of `p`. The flag is true for horizontal pairs.
    pub fn adjacent_pairs(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        let f = self.frame;
        (0..f.len()).flat_map(move |p| {
            let (i, j) = f.coords(p);
            let right = (i + 1 < f.nx).then(|| (p, p + 1, true));
            let up = (j + 1 < f.ny).then(|| (p, p + f.nx, false));
            right.into_iter().chain(up)
        })
    }

    /// Shared edges between a `-1` cell and a `+1` cell, as segments.
    pub fn direct_contact_edges(&self) -> Vec<Segment> {
        let h = self.frame.h;
        let (ox, oy) = self.frame.origin;
        self.adjacent_pairs()
            .filter(|&(p, q, _)| PhaseLabel::is_direct_pair(self.labels[p], self.labels[q]))
            .map(|(p, _, horizontal)| {
                let (i, j) = self.frame.coords(p);
                let (x, y) = (ox + i as f64 * h, oy + j as f64 * h);
                if horizontal {
                    Segment {
                        a: (x + h, y),
                        b: (x + h, y + h),
                    }
                } else {
                    Segment {
                        a: (x, y + h),
                        b: (x + h, y + h),
                    }
                }
            })
            .collect()
    }
}

/// Closed line segment in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl Segment {
    pub fn distance(&self, p: (f64, f64)) -> f64 {
        let d = (self.b.0 - self.a.0, self.b.1 - self.a.1);
        let len2 = d.0 * d.0 + d.1 * d.1;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.0 - self.a.0) * d.0 + (p.1 - self.a.1) * d.1) / len2).clamp(0.0, 1.0)
        };
        let c = (self.a.0 + t * d.0, self.a.1 + t * d.1);
        (p.0 - c.0).hypot(p.1 - c.1)
    }
}
