use std::io::{Read, Write};
use std::path::Path;

use crate::error::{LabError, Result};
use crate::kernel1d::FractionalOrder;
use crate::sum::NeumaierSum;

const MAGIC: &[u8; 8] = b"NCLWTAB1";
const MAX_DEPTH: u32 = 10;
/// Largest relative change of the touching weights between depths `d` and `d + 1`.
const GATE: f64 = 0.01;

/// Interaction `∬_{C×C'} |x - y|^{-(2+s)}` of two unit cells `C`, `C' = C + Δ`,
/// for every integer offset `Δ != 0`, scaled by `h^{2-s}`.
///
/// Offsets with `|Δ|_∞ < far_cutoff` are tabulated; the rest use the midpoint
/// value `|Δ|^{-(2+s)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffsetWeightTable {
    s: FractionalOrder,
    h: f64,
    far_cutoff: usize,
    near_depth: u32,
    scale: f64,
    /// Unit-cell weights, row-major `unit[dy * far_cutoff + dx]`, `dx, dy >= 0`.
    unit: Vec<f64>,
}

#[inline]
fn kernel(s: f64, x: f64, y: f64) -> f64 {
    (x * x + y * y).powf(-(2.0 + s) / 2.0)
}

/// Composite midpoint rule with `n = 2^depth` sub-cells per side, folded
/// over the sub-cell offset multiplicities. Only valid for non-touching cells.
fn separated_pair(s: f64, dx: f64, dy: f64, depth: u32) -> f64 {
    let n = 1i64 << depth;
    let inv = 1.0 / n as f64;
    let mut acc = NeumaierSum::new();
    for v in -(n - 1)..n {
        let wv = (n - v.abs()) as f64;
        let y = dy + v as f64 * inv;
        let mut row = 0.0;
        for u in -(n - 1)..n {
            let wu = (n - u.abs()) as f64;
            row += wu * kernel(s, dx + u as f64 * inv, y);
        }
        acc.add(wv * row);
    }
    acc.value() * inv.powi(4)
}

/// Corner- and edge-touching weights from the exact self-similarity of the
/// kernel under halving: the pair integral splits into 16 half-cell pairs,
/// each worth `2^{s-2}` times a unit-cell pair at the doubled offset.
fn touching_pair(s: f64, depth: u32) -> (f64, f64) {
    let q = 2f64.powf(s - 2.0);
    let w = |dx: f64, dy: f64| separated_pair(s, dx, dy, depth);
    let (w20, w21, w22) = (w(2.0, 0.0), w(2.0, 1.0), w(2.0, 2.0));
    let (w30, w31, w32, w33) = (w(3.0, 0.0), w(3.0, 1.0), w(3.0, 2.0), w(3.0, 3.0));
    let corner = q * (4.0 * w21 + 2.0 * w31 + 4.0 * w22 + 4.0 * w32 + w33) / (1.0 - q);
    let edge = q * (2.0 * corner + 4.0 * w20 + 4.0 * w21 + 2.0 * w30 + 2.0 * w31) / (1.0 - 2.0 * q);
    (edge, corner)
}

impl OffsetWeightTable {
    pub fn build(s: FractionalOrder, h: f64, far_cutoff: usize, near_depth: u32) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(LabError::invalid("h", format!("must be positive, got {h}")));
        }
        if far_cutoff < 2 {
            return Err(LabError::invalid("far_cutoff", "must be at least 2"));
        }
        if near_depth > MAX_DEPTH {
            return Err(LabError::invalid("near_depth", format!("must be at most {MAX_DEPTH}")));
        }
        let sv = s.get();
        let (edge, corner) = touching_pair(sv, near_depth);
        let (edge_fine, corner_fine) = touching_pair(sv, near_depth + 1);
        for (name, coarse, fine) in [("edge", edge, edge_fine), ("corner", corner, corner_fine)] {
            let rel = (coarse - fine).abs() / fine;
            if !(rel <= GATE) {
                return Err(LabError::UnderResolved(format!(
                    "{name}-touching weight changes by {:.3}% between depths {near_depth} and {}",
                    100.0 * rel,
                    near_depth + 1
                )));
            }
        }
        let fc = far_cutoff;
        let mut unit = vec![0.0; fc * fc];
        for dy in 0..fc {
            for dx in dy..fc {
                let v = match (dx, dy) {
                    (0, 0) => 0.0,
                    (1, 0) => edge,
                    (1, 1) => corner,
                    _ => separated_pair(sv, dx as f64, dy as f64, near_depth),
                };
                unit[dy * fc + dx] = v;
                unit[dx * fc + dy] = v;
            }
        }
        Ok(OffsetWeightTable {
            s,
            h,
            far_cutoff,
            near_depth,
            scale: h.powf(2.0 - sv),
            unit,
        })
    }

    pub fn s(&self) -> FractionalOrder {
        self.s
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn far_cutoff(&self) -> usize {
        self.far_cutoff
    }

    pub fn near_depth(&self) -> u32 {
        self.near_depth
    }

    /// Weight for offset `(dx, dy)` in cells; zero for `(0, 0)`.
    pub fn weight(&self, dx: i64, dy: i64) -> f64 {
        self.scale * self.unit_weight(dx, dy)
    }

    /// Weight at `h = 1`.
    pub fn unit_weight(&self, dx: i64, dy: i64) -> f64 {
        let (ax, ay) = (dx.unsigned_abs() as usize, dy.unsigned_abs() as usize);
        if ax < self.far_cutoff && ay < self.far_cutoff {
            self.unit[ay * self.far_cutoff + ax]
        } else {
            kernel(self.s.get(), ax as f64, ay as f64)
        }
    }

    /// Writes the header `(s, h, far_cutoff, near_depth)` followed by the
    /// row-major unit weights, all little-endian.
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(40 + 8 * self.unit.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&self.s.get().to_le_bytes());
        buf.extend_from_slice(&self.h.to_le_bytes());
        buf.extend_from_slice(&(self.far_cutoff as u64).to_le_bytes());
        buf.extend_from_slice(&(self.near_depth as u64).to_le_bytes());
        for w in &self.unit {
            buf.extend_from_slice(&w.to_le_bytes());
        }
        let mut f = std::fs::File::create(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        f.write_all(&buf).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        let bad = |why: &str| LabError::Io(format!("{}: {why}", path.display()));
        if bytes.len() < 40 || &bytes[..8] != MAGIC {
            return Err(bad("not a weight table cache"));
        }
        let word = |k: usize| -> [u8; 8] { bytes[8 + 8 * k..16 + 8 * k].try_into().expect("8 bytes") };
        let s = FractionalOrder::new(f64::from_le_bytes(word(0)))?;
        let h = f64::from_le_bytes(word(1));
        let far_cutoff = u64::from_le_bytes(word(2)) as usize;
        let near_depth = u64::from_le_bytes(word(3)) as u32;
        if bytes.len() != 40 + 8 * far_cutoff * far_cutoff {
            return Err(bad("truncated weight data"));
        }
        let unit = (0..far_cutoff * far_cutoff).map(|k| f64::from_le_bytes(word(4 + k))).collect();
        Ok(OffsetWeightTable {
            s,
            h,
            far_cutoff,
            near_depth,
            scale: h.powf(2.0 - s.get()),
            unit,
        })
    }
}
