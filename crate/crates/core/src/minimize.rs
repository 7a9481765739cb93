//! Single-move-stable descent on grids and brute-force 1D minimization with
//! fixed exterior data.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::competitor::gap_formula_two_sided;
use crate::energy::{alphas_from_sigmas, f_s, f_star, SigmaWeights};
use crate::error::{LabError, Result};
use crate::geometry::{CellSet, Domain1D, GridPartition2D, IntervalSet, Partition1D, PhaseLabel};
use crate::kernel1d::{classical_per_pair_1d, FractionalOrder, LineModel};
use crate::kernel2d::{classical_per_pair, GridModel};

use PhaseLabel::{Minus, Plus};

/// Upper limit on enumerated candidates in [`exhaustive_1d`].
pub const CANDIDATE_CAP: u128 = 10_000_000;
/// Interior breakpoints allowed in [`exhaustive_1d`].
pub const MAX_BREAKPOINTS: usize = 4;

/// One accepted relabeling: cell (or 1D grid cell) index, old and new label,
/// and the predicted energy change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub cell: usize,
    pub from: PhaseLabel,
    pub to: PhaseLabel,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeReport<C> {
    pub initial_energy: f64,
    pub final_energy: f64,
    pub moves_accepted: usize,
    pub final_cluster: C,
    /// Classical `(−1 | +1)` interface measure inside Ω.
    pub direct_interface_measure: f64,
    /// Whether carving phase 0 out of a layer next to a remaining
    /// `(−1 | +1)` contact would still lower the energy.
    pub strip_would_improve: bool,
    /// False when the sweep limit stopped the descent.
    pub converged: bool,
    pub moves: Vec<Move>,
}

impl<C> MinimizeReport<C> {
    pub const CSV_HEADER: &'static str =
        "initial_energy,final_energy,moves_accepted,direct_interface_measure,strip_would_improve";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.initial_energy,
            self.final_energy,
            self.moves_accepted,
            self.direct_interface_measure,
            u8::from(self.strip_would_improve)
        )
    }
}

fn accept_threshold(energy: f64) -> f64 {
    1e-13 * energy.abs().max(1e-300)
}

/// Energy change of relabeling a cell from `a` to `b`, given the weighted
/// sums `phi[j]` of its interactions with each phase.
fn move_delta(sw: &SigmaWeights, phi: [f64; 3], a: PhaseLabel, b: PhaseLabel) -> f64 {
    let cost = |l: PhaseLabel| -> f64 {
        PhaseLabel::ALL
            .iter()
            .filter(|&&j| j != l)
            .map(|&j| sw.get(l, j) * phi[j.index()])
            .sum()
    };
    cost(b) - cost(a)
}

/// Picks the most negative candidate; ties go to the lower label.
fn best_move(deltas: impl Iterator<Item = (PhaseLabel, f64)>, threshold: f64) -> Option<(PhaseLabel, f64)> {
    let mut best: Option<(PhaseLabel, f64)> = None;
    for (l, d) in deltas {
        if d < -threshold && best.is_none_or(|(_, bd)| d < bd) {
            best = Some((l, d));
        }
    }
    best
}

/// Greedy single-cell descent over the omega cells in row-major order.
pub fn greedy_descent(
    model: &GridModel,
    sw: &SigmaWeights,
    g: &GridPartition2D,
    max_sweeps: usize,
) -> Result<MinimizeReport<GridPartition2D>> {
    let kernel = model.kernel();
    let om: Vec<usize> = g.omega_cells().as_slice().to_vec();
    let mut labels = g.labels().to_vec();
    let mut phi: Vec<[f64; 3]> = vec![[0.0; 3]; om.len()];
    for l in PhaseLabel::ALL {
        let field = kernel.field(&g.phase_cells(l), &om);
        for (k, v) in field.into_iter().enumerate() {
            phi[k][l.index()] = v;
        }
    }
    for (k, &p) in om.iter().enumerate() {
        phi[k][labels[p].index()] -= kernel.pair(p, p);
    }

    let initial_energy = f_s(model, sw, g)?.total;
    let mut energy = initial_energy;
    let mut moves = Vec::new();
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut changed = false;
        for k in 0..om.len() {
            let p = om[k];
            let a = labels[p];
            let cands = a.others().into_iter().map(|b| (b, move_delta(sw, phi[k], a, b)));
            let Some((b, delta)) = best_move(cands, accept_threshold(energy)) else {
                continue;
            };
            labels[p] = b;
            energy += delta;
            moves.push(Move { cell: p, from: a, to: b, delta });
            changed = true;
            phi.par_iter_mut().zip(om.par_iter()).for_each(|(f, &r)| {
                if r != p {
                    let w = kernel.pair(r, p);
                    f[a.index()] -= w;
                    f[b.index()] += w;
                }
            });
        }
        if !changed {
            converged = true;
            break;
        }
    }

    let final_cluster = GridPartition2D::new(*g.frame(), labels, *g.omega())?;
    let final_energy = f_s(model, sw, &final_cluster)?.total;
    let strip_would_improve = grid_strip_would_improve(model, sw, &final_cluster)?;
    Ok(MinimizeReport {
        initial_energy,
        final_energy,
        moves_accepted: moves.len(),
        direct_interface_measure: classical_per_pair(&final_cluster, Plus, Minus, false),
        final_cluster,
        strip_would_improve,
        converged,
        moves,
    })
}

/// Tries the one-cell layers on either side of every `(−1 | +1)` contact in omega.
fn grid_strip_would_improve(model: &GridModel, sw: &SigmaWeights, g: &GridPartition2D) -> Result<bool> {
    let mut plus_layer = Vec::new();
    let mut minus_layer = Vec::new();
    for (p, q, _) in g.adjacent_pairs() {
        for (x, y) in [(p, q), (q, p)] {
            if g.in_omega(x) && g.label(x) == Plus && g.label(y) == Minus {
                plus_layer.push(x);
            }
            if g.in_omega(x) && g.label(x) == Minus && g.label(y) == Plus {
                minus_layer.push(x);
            }
        }
    }
    if plus_layer.is_empty() && minus_layer.is_empty() {
        return Ok(false);
    }
    let (plus_layer, minus_layer) = (CellSet::new(plus_layer), CellSet::new(minus_layer));
    let both = plus_layer.union(&minus_layer);
    let energy = f_s(model, sw, g)?.total;
    for strip in [plus_layer, minus_layer, both] {
        if !strip.is_empty() && gap_formula_two_sided(model, sw, g, &strip)? > accept_threshold(energy) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The `m` interior grid points `a + k|Ω|/(m+1)`, `k = 1..m`.
pub fn grid_points(dom: &Domain1D, m: usize) -> Vec<f64> {
    (1..=m)
        .map(|k| dom.a() + k as f64 * dom.length() / (m + 1) as f64)
        .collect()
}

/// The exterior of `exterior` outside `dom` with labels `labels` on the
/// pieces of `dom` cut at `xs`.
fn assemble(dom: &Domain1D, exterior: &Partition1D, xs: &[f64], labels: &[PhaseLabel]) -> Result<Partition1D> {
    let ebp = exterior.breakpoints();
    let elb = exterior.labels();
    let left = ebp.iter().take_while(|&&x| x < dom.a()).count();
    let upto_b = ebp.iter().take_while(|&&x| x <= dom.b()).count();
    let mut bps: Vec<f64> = ebp[..left].to_vec();
    bps.push(dom.a());
    bps.extend_from_slice(xs);
    bps.push(dom.b());
    bps.extend_from_slice(&ebp[upto_b..]);
    let mut lbs: Vec<PhaseLabel> = elb[..=left].to_vec();
    lbs.extend_from_slice(labels);
    lbs.extend_from_slice(&elb[upto_b..]);
    Partition1D::new(bps, lbs)
}

/// `Σ_{k ≤ 4} C(m, k)·3^{k+1}`.
pub fn search_space_size(m: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for k in 0..=MAX_BREAKPOINTS.min(m) {
        total += binom * 3u128.pow(k as u32 + 1);
        binom = binom * (m - k) as u128 / (k as u128 + 1);
    }
    total
}

#[derive(Debug, Clone)]
struct Candidate {
    energy: f64,
    xs: Vec<f64>,
    labels: Vec<PhaseLabel>,
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.energy
        .total_cmp(&b.energy)
        .then_with(|| {
            a.xs.iter()
                .zip(&b.xs)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| a.xs.len().cmp(&b.xs.len()))
        })
        .then_with(|| a.labels.cmp(&b.labels))
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + m - k) else {
            return out;
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Label sequences of length `len` over `allowed` with no two equal neighbours.
fn label_sequences(allowed: &[PhaseLabel], len: usize) -> Vec<Vec<PhaseLabel>> {
    let mut out: Vec<Vec<PhaseLabel>> = allowed.iter().map(|&l| vec![l]).collect();
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|seq| {
                let last = *seq.last().expect("nonempty");
                allowed.iter().filter(move |&&l| l != last).map(move |&l| {
                    let mut next = seq.clone();
                    next.push(l);
                    next
                })
            })
            .collect();
    }
    out
}

/// Minimizes `energy` over partitions that agree with `exterior` outside
/// `dom` and have at most four breakpoints inside, all on the grid.
fn enumerate_best<F>(
    dom: &Domain1D,
    exterior: &Partition1D,
    grid_m: usize,
    allowed: &[PhaseLabel],
    energy: F,
) -> Result<(Candidate, Partition1D)>
where
    F: Fn(&Partition1D) -> Result<f64> + Sync,
{
    let count = search_space_size(grid_m);
    if count > CANDIDATE_CAP {
        return Err(LabError::CapExceeded { count, cap: CANDIDATE_CAP });
    }
    let mut allowed = allowed.to_vec();
    allowed.sort();
    allowed.dedup();
    if allowed.is_empty() {
        return Err(LabError::invalid("allowed", "no labels allowed"));
    }
    let pts = grid_points(dom, grid_m);
    let jobs: Vec<Vec<usize>> = (0..=MAX_BREAKPOINTS.min(grid_m))
        .flat_map(|k| combinations(grid_m, k))
        .collect();
    let best = jobs
        .par_iter()
        .map(|combo| -> Result<Option<Candidate>> {
            let xs: Vec<f64> = combo.iter().map(|&i| pts[i]).collect();
            let mut best: Option<Candidate> = None;
            for labels in label_sequences(&allowed, xs.len() + 1) {
                let e = energy(&assemble(dom, exterior, &xs, &labels)?)?;
                let cand = Candidate { energy: e, xs: xs.clone(), labels };
                if best.as_ref().is_none_or(|b| candidate_order(&cand, b).is_lt()) {
                    best = Some(cand);
                }
            }
            Ok(best)
        })
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(a), Some(b)) => Some(if candidate_order(&b, &a).is_lt() { b } else { a }),
                    (a, b) => a.or(b),
                })
            },
        )?
        .ok_or_else(|| LabError::invalid("allowed", "no candidate partitions"))?;
    let p = assemble(dom, exterior, &best.xs, &best.labels)?;
    Ok((best, p))
}

fn line_strip_would_improve(model: &LineModel, sw: &SigmaWeights, p: &Partition1D, width: f64) -> Result<bool> {
    let om = model.domain.as_set();
    let energy = f_s(model, sw, p)?.total;
    for x in p.direct_contacts() {
        let band = IntervalSet::from_pairs(&[(x - width, x + width)])?.intersect(&om);
        let plus = band.intersect(&p.phase_set(Plus));
        let minus = band.intersect(&p.phase_set(Minus));
        for strip in [&plus, &minus, &band] {
            if !strip.is_empty() && gap_formula_two_sided(model, sw, p, strip)? > accept_threshold(energy) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Exact minimizer of `F^s` over the grid class, restricted to `allowed`
/// labels inside the domain. The initial energy is that of the domain filled
/// with the exterior label found just left of it; `moves_accepted` is 1 when
/// the minimizer differs from that start and 0 otherwise.
pub fn exhaustive_1d_with(
    s: FractionalOrder,
    sw: &SigmaWeights,
    dom: &Domain1D,
    exterior: &Partition1D,
    grid_m: usize,
    allowed: &[PhaseLabel],
) -> Result<MinimizeReport<Partition1D>> {
    let model = LineModel::new(s, *dom);
    let (best, final_cluster) = enumerate_best(dom, exterior, grid_m, allowed, |c| Ok(f_s(&model, sw, c)?.total))?;
    let start = assemble(dom, exterior, &[], &[exterior.label_left_of(dom.a())])?;
    let initial_energy = f_s(&model, sw, &start)?.total;
    let moved = final_cluster != start;
    let width = dom.length() / (grid_m + 1) as f64;
    Ok(MinimizeReport {
        initial_energy,
        final_energy: best.energy,
        moves_accepted: usize::from(moved),
        direct_interface_measure: classical_per_pair_1d(&final_cluster, dom, Plus, Minus, false),
        strip_would_improve: line_strip_would_improve(&model, sw, &final_cluster, width)?,
        final_cluster,
        converged: true,
        moves: Vec::new(),
    })
}

/// [`exhaustive_1d_with`] over all three labels.
pub fn exhaustive_1d(
    s: FractionalOrder,
    sw: &SigmaWeights,
    dom: &Domain1D,
    exterior: &Partition1D,
    grid_m: usize,
) -> Result<MinimizeReport<Partition1D>> {
    exhaustive_1d_with(s, sw, dom, exterior, grid_m, &PhaseLabel::ALL)
}

/// Greedy descent on the `m + 1` cells cut by the grid points. The start
/// labels each cell by the input at its midpoint; energies are recomputed in
/// closed form for every candidate.
pub fn greedy_descent_1d(
    s: FractionalOrder,
    sw: &SigmaWeights,
    dom: &Domain1D,
    start: &Partition1D,
    grid_m: usize,
    max_sweeps: usize,
) -> Result<MinimizeReport<Partition1D>> {
    let model = LineModel::new(s, *dom);
    let mut cuts = vec![dom.a()];
    cuts.extend(grid_points(dom, grid_m));
    cuts.push(dom.b());
    let mut labels: Vec<PhaseLabel> = cuts.windows(2).map(|w| start.label_right_of(0.5 * (w[0] + w[1]))).collect();
    let build = |labels: &[PhaseLabel]| assemble(dom, start, &cuts[1..cuts.len() - 1], labels);
    let energy_of = |labels: &[PhaseLabel]| -> Result<f64> { Ok(f_s(&model, sw, &build(labels)?)?.total) };

    let initial_energy = energy_of(&labels)?;
    let mut energy = initial_energy;
    let mut moves = Vec::new();
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut changed = false;
        for k in 0..labels.len() {
            let a = labels[k];
            let mut cands = Vec::with_capacity(2);
            for b in a.others() {
                let mut trial = labels.clone();
                trial[k] = b;
                cands.push((b, energy_of(&trial)? - energy));
            }
            if let Some((b, delta)) = best_move(cands.into_iter(), accept_threshold(energy)) {
                labels[k] = b;
                energy += delta;
                moves.push(Move { cell: k, from: a, to: b, delta });
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    let final_cluster = build(&labels)?;
    let width = dom.length() / (grid_m + 1) as f64;
    Ok(MinimizeReport {
        initial_energy,
        final_energy: f_s(&model, sw, &final_cluster)?.total,
        moves_accepted: moves.len(),
        direct_interface_measure: classical_per_pair_1d(&final_cluster, dom, Plus, Minus, false),
        strip_would_improve: line_strip_would_improve(&model, sw, &final_cluster, width)?,
        final_cluster,
        converged,
        moves,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaRow {
    pub s: f64,
    /// `(1−s)·F^s` of the exhaustive minimizer at this `s`.
    pub scaled_energy: f64,
    pub minimizer: Partition1D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaTable {
    /// Minimum of `F^*` (closed domain) over the same class.
    pub star_energy: f64,
    pub star_minimizer: Partition1D,
    pub rows: Vec<GammaRow>,
}

impl GammaTable {
    pub const CSV_HEADER: &'static str = "s,scaled_energy,star_energy,abs_difference";

    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{}",
                    r.s,
                    r.scaled_energy,
                    self.star_energy,
                    (r.scaled_energy - self.star_energy).abs()
                )
            })
            .collect()
    }
}

/// Exhaustive minimizers along `s_list` next to the `F^*` minimizer.
pub fn gamma_min_convergence_experiment(
    sw: &SigmaWeights,
    dom: &Domain1D,
    exterior: &Partition1D,
    s_list: &[f64],
    grid_m: usize,
) -> Result<GammaTable> {
    if s_list.is_empty() {
        return Err(LabError::invalid("s_list", "must not be empty"));
    }
    let a0 = alphas_from_sigmas(sw).a_0;
    if a0 > 0.0 {
        log::warn!("alpha_0 = {a0} > 0: the minimizer limit is only established for alpha_0 <= 0");
    }
    let star_model = LineModel::new(FractionalOrder::new(0.5)?, *dom);
    let (star, star_minimizer) =
        enumerate_best(dom, exterior, grid_m, &PhaseLabel::ALL, |c| Ok(f_star(&star_model, sw, c, true).total))?;
    let mut rows = Vec::with_capacity(s_list.len());
    for &sv in s_list {
        let s = FractionalOrder::new(sv)?;
        let rep = exhaustive_1d(s, sw, dom, exterior, grid_m)?;
        rows.push(GammaRow {
            s: sv,
            scaled_energy: (1.0 - sv) * rep.final_energy,
            minimizer: rep.final_cluster,
        });
    }
    Ok(GammaTable {
        star_energy: star.energy,
        star_minimizer,
        rows,
    })
}
