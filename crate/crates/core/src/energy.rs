//! Weighted cluster energies in σ-form, α-form, classical and relaxed forms.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::PhaseLabel;
use crate::sum::compensated;

use PhaseLabel::{Minus, Plus, Zero};

/// Perimeter and interaction evaluation for one kind of cluster (1D exact or
/// 2D grid) on a fixed reference domain.
pub trait PerimeterModel: Sync {
    type Cluster: Clone + Send + Sync;
    type Region: Clone + Send + Sync;

    /// `Per^s_Omega(E_i, E_j)`.
    fn per_pair(&self, c: &Self::Cluster, i: PhaseLabel, j: PhaseLabel) -> Result<f64>;
    /// `Per^s_Omega(E_i)`.
    fn per_single(&self, c: &Self::Cluster, i: PhaseLabel) -> Result<f64>;
    /// Classical `Per_Omega(E_i, E_j)`, or `Per_{closure Omega}` when `closure`.
    fn classical_pair(&self, c: &Self::Cluster, i: PhaseLabel, j: PhaseLabel, closure: bool) -> f64;
    /// Classical `Per_Omega(E_i)`, or its closure variant.
    fn classical_single(&self, c: &Self::Cluster, i: PhaseLabel, closure: bool) -> f64;
    /// Double integral of `½|u(x) - u(y)|^2` against the kernel off `Ω^c × Ω^c`.
    fn phase_field_lhs(&self, c: &Self::Cluster) -> Result<f64>;

    fn phase(&self, c: &Self::Cluster, i: PhaseLabel) -> Self::Region;
    /// Full interaction `L(A, B)`.
    fn interaction(&self, a: &Self::Region, b: &Self::Region) -> Result<f64>;
    fn intersect(&self, a: &Self::Region, b: &Self::Region) -> Self::Region;
    fn difference(&self, a: &Self::Region, b: &Self::Region) -> Self::Region;
    fn is_empty(&self, a: &Self::Region) -> bool;
    fn within_omega(&self, c: &Self::Cluster, a: &Self::Region) -> bool;
    fn relabel(&self, c: &Self::Cluster, a: &Self::Region, label: PhaseLabel) -> Self::Cluster;
}

/// Surface tensions `(σ_{-1,0}, σ_{-1,1}, σ_{0,1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SigmaWeights {
    pub s_m10: f64,
    pub s_m11: f64,
    pub s_01: f64,
}

impl SigmaWeights {
    pub fn new(s_m10: f64, s_m11: f64, s_01: f64) -> Result<Self> {
        for (name, v) in [("sigma[0]", s_m10), ("sigma[1]", s_m11), ("sigma[2]", s_01)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::invalid(name, format!("surface tension must be positive, got {v}")));
            }
        }
        Ok(SigmaWeights { s_m10, s_m11, s_01 })
    }

    /// `σ_{i,j}` for `i != j`.
    pub fn get(&self, i: PhaseLabel, j: PhaseLabel) -> f64 {
        match (i.min(j), i.max(j)) {
            (Minus, Zero) => self.s_m10,
            (Minus, Plus) => self.s_m11,
            (Zero, Plus) => self.s_01,
            _ => panic!("surface tension needs two distinct phases"),
        }
    }

    /// Relaxed tensions with `σ*_{-1,1} = σ_{-1,0} + σ_{0,1}`.
    pub fn star(&self) -> SigmaStarWeights {
        SigmaStarWeights(SigmaWeights {
            s_m10: self.s_m10,
            s_m11: self.s_m10 + self.s_01,
            s_01: self.s_01,
        })
    }
}

impl TryFrom<[f64; 3]> for SigmaWeights {
    type Error = LabError;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        SigmaWeights::new(v[0], v[1], v[2])
    }
}

impl From<SigmaWeights> for [f64; 3] {
    fn from(w: SigmaWeights) -> Self {
        [w.s_m10, w.s_m11, w.s_01]
    }
}

/// Relaxed tensions; the triangle inequality holds with equality for the
/// `(-1, +1)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaStarWeights(pub SigmaWeights);

impl SigmaStarWeights {
    pub fn as_sigma(&self) -> &SigmaWeights {
        &self.0
    }
}

/// Per-phase weights `α_i` with `α_i + α_j = σ_{i,j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaWeights {
    pub a_m1: f64,
    pub a_0: f64,
    pub a_1: f64,
}

impl AlphaWeights {
    pub fn get(&self, i: PhaseLabel) -> f64 {
        match i {
            Minus => self.a_m1,
            Zero => self.a_0,
            Plus => self.a_1,
        }
    }

    /// Triangle inequality for the tensions: every `α_i >= 0`.
    pub fn triangle_holds(&self) -> bool {
        self.a_m1 >= 0.0 && self.a_0 >= 0.0 && self.a_1 >= 0.0
    }

    /// `α*_i = α_i + α_0 = σ_{i,0}` for `i = ±1`.
    pub fn star(&self, i: PhaseLabel) -> f64 {
        self.get(i) + self.a_0
    }
}

pub fn alphas_from_sigmas(sw: &SigmaWeights) -> AlphaWeights {
    AlphaWeights {
        a_m1: 0.5 * (sw.s_m11 + sw.s_m10 - sw.s_01),
        a_0: 0.5 * (sw.s_m10 + sw.s_01 - sw.s_m11),
        a_1: 0.5 * (sw.s_m11 + sw.s_01 - sw.s_m10),
    }
}

/// Which functional an [`EnergyBreakdown`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyForm {
    /// `Σ σ_{i,j} Per^s_Ω(E_i, E_j)`.
    SNonlocal,
    /// `Σ α_i Per^s_Ω(E_i)`; the terms hold the single-phase perimeters of
    /// `E_{-1}`, `E_0`, `E_1` in that order.
    SAlpha,
    ClassicalOpen,
    ClassicalClosure,
    Star,
    StarClosure,
}

impl EnergyForm {
    pub fn name(self) -> &'static str {
        match self {
            EnergyForm::SNonlocal => "s-nonlocal",
            EnergyForm::SAlpha => "s-alpha",
            EnergyForm::ClassicalOpen => "classical-open",
            EnergyForm::ClassicalClosure => "classical-closure",
            EnergyForm::Star => "star",
            EnergyForm::StarClosure => "star-closure",
        }
    }
}

/// Three interaction terms, their weights and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub form: EnergyForm,
    pub term_m10: f64,
    pub term_m11: f64,
    pub term_01: f64,
    pub weights: [f64; 3],
    pub total: f64,
}

impl EnergyBreakdown {
    fn weighted(form: EnergyForm, terms: [f64; 3], weights: [f64; 3]) -> Self {
        let total = compensated((0..3).map(|k| weights[k] * terms[k]));
        EnergyBreakdown {
            form,
            term_m10: terms[0],
            term_m11: terms[1],
            term_01: terms[2],
            weights,
            total,
        }
    }

    pub fn terms(&self) -> [f64; 3] {
        [self.term_m10, self.term_m11, self.term_01]
    }

    pub const CSV_HEADER: &'static str = "form,term_m10,term_m11,term_01,total";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.form.name(),
            self.term_m10,
            self.term_m11,
            self.term_01,
            self.total
        )
    }
}

const PAIRS: [(PhaseLabel, PhaseLabel); 3] = [(Minus, Zero), (Minus, Plus), (Zero, Plus)];

fn sigma_array(sw: &SigmaWeights) -> [f64; 3] {
    [sw.s_m10, sw.s_m11, sw.s_01]
}

/// `F^s(E) = Σ_{i<j} σ_{i,j} Per^s_Ω(E_i, E_j)`.
pub fn f_s<M: PerimeterModel>(model: &M, sw: &SigmaWeights, c: &M::Cluster) -> Result<EnergyBreakdown> {
    let mut terms = [0.0; 3];
    for (k, (i, j)) in PAIRS.into_iter().enumerate() {
        terms[k] = model.per_pair(c, i, j)?;
    }
    Ok(EnergyBreakdown::weighted(EnergyForm::SNonlocal, terms, sigma_array(sw)))
}

/// `F^s(E) = Σ_i α_i Per^s_Ω(E_i)`.
pub fn f_s_alpha<M: PerimeterModel>(model: &M, aw: &AlphaWeights, c: &M::Cluster) -> Result<EnergyBreakdown> {
    let mut terms = [0.0; 3];
    for (k, i) in PhaseLabel::ALL.into_iter().enumerate() {
        terms[k] = if aw.get(i) == 0.0 { 0.0 } else { model.per_single(c, i)? };
    }
    Ok(EnergyBreakdown::weighted(
        EnergyForm::SAlpha,
        terms,
        [aw.a_m1, aw.a_0, aw.a_1],
    ))
}

fn classical_terms<M: PerimeterModel>(model: &M, c: &M::Cluster, closure: bool) -> [f64; 3] {
    PAIRS.map(|(i, j)| model.classical_pair(c, i, j, closure))
}

/// Relaxed classical energy `Σ σ*_{i,j} Per_Ω(E_i, E_j)`.
pub fn f_star<M: PerimeterModel>(model: &M, sw: &SigmaWeights, c: &M::Cluster, closure: bool) -> EnergyBreakdown {
    let form = if closure { EnergyForm::StarClosure } else { EnergyForm::Star };
    EnergyBreakdown::weighted(form, classical_terms(model, c, closure), sigma_array(sw.star().as_sigma()))
}

/// Classical energy `Σ σ_{i,j} Per_Ω(E_i, E_j)`.
pub fn f_one<M: PerimeterModel>(model: &M, sw: &SigmaWeights, c: &M::Cluster, closure: bool) -> EnergyBreakdown {
    let form = if closure {
        EnergyForm::ClassicalClosure
    } else {
        EnergyForm::ClassicalOpen
    };
    EnergyBreakdown::weighted(form, classical_terms(model, c, closure), sigma_array(sw))
}

/// `(lhs, rhs)` with `lhs` the phase-field double integral and
/// `rhs = Per^s_Ω(E_{-1}, E_0) + Per^s_Ω(E_0, E_1) + 4 Per^s_Ω(E_{-1}, E_1)`.
pub fn phase_field_identity_check<M: PerimeterModel>(model: &M, c: &M::Cluster) -> Result<(f64, f64)> {
    let lhs = model.phase_field_lhs(c)?;
    let rhs = compensated([
        model.per_pair(c, Minus, Zero)?,
        model.per_pair(c, Zero, Plus)?,
        4.0 * model.per_pair(c, Minus, Plus)?,
    ]);
    Ok((lhs, rhs))
}

/// `Σ_{i=±1} α*_i Per^s_Ω(E_i) − 2α_0 Per^s_Ω(E_{-1}, E_1)`.
pub fn f_s_star_form<M: PerimeterModel>(model: &M, sw: &SigmaWeights, c: &M::Cluster) -> Result<f64> {
    let aw = alphas_from_sigmas(sw);
    Ok(compensated([
        aw.star(Minus) * model.per_single(c, Minus)?,
        aw.star(Plus) * model.per_single(c, Plus)?,
        -2.0 * aw.a_0 * model.per_pair(c, Minus, Plus)?,
    ]))
}

/// `Σ_{i=±1} α*_i Per_Ω(E_i)` with classical perimeters.
pub fn f_star_alpha_form<M: PerimeterModel>(model: &M, sw: &SigmaWeights, c: &M::Cluster, closure: bool) -> f64 {
    let aw = alphas_from_sigmas(sw);
    aw.star(Minus) * model.classical_single(c, Minus, closure) + aw.star(Plus) * model.classical_single(c, Plus, closure)
}
