//! Lower bounds on `λ₂ − λ₁`.
//!
//! The `L_δ` bound weighs the cutoff metric distance between the anchors by
//! a bracket of potential and cutoff terms. The `ε` bound replaces the anchor
//! distance by the diameter of `Ω_t` with `t = (inf_∂Ω V)^{−1/2}` and needs
//! `|inf(V − λ₂)| ≤ ε inf_∂Ω V` with `ε < 1`.

use alloc::vec::Vec;

use crate::cutoff::CutoffField;
use crate::distance::{l_functional, locate_anchors, AnchorPair};
use crate::ground_state::GProxy;
use crate::math::{ln, pos, pow, sqrt};
use crate::potential::{Potential, PotentialStats};
use crate::ratio::RatioState;
use crate::{Error, Result};

/// Number of points in the default `α` grid.
pub const ALPHA_GRID_LEN: usize = 16;

/// Default `δ` values scanned for the `L_δ` bound.
pub const DEFAULT_DELTAS: [f64; 4] = [0.5, 0.25, 0.1, 0.05];

/// Slack allowed when comparing a bound with the measured gap.
pub const SOUNDNESS_SLACK: f64 = 1e-9;

/// `ALPHA_GRID_LEN` geometric values spanning `[1e−2, 1e2]·(sup V − inf V + 1)`.
pub fn alpha_grid(v: &Potential) -> Vec<f64> {
    let scale = v.sup() - v.inf() + 1.0;
    let m = (ALPHA_GRID_LEN - 1) as f64;
    (0..ALPHA_GRID_LEN)
        .map(|k| scale * 1e-2 * pow(1e4, k as f64 / m))
        .collect()
}

/// The five addends of the `L_δ` bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketTerms {
    /// `20n² sup (V+α)⁻¹ρ²(|Δρ| + |∇ρ|²)`
    pub cutoff: f64,
    /// `10n sup ρ²(V+α)⁻³((ΔV)₊ + |∇V|²)`
    pub potential: f64,
    /// `10 (sup V − λ₁)/(sup V + α)`
    pub ratio: f64,
    /// `6n sup (V+α)^{−1/2} ((sup V − λ₁)/(sup V + α))^{1/2}`
    pub root: f64,
    /// `−6n inf ρ²(V+α)⁻¹ĝ`
    pub g: f64,
    /// The square root saw a negative argument and was taken as zero.
    pub clamped_sqrt: bool,
}

impl BracketTerms {
    pub fn sum(&self) -> f64 {
        self.cutoff + self.potential + self.ratio + self.root + self.g
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.cutoff, self.potential, self.ratio, self.root, self.g]
    }
}

/// The bracket for one `(α, ρ)`.
pub fn bracket(
    v: &Potential,
    rho: &CutoffField,
    alpha: f64,
    lambda1: f64,
    gproxy: &GProxy,
    n: usize,
) -> Result<BracketTerms> {
    let grid = v.grid();
    if rho.grid() != grid || gproxy.g.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let min = v.inf() + alpha;
    if !(min > 0.0) {
        return Err(Error::NonpositiveShift { min });
    }
    let nf = n as f64;
    let mut cut = 0.0f64;
    let mut pot = 0.0f64;
    let mut inv_sqrt = 0.0f64;
    let mut inf_g = f64::INFINITY;
    for k in 0..grid.len() {
        let w = v.value(k) + alpha;
        let r2 = rho.value(k) * rho.value(k);
        cut = cut.max(rho.plain_term(k) / w);
        pot = pot.max(r2 * (v.laplacian_pos(k) + v.grad_sq(k)) / (w * w * w));
        inv_sqrt = inv_sqrt.max(1.0 / sqrt(w));
        inf_g = inf_g.min(r2 / w * gproxy.g.get(k));
    }
    let ratio = (v.sup() - lambda1) / (v.sup() + alpha);
    Ok(BracketTerms {
        cutoff: 20.0 * nf * nf * cut,
        potential: 10.0 * nf * pot,
        ratio: 10.0 * ratio,
        root: 6.0 * nf * inv_sqrt * sqrt(pos(ratio)),
        g: -6.0 * nf * inf_g,
        clamped_sqrt: ratio < 0.0,
    })
}

/// `sup ρ²(V+α)⁻¹`.
pub fn sup_rho_weight(v: &Potential, rho: &CutoffField, alpha: f64) -> f64 {
    (0..v.grid().len())
        .map(|k| rho.value(k) * rho.value(k) / (v.value(k) + alpha))
        .fold(0.0, f64::max)
}

/// One `(α, ρ)` pair of the `L_δ` infimum.
#[derive(Debug, Clone, PartialEq)]
pub struct LDeltaCandidate {
    pub alpha: f64,
    /// Index into the cutoff list.
    pub rho: usize,
    pub anchors: AnchorPair,
    /// `L(ρ,α,δ)`, `+∞` when an anchor lies outside `supp ρ` or the anchors
    /// are disconnected within it.
    pub l: f64,
    pub bracket: BracketTerms,
    /// `L · bracket`
    pub value: f64,
    /// `L · sup ρ²(V+α)⁻¹ / δ`
    pub weighted_l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LDeltaResult {
    pub delta: f64,
    /// `L_δ`, `+∞` when no candidate has finite `L`.
    pub value: f64,
    /// Index of the minimising candidate.
    pub winner: Option<usize>,
    /// `inf L·sup ρ²(V+α)⁻¹/δ` over all candidates.
    pub inf_weighted_l: f64,
    pub candidates: Vec<LDeltaCandidate>,
    /// `ĝ` is the floor constant.
    pub g_floored: bool,
}

impl LDeltaResult {
    pub fn winning(&self) -> Option<&LDeltaCandidate> {
        self.winner.map(|k| &self.candidates[k])
    }
}

/// Inputs shared by every `(α, ρ)` candidate.
pub struct LDeltaContext<'a> {
    pub v: &'a Potential,
    pub state: &'a RatioState,
    pub gproxy: &'a GProxy,
    pub lambda1: f64,
    /// Dimension in the constants.
    pub n: usize,
}

/// `L_δ = inf over (α, ρ) of L(ρ,α,δ)·bracket`.
pub fn l_delta(ctx: &LDeltaContext<'_>, delta: f64, alphas: &[f64], cutoffs: &[CutoffField]) -> Result<LDeltaResult> {
    if alphas.is_empty() || cutoffs.is_empty() {
        return Err(Error::InvalidParameter("empty candidate family"));
    }
    let mut candidates = Vec::with_capacity(alphas.len() * cutoffs.len());
    for &alpha in alphas {
        let anchors = locate_anchors(ctx.state, delta, ctx.v, alpha)?;
        for (k, rho) in cutoffs.iter().enumerate() {
            let bracket = bracket(ctx.v, rho, alpha, ctx.lambda1, ctx.gproxy, ctx.n)?;
            let l = match l_functional(ctx.v, alpha, rho.rho(), anchors.x0, anchors.x1) {
                Ok(l) => l,
                Err(Error::AnchorOutsideSupport { .. }) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            let value = if l.is_finite() { l * bracket.sum() } else { f64::INFINITY };
            let weighted_l = if l.is_finite() {
                l * sup_rho_weight(ctx.v, rho, alpha) / delta
            } else {
                f64::INFINITY
            };
            candidates.push(LDeltaCandidate {
                alpha,
                rho: k,
                anchors,
                l,
                bracket,
                value,
                weighted_l,
            });
        }
    }
    let mut winner: Option<usize> = None;
    for (k, c) in candidates.iter().enumerate() {
        if c.value.is_finite() && winner.map_or(true, |w| c.value < candidates[w].value) {
            winner = Some(k);
        }
    }
    let value = winner.map_or(f64::INFINITY, |w| candidates[w].value);
    let inf_weighted_l = candidates.iter().map(|c| c.weighted_l).fold(f64::INFINITY, f64::min);
    Ok(LDeltaResult {
        delta,
        value,
        winner,
        inf_weighted_l,
        candidates,
        g_floored: ctx.gproxy.sentinel,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremId {
    LDelta,
    Epsilon,
}

impl TheoremId {
    pub fn label(&self) -> &'static str {
        match self {
            Self::LDelta => "4.1",
            Self::Epsilon => "6.1",
        }
    }
}

/// A side condition with its measured value.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFlag {
    pub name: &'static str,
    pub condition: &'static str,
    pub measured: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapBoundReport {
    pub theorem: TheoremId,
    pub flags: Vec<HypothesisFlag>,
    /// Present only when every flag passes.
    pub bound: Option<f64>,
    pub measured_gap: f64,
    /// `bound ≤ measured_gap + SOUNDNESS_SLACK`, evaluated only with a bound.
    pub sound: Option<bool>,
    /// The original inequality with the measured gap substituted.
    pub inequality_holds: bool,
    pub terms: Vec<(&'static str, f64)>,
}

impl GapBoundReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.flags.iter().all(|f| f.pass)
    }

    fn finish(
        theorem: TheoremId,
        flags: Vec<HypothesisFlag>,
        bound: f64,
        measured_gap: f64,
        inequality_holds: bool,
        terms: Vec<(&'static str, f64)>,
    ) -> Self {
        let ok = flags.iter().all(|f| f.pass);
        let bound = ok.then_some(bound);
        Self {
            theorem,
            flags,
            bound,
            measured_gap,
            sound: bound.map(|b| b <= measured_gap + SOUNDNESS_SLACK),
            inequality_holds,
            terms,
        }
    }
}

/// Right-hand side of the `L_δ` inequality for a given gap.
pub fn theorem_4_1_rhs(delta: f64, l_delta: f64, inf_weighted_l: f64, gap: f64) -> f64 {
    l_delta + gap * (1.0 / delta + inf_weighted_l)
}

/// `gap ≥ (log(1/δ) − L_δ)/(1/δ + inf L·sup ρ²(V+α)⁻¹/δ)`.
pub fn theorem_4_1_bound(delta: f64, l_delta: f64, inf_weighted_l: f64, measured_gap: f64) -> GapBoundReport {
    let lhs = ln(1.0 / delta).abs();
    let numerator = lhs - l_delta;
    let denominator = 1.0 / delta + inf_weighted_l;
    let flags = alloc::vec![
        HypothesisFlag {
            name: "delta_range",
            condition: "0 < delta < 1",
            measured: delta,
            pass: delta > 0.0 && delta < 1.0,
        },
        HypothesisFlag {
            name: "finite_l_delta",
            condition: "L_delta and inf L sup rho^2 (V+alpha)^-1 / delta finite",
            measured: l_delta,
            pass: l_delta.is_finite() && inf_weighted_l.is_finite(),
        },
        HypothesisFlag {
            name: "log_exceeds_l_delta",
            condition: "log(1/delta) > L_delta",
            measured: numerator,
            pass: numerator > 0.0,
        },
    ];
    let holds = lhs <= theorem_4_1_rhs(delta, l_delta, inf_weighted_l, measured_gap) + SOUNDNESS_SLACK;
    let terms = alloc::vec![
        ("log_inv_delta", lhs),
        ("l_delta", l_delta),
        ("inv_delta", 1.0 / delta),
        ("inf_weighted_l", inf_weighted_l),
        ("remark_margin", ln((1.0 - delta) / delta) - l_delta),
    ];
    GapBoundReport::finish(TheoremId::LDelta, flags, numerator / denominator, measured_gap, holds, terms)
}

/// `ε` from `|inf(V − λ₂)| ≤ ε inf_∂Ω V`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonResult {
    /// `None` when `inf_∂Ω V ≤ 0`.
    pub epsilon: Option<f64>,
    /// `ε/(2(1−ε))`, when `ε < 1`.
    pub level_ratio: Option<f64>,
    pub inf_boundary: f64,
    pub flags: Vec<HypothesisFlag>,
}

impl EpsilonResult {
    pub fn ok(&self) -> bool {
        self.flags.iter().all(|f| f.pass)
    }
}

pub fn epsilon_from_potential(stats: &PotentialStats, lambda2: f64) -> EpsilonResult {
    let b = stats.inf_boundary;
    let epsilon = (b > 0.0).then(|| (stats.inf - lambda2).abs() / b);
    let below_one = epsilon.is_some_and(|e| e < 1.0);
    EpsilonResult {
        epsilon,
        level_ratio: epsilon.filter(|_| below_one).map(|e| e / (2.0 * (1.0 - e))),
        inf_boundary: b,
        flags: alloc::vec![
            HypothesisFlag {
                name: "boundary_potential_positive",
                condition: "inf_boundary V > 0",
                measured: b,
                pass: b > 0.0,
            },
            HypothesisFlag {
                name: "epsilon_below_one",
                condition: "epsilon < 1",
                measured: epsilon.unwrap_or(f64::INFINITY),
                pass: below_one,
            },
        ],
    }
}

/// How `c̃_α` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CTildeRecipe {
    /// The `L_δ` bracket with the constructed cutoff and the chosen `α`.
    Bracket,
    Fixed(f64),
}

impl CTildeRecipe {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Bracket => "bracket",
            Self::Fixed(_) => "fixed",
        }
    }

    pub fn evaluate(&self, bracket: &BracketTerms) -> f64 {
        match *self {
            Self::Bracket => bracket.sum(),
            Self::Fixed(c) => c,
        }
    }
}

/// Everything the `ε` bound needs.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonBoundInput {
    pub epsilon: EpsilonResult,
    pub alpha: f64,
    pub c_tilde: f64,
    pub recipe: CTildeRecipe,
    /// `L(Ω_t)`
    pub l_target: f64,
    /// `sup_Ω (V+α)⁻¹`
    pub sup_inv_shift: f64,
    pub c_alpha: f64,
}

/// Right-hand side of the `ε` inequality for a given gap.
pub fn theorem_6_1_rhs(epsilon: f64, c_tilde_l: f64, l_sup: f64, gap: f64) -> f64 {
    c_tilde_l + 2.0 * gap / epsilon * (1.0 + l_sup)
}

/// `gap ≥ ε(|log(ε/(2(1−ε)))| − c̃_α L)/(2(1 + L sup(V+α)⁻¹))`.
pub fn theorem_6_1_bound(input: &EpsilonBoundInput, measured_gap: f64) -> GapBoundReport {
    let mut flags = input.epsilon.flags.clone();
    flags.push(HypothesisFlag {
        name: "c_alpha_finite",
        condition: "c_alpha finite",
        measured: input.c_alpha,
        pass: input.c_alpha.is_finite(),
    });
    flags.push(HypothesisFlag {
        name: "l_target_finite",
        condition: "L(Omega_t) finite",
        measured: input.l_target,
        pass: input.l_target.is_finite(),
    });
    let eps = input.epsilon.epsilon.unwrap_or(f64::NAN);
    let c_tilde_l = input.c_tilde * input.l_target;
    let l_sup = input.l_target * input.sup_inv_shift;
    let (lhs, bound, holds) = match input.epsilon.level_ratio {
        Some(r) => {
            let lhs = ln(r).abs();
            let bound = eps * (lhs - c_tilde_l) / (2.0 * (1.0 + l_sup));
            let holds = lhs <= theorem_6_1_rhs(eps, c_tilde_l, l_sup, measured_gap) + SOUNDNESS_SLACK;
            (lhs, bound, holds)
        }
        None => (f64::NAN, f64::NAN, false),
    };
    flags.push(HypothesisFlag {
        name: "log_exceeds_c_tilde_l",
        condition: "|log(eps/(2(1-eps)))| > c_tilde L(Omega_t)",
        measured: lhs - c_tilde_l,
        pass: lhs - c_tilde_l > 0.0,
    });
    let terms = alloc::vec![
        ("epsilon", eps),
        ("abs_log_level_ratio", lhs),
        ("c_tilde", input.c_tilde),
        ("l_target", input.l_target),
        ("c_tilde_l", c_tilde_l),
        ("l_sup_inv_shift", l_sup),
        ("alpha", input.alpha),
    ];
    GapBoundReport::finish(TheoremId::Epsilon, flags, bound, measured_gap, holds, terms)
}

/// Largest bound among reports whose hypotheses hold.
pub fn best_bound(reports: &[GapBoundReport]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, r) in reports.iter().enumerate() {
        if let Some(b) = r.bound {
            if best.map_or(true, |j| b > reports[j].bound.unwrap_or(f64::NEG_INFINITY)) {
                best = Some(k);
            }
        }
    }
    best
}
