//! The ratio `u = u₂/u₁` and the functional `F` built on `ψ = −log(c − u)`.
//!
//! `u` satisfies `Δu = −(λ₂−λ₁)u + 2∇φ·∇u` and `ψ` satisfies
//! `Δψ = (λ₂−λ₁)(1 − ce^ψ) + 2∇φ·∇ψ + |∇ψ|²`; both residuals are exposed.
//! [`classify_theorem_3_1`] evaluates the four alternative upper bounds on
//! `F = ρ²(V+α)⁻¹[|∇ψ|² + (λ₂−λ₁)(1 − ce^ψ)]` at its maximiser.

use alloc::vec;
use alloc::vec::Vec;

use crate::cutoff::CutoffField;
use crate::fd::{central_derivatives, erode, residual_norms, Derivatives, ResidualNorms};
use crate::ground_state::{floored_mask, GProxy, LogGroundState, MIN_MASK_NODES};
use crate::grid::ScalarField;
use crate::math::{exp, ln, pos, sqrt};
use crate::potential::Potential;
use crate::{Error, Result};

/// Default relative margin `γ` in `c = (1+γ) sup u`.
pub const DEFAULT_GAMMA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RatioState {
    pub u: ScalarField,
    pub sup_u: f64,
    pub argmax: usize,
    pub c: f64,
    pub psi: ScalarField,
    pub floor: f64,
}

/// `u = u₂/u₁` on the floored mask of `u₁`, with `c = (1+γ) sup u`.
pub fn ratio_field(u2: &ScalarField, u1: &ScalarField, floor: f64, gamma: f64) -> Result<RatioState> {
    if u2.grid() != u1.grid() {
        return Err(Error::GridMismatch);
    }
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::InvalidParameter("floor must lie in (0, 1)"));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter("gamma must be positive"));
    }
    let mask = floored_mask(u1, floor);
    if mask.iter().filter(|&&m| m).count() < MIN_MASK_NODES {
        return Err(Error::DegenerateMask);
    }
    let values = (0..u1.grid().len())
        .map(|n| if mask[n] { u2.get(n) / u1.get(n) } else { 0.0 })
        .collect();
    let u = ScalarField::new(*u1.grid(), values, mask)?;
    let (argmax, sup_u) = u.argmax().ok_or(Error::DegenerateMask)?;
    if !(sup_u > 0.0) {
        return Err(Error::DegenerateMask);
    }
    let mut state = RatioState {
        psi: u.clone(),
        u,
        sup_u,
        argmax,
        c: 0.0,
        floor,
    };
    state.set_c((1.0 + gamma) * sup_u)?;
    Ok(state)
}

impl RatioState {
    /// Replaces `c` (which must exceed `sup u`) and recomputes `ψ`.
    pub fn set_c(&mut self, c: f64) -> Result<()> {
        if !(c > self.sup_u) {
            return Err(Error::InvalidParameter("c must exceed sup u"));
        }
        self.c = c;
        let values = (0..self.u.grid().len())
            .map(|n| {
                if self.u.is_valid(n) {
                    -ln(c - self.u.get(n))
                } else {
                    0.0
                }
            })
            .collect();
        self.psi = ScalarField::new(*self.u.grid(), values, self.u.mask().to_vec())?;
        Ok(())
    }

    /// `ψ` with `c` replaced.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        let mut s = self.clone();
        s.set_c(c)?;
        Ok(s)
    }
}

fn shared_region(state: &RatioState, phi: &LogGroundState, du: &Derivatives, dphi: &Derivatives) -> Result<Vec<bool>> {
    if state.u.grid() != phi.phi.grid() {
        return Err(Error::GridMismatch);
    }
    let both: Vec<bool> = du.mask.iter().zip(&dphi.mask).map(|(&a, &b)| a && b).collect();
    Ok(erode(state.u.grid(), &both))
}

/// Residual `Δu + (λ₂−λ₁)u − 2∇φ·∇u` on the twice-eroded mask.
pub fn eq31_residual(state: &RatioState, phi: &LogGroundState, gap: f64) -> Result<ResidualNorms> {
    let du = central_derivatives(&state.u);
    let dphi = central_derivatives(&phi.phi);
    let region = shared_region(state, phi, &du, &dphi)?;
    Ok(residual_norms(state.u.grid(), &region, |n| {
        du.laplacian[n] + gap * state.u.get(n) - 2.0 * dphi.dot_grad(&du, n)
    }))
}

/// Residual `Δψ − (λ₂−λ₁)(1 − ce^ψ) − 2∇φ·∇ψ − |∇ψ|²` on the twice-eroded mask.
pub fn psi_residual(state: &RatioState, phi: &LogGroundState, gap: f64) -> Result<ResidualNorms> {
    let dpsi = central_derivatives(&state.psi);
    let dphi = central_derivatives(&phi.phi);
    let region = shared_region(state, phi, &dpsi, &dphi)?;
    Ok(residual_norms(state.u.grid(), &region, |n| {
        let e = exp(state.psi.get(n));
        dpsi.laplacian[n]
            - gap * (1.0 - state.c * e)
            - 2.0 * dphi.dot_grad(&dpsi, n)
            - dpsi.grad_sq(n)
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FFunctional {
    /// `F` on the twice-eroded `ψ` mask.
    pub f: ScalarField,
    /// Lowest-index maximiser of `F` and its value.
    pub argmax: Option<(usize, f64)>,
    pub alpha: f64,
    /// `|∇ψ|²` on the same mask.
    pub grad_psi_sq: Vec<f64>,
}

/// `F = ρ²(V+α)⁻¹[|∇ψ|² + (λ₂−λ₁)(1 − ce^ψ)]`.
pub fn f_functional(
    state: &RatioState,
    v: &Potential,
    rho: &CutoffField,
    alpha: f64,
    gap: f64,
) -> Result<FFunctional> {
    let grid = state.u.grid();
    if v.grid() != grid || rho.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let min_shifted = v.inf() + alpha;
    if !(min_shifted > 0.0) {
        return Err(Error::NonpositiveShift { min: min_shifted });
    }
    let dpsi = central_derivatives(&state.psi);
    let region = erode(grid, &dpsi.mask);
    let mut values = vec![0.0; grid.len()];
    let mut grad_psi_sq = vec![0.0; grid.len()];
    for n in (0..grid.len()).filter(|&n| region[n]) {
        let r = rho.value(n);
        let g2 = dpsi.grad_sq(n);
        grad_psi_sq[n] = g2;
        values[n] = r * r / (v.value(n) + alpha) * (g2 + gap * (1.0 - state.c * exp(state.psi.get(n))));
    }
    let f = ScalarField::new(*grid, values, region)?;
    let argmax = f.argmax();
    Ok(FFunctional {
        f,
        argmax,
        alpha,
        grad_psi_sq,
    })
}

/// Outcome of one alternative at the maximiser of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseVerdict {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
    /// `None` when the alternative cannot be evaluated.
    pub holds: Option<bool>,
}

impl CaseVerdict {
    fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        Self {
            lhs,
            rhs,
            margin: rhs - lhs,
            holds: Some(lhs <= rhs + tol),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub node: Option<usize>,
    /// `F` at its maximiser.
    pub f_max: f64,
    pub cases: [CaseVerdict; 4],
    pub at_least_one_holds: bool,
    /// `F ≡ 0`: the cutoff vanishes on the evaluated nodes.
    pub vacuous: bool,
    /// Tolerance used for every comparison.
    pub tolerance: f64,
}

/// Everything the four alternatives need besides `F`.
pub struct CaseContext<'a> {
    pub state: &'a RatioState,
    pub v: &'a Potential,
    pub rho: &'a CutoffField,
    pub gproxy: &'a GProxy,
    pub lambda1: f64,
    pub gap: f64,
    /// Dimension in the constants.
    pub n: usize,
}

/// Evaluates the four alternatives at the maximiser of `F`; the left-hand
/// side is `F` there in every case.
pub fn classify_theorem_3_1(f: &FFunctional, ctx: &CaseContext<'_>) -> Result<CaseReport> {
    let grid = f.f.grid();
    let (v, rho, state) = (ctx.v, ctx.rho, ctx.state);
    if v.grid() != grid || rho.grid() != grid || ctx.gproxy.g.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let alpha = f.alpha;
    let nf = ctx.n as f64;
    let gap = ctx.gap;
    let c = state.c;

    let mut sup_inv = 0.0f64;
    let mut sup_inv_one_minus = f64::NEG_INFINITY;
    let mut sup_cut_log = 0.0f64;
    let mut sup_cut_mixed = 0.0f64;
    let mut sup_pot = 0.0f64;
    let mut sup_pot_rho = 0.0f64;
    let mut sup_inv_sqrt = 0.0f64;
    let mut sup_rho_e = 0.0f64;
    let mut sup_rho_root = 0.0f64;
    let mut inf_rho_g = f64::INFINITY;
    for k in 0..grid.len() {
        let w = v.value(k) + alpha;
        let r2 = rho.value(k) * rho.value(k);
        let pot = v.laplacian_pos(k) / (w * w) + v.grad_sq(k) / (w * w * w);
        sup_inv = sup_inv.max(1.0 / w);
        sup_cut_log = sup_cut_log.max(rho.log_term(k) / w);
        sup_cut_mixed = sup_cut_mixed.max(rho.mixed_term(k) / w);
        sup_pot = sup_pot.max(pot);
        sup_pot_rho = sup_pot_rho.max(r2 * pot);
        sup_inv_sqrt = sup_inv_sqrt.max(1.0 / sqrt(w));
        inf_rho_g = inf_rho_g.min(r2 / w * ctx.gproxy.g.get(k));
        if state.psi.is_valid(k) {
            let e = exp(state.psi.get(k));
            let one_minus = 1.0 - c * e;
            sup_inv_one_minus = sup_inv_one_minus.max(one_minus / w);
            sup_rho_e = sup_rho_e.max(r2 / w * e);
            sup_rho_root = sup_rho_root.max(r2 / w * sqrt(e * one_minus.abs()));
        }
    }
    let sup_v = v.sup();
    let ratio = (sup_v - ctx.lambda1) / (sup_v + alpha);
    let root_term = 6.0 * nf * sup_inv_sqrt * sqrt(pos(ratio));

    let (node, lhs) = match f.argmax {
        Some((node, val)) => (Some(node), val),
        None => (None, 0.0),
    };
    let case2_rhs = 144.0 * ratio + 20.0 * nf * nf * sup_cut_log + 4.0 * nf * sup_pot + root_term;
    let case3_rhs = 20.0 * nf * nf * sup_cut_mixed
        + 10.0 * nf * sup_pot_rho
        + 10.0 * ratio
        + root_term
        + 3.0 * nf * c * gap * sup_rho_e;
    let rhs = [
        gap * sup_inv_one_minus,
        case2_rhs,
        case3_rhs,
        sqrt(3.0 * nf * c) * gap * sup_rho_root,
    ];
    let scale = rhs
        .iter()
        .map(|x| x.abs())
        .fold(lhs.abs().max(1.0), f64::max);
    let tol = 1e-6 * scale;

    let mut cases = [
        CaseVerdict::new(lhs, rhs[0], tol),
        CaseVerdict::new(lhs, rhs[1], tol),
        CaseVerdict::new(lhs + 6.0 * nf * inf_rho_g, rhs[2], tol),
        CaseVerdict::new(lhs, rhs[3], tol),
    ];
    if ctx.gproxy.sentinel {
        cases[2].holds = None;
    }
    let at_least_one_holds = cases.iter().any(|k| k.holds == Some(true));
    let vacuous = f.f.valid_nodes().all(|k| f.f.get(k) == 0.0);
    Ok(CaseReport {
        node,
        f_max: lhs,
        cases,
        at_least_one_holds,
        vacuous,
        tolerance: tol,
    })
}
