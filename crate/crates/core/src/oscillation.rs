//! Integrals of the eigenfunctions over inner parallel sets `Ω_t` and the
//! inequalities bounding the oscillation of `u = u₂/u₁` there.
//!
//! `Ω_t` of a box is the box shrunk by `t`; integrals over it integrate the
//! piecewise (bi)linear interpolant of the node values exactly, so partial
//! cells at `∂Ω_t` are accounted for.

use alloc::vec;
use alloc::vec::Vec;

use crate::eigen::SpectralResult;
use crate::grid::{inner_region, Grid, RegionMask};
use crate::math::sqrt;
use crate::ratio::RatioState;
use crate::{Error, Result};

/// Relative slack below which a negative margin still counts as holding.
pub const VERDICT_TOL: f64 = 1e-10;

/// Node weights on one axis for `∫_a^b` of the linear interpolant.
fn axis_weights(grid: &Grid, axis: usize, a: f64, b: f64) -> Vec<f64> {
    let n = grid.nodes(axis);
    let h = grid.spacing(axis);
    let lo = grid.domain().lo(axis);
    let mut w = vec![0.0; n];
    for k in 0..n - 1 {
        let x0 = lo + k as f64 * h;
        let x1 = x0 + h;
        let c = a.max(x0);
        let d = b.min(x1);
        if d <= c {
            continue;
        }
        // ∫_c^d (x1 − x)/h and ∫_c^d (x − x0)/h
        w[k] += ((x1 - c) * (x1 - c) - (x1 - d) * (x1 - d)) / (2.0 * h);
        w[k + 1] += ((d - x0) * (d - x0) - (c - x0) * (c - x0)) / (2.0 * h);
    }
    w
}

/// Quadrature weights of `Ω_t` per node.
pub fn inner_weights(grid: &Grid, t: f64) -> Result<Vec<f64>> {
    let dom = grid.domain();
    let mut per_axis: [Vec<f64>; 2] = [vec![1.0], vec![1.0]];
    for axis in 0..grid.dim() {
        let a = dom.lo(axis) + t;
        let b = dom.hi(axis) - t;
        if !(b > a) {
            return Err(Error::EmptyRegion);
        }
        per_axis[axis] = axis_weights(grid, axis, a, b);
    }
    Ok((0..grid.len())
        .map(|n| {
            let (i, j) = grid.ij(n);
            let wy = if grid.dim() == 2 { per_axis[1][j] } else { 1.0 };
            per_axis[0][i] * wy
        })
        .collect())
}

/// `∫_{Ω_t}` of `u₁²`, `u₂²`, `u₁u₂`, `(u₁ ± u₂)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerIntegrals {
    pub t: f64,
    pub u1_sq: f64,
    pub u2_sq: f64,
    pub u1u2: f64,
    pub plus_sq: f64,
    pub minus_sq: f64,
}

impl InnerIntegrals {
    /// Largest defect of `∫(u₁ ± u₂)² = ∫u₁² + ∫u₂² ± 2∫u₁u₂`.
    pub fn identity_defect(&self) -> f64 {
        let plus = self.plus_sq - (self.u1_sq + self.u2_sq + 2.0 * self.u1u2);
        let minus = self.minus_sq - (self.u1_sq + self.u2_sq - 2.0 * self.u1u2);
        plus.abs().max(minus.abs())
    }
}

pub fn inner_integrals(spectral: &SpectralResult, t: f64) -> Result<InnerIntegrals> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter("t must be nonnegative"));
    }
    let u1 = &spectral.ground.eigenfunction;
    let u2 = &spectral.excited.eigenfunction;
    let grid = u1.grid();
    let w = inner_weights(grid, t)?;
    let mut s = [0.0f64; 5];
    for n in 0..grid.len() {
        let (a, b) = (u1.get(n), u2.get(n));
        s[0] += w[n] * a * a;
        s[1] += w[n] * b * b;
        s[2] += w[n] * a * b;
        s[3] += w[n] * (a + b) * (a + b);
        s[4] += w[n] * (a - b) * (a - b);
    }
    Ok(InnerIntegrals {
        t,
        u1_sq: s[0],
        u2_sq: s[1],
        u1u2: s[2],
        plus_sq: s[3],
        minus_sq: s[4],
    })
}

/// Constants of `V` the inequalities use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationInputs {
    pub inf_v: f64,
    pub inf_boundary: f64,
    /// `ε` when `|inf(V − λ₂)| ≤ ε inf_∂Ω V` holds with `ε < 1`.
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityEntry {
    pub id: &'static str,
    pub relation: Relation,
    /// `None` when the entry cannot be evaluated; see `note`.
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub holds: Option<bool>,
    /// Signed slack, positive when the inequality holds.
    pub margin: Option<f64>,
    /// Sup/inf taken over `Ω_t ∩ mask` with `Ω_t ⊄ mask`.
    pub mask_clipped: bool,
    pub note: Option<&'static str>,
}

impl InequalityEntry {
    fn new(id: &'static str, relation: Relation, lhs: f64, rhs: f64, mask_clipped: bool) -> Self {
        let margin = match relation {
            Relation::AtLeast => lhs - rhs,
            Relation::AtMost => rhs - lhs,
        };
        let ok = !margin.is_nan();
        Self {
            id,
            relation,
            lhs: Some(lhs),
            rhs: Some(rhs),
            holds: ok.then_some(margin >= -VERDICT_TOL * lhs.abs().max(rhs.abs()).max(1.0)),
            margin: ok.then_some(margin),
            mask_clipped,
            note: (!ok).then_some("undefined comparison"),
        }
    }

    fn unavailable(id: &'static str, relation: Relation, note: &'static str) -> Self {
        Self {
            id,
            relation,
            lhs: None,
            rhs: None,
            holds: None,
            margin: None,
            mask_clipped: false,
            note: Some(note),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillationReport {
    pub t: f64,
    pub integrals: InnerIntegrals,
    /// `∫_{Ω_t} u²u₁²` over the ratio mask.
    pub ratio_weighted: f64,
    pub entries: Vec<InequalityEntry>,
}

impl OscillationReport {
    pub fn entry(&self, id: &str) -> Option<&InequalityEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// `sup |u|`, `inf |u|` over `region ∩ mask` and whether the mask clipped it.
fn ratio_extremes(state: &RatioState, region: &RegionMask) -> Option<(f64, f64, bool)> {
    let u = &state.u;
    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let mut clipped = false;
    for n in region.nodes() {
        if !u.is_valid(n) {
            clipped = true;
            continue;
        }
        let a = u.get(n).abs();
        sup = sup.max(a);
        inf = inf.min(a);
    }
    sup.is_finite().then_some((sup, inf, clipped))
}

/// Every inequality at `t`, evaluated as displayed.
pub fn check_section5(
    spectral: &SpectralResult,
    state: &RatioState,
    inputs: &OscillationInputs,
    t: f64,
) -> Result<OscillationReport> {
    let grid = spectral.ground.eigenfunction.grid();
    if state.u.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let ints = inner_integrals(spectral, t)?;
    let l1 = spectral.ground.eigenvalue;
    let l2 = spectral.excited.eigenvalue;
    let m1 = inputs.inf_v - l1;
    let m2 = inputs.inf_v - l2;
    let t2 = t * t;
    use Relation::*;
    let mut entries = vec![
        InequalityEntry::new("5.12_1", AtLeast, ints.u1_sq, m1 * t2 + 1.0, false),
        InequalityEntry::new("5.12_2", AtLeast, ints.u2_sq, m2 * t2 + 1.0, false),
        InequalityEntry::new("5.14", AtLeast, ints.plus_sq, 2.0 + m2 * t2, false),
        InequalityEntry::new("5.15", AtLeast, ints.minus_sq, 2.0 + m2 * t2, false),
        InequalityEntry::new("5.16", AtLeast, ints.u1u2, 0.5 * m2 * t2, false),
        InequalityEntry::new("5.17", AtMost, ints.u1u2, -0.5 * m2 * t2, false),
    ];
    let region = inner_region(grid, t);
    match ratio_extremes(state, &region) {
        Some((sup, inf, clipped)) => {
            entries.push(InequalityEntry::new("5.19", AtLeast, sup * sup, 1.0 + m2 * t2, clipped));
            entries.push(InequalityEntry::new("5.20", AtMost, inf, 0.5 * t2 * (-m2), clipped));
            entries.push(InequalityEntry::new(
                "5.21",
                AtMost,
                inf / sup,
                t2 * (-m2) / (2.0 + 2.0 * m1 * t2),
                clipped,
            ));
        }
        None => {
            for id in ["5.19", "5.20", "5.21"] {
                let rel = if id == "5.19" { AtLeast } else { AtMost };
                entries.push(InequalityEntry::unavailable(id, rel, "omega_t misses the ratio mask"));
            }
        }
    }
    let b = inputs.inf_boundary;
    if b > 0.0 {
        let t_star = 1.0 / sqrt(b);
        let region = inner_region(grid, t_star);
        match ratio_extremes(state, &region) {
            Some((sup, inf, clipped)) => {
                let ratio = inf / sup;
                entries.push(InequalityEntry::new("6.10", AtMost, ratio, -m2 / (2.0 * b + 2.0 * m1), clipped));
                match inputs.epsilon {
                    Some(e) if e < 1.0 => {
                        entries.push(InequalityEntry::new("6.12", AtMost, ratio, e / (2.0 * (1.0 - e)), clipped))
                    }
                    _ => entries.push(InequalityEntry::unavailable("6.12", AtMost, "epsilon condition fails")),
                }
            }
            None => {
                entries.push(InequalityEntry::unavailable("6.10", AtMost, "omega_t misses the ratio mask"));
                entries.push(InequalityEntry::unavailable("6.12", AtMost, "omega_t misses the ratio mask"));
            }
        }
    } else {
        entries.push(InequalityEntry::unavailable("6.10", AtMost, "boundary potential not positive"));
        entries.push(InequalityEntry::unavailable("6.12", AtMost, "boundary potential not positive"));
    }
    let w = inner_weights(grid, t)?;
    let u1 = &spectral.ground.eigenfunction;
    let ratio_weighted = state
        .u
        .valid_nodes()
        .map(|n| w[n] * (state.u.get(n) * u1.get(n)).powi(2))
        .sum();
    Ok(OscillationReport {
        t,
        integrals: ints,
        ratio_weighted,
        entries,
    })
}
