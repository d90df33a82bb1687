//! Cutoff functions `ρ` vanishing on `∂Ω`.
//!
//! `ρ(x) = S(t(x)/w)` where `t` is the distance to the boundary, `w` a
//! width and `S(s) = 6s⁵ − 15s⁴ + 10s³` the quintic smoothstep, clamped to
//! `[0, 1]`. Derivatives are analytic: on a box `|∇t| = 1` and `Δt = 0`
//! away from the ridge where two walls are equidistant, so
//! `|∇ρ|² = (S′/w)²` and `Δρ = S″/w²`.

use alloc::vec::Vec;

use crate::grid::{boundary_distance, Grid, RegionMask, ScalarField};
use crate::potential::Potential;
use crate::math::sqrt;
use crate::{Error, Result};

/// Largest number of width doublings attempted by [`build_cutoff`].
pub const MAX_DOUBLINGS: usize = 8;

pub fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
    }
}

pub fn smoothstep_d1(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        30.0 * s * s * (1.0 - s) * (1.0 - s)
    }
}

pub fn smoothstep_d2(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)
    }
}

/// A cutoff with its gradient and Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffField {
    rho: ScalarField,
    grad_sq: Vec<f64>,
    laplacian: Vec<f64>,
    /// Transition width `w`; zero for constant cutoffs.
    pub width: f64,
    /// `w / t*` when built from a potential.
    pub kappa: Option<f64>,
    /// `(inf_∂Ω V)^{−1/2}` when built from a potential.
    pub t_star: Option<f64>,
    /// `sup ρ²(|∇log ρ|² + |Δlog ρ|)` over the nodes.
    pub achieved_constant: f64,
    /// `3 inf_∂Ω V` when built from a potential.
    pub target: Option<f64>,
    pub doublings: usize,
}

impl CutoffField {
    /// Smoothstep cutoff of the given transition width.
    pub fn with_width(grid: &Grid, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter("cutoff width must be positive"));
        }
        let t = boundary_distance(grid);
        let mut rho = Vec::with_capacity(grid.len());
        let mut grad_sq = Vec::with_capacity(grid.len());
        let mut laplacian = Vec::with_capacity(grid.len());
        for n in 0..grid.len() {
            let s = t.get(n) / width;
            let d1 = smoothstep_d1(s) / width;
            rho.push(smoothstep(s));
            grad_sq.push(d1 * d1);
            laplacian.push(smoothstep_d2(s) / (width * width));
        }
        Ok(Self::assemble(*grid, rho, grad_sq, laplacian, width))
    }

    /// `ρ ≡ c`. Not compactly supported unless `c = 0`.
    pub fn constant(grid: &Grid, c: f64) -> Self {
        let len = grid.len();
        Self::assemble(
            *grid,
            alloc::vec![c; len],
            alloc::vec![0.0; len],
            alloc::vec![0.0; len],
            0.0,
        )
    }

    pub fn zero(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    /// `k ρ`.
    pub fn scaled(&self, k: f64) -> Self {
        let mut out = Self::assemble(
            *self.rho.grid(),
            self.rho.values().iter().map(|r| k * r).collect(),
            self.grad_sq.iter().map(|g| k * k * g).collect(),
            self.laplacian.iter().map(|l| k * l).collect(),
            self.width,
        );
        out.kappa = self.kappa;
        out.t_star = self.t_star;
        out.target = self.target;
        out.doublings = self.doublings;
        out
    }

    fn assemble(grid: Grid, rho: Vec<f64>, grad_sq: Vec<f64>, laplacian: Vec<f64>, width: f64) -> Self {
        let achieved_constant = (0..grid.len())
            .map(|n| grad_sq[n] + (rho[n] * laplacian[n] - grad_sq[n]).abs())
            .fold(0.0, f64::max);
        Self {
            rho: ScalarField::full(grid, rho).expect("sizes match"),
            grad_sq,
            laplacian,
            width,
            kappa: None,
            t_star: None,
            achieved_constant,
            target: None,
            doublings: 0,
        }
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    #[inline]
    pub fn value(&self, node: usize) -> f64 {
        self.rho.get(node)
    }

    /// `|∇ρ|²`, equal to `ρ²|∇log ρ|²`.
    #[inline]
    pub fn grad_sq(&self, node: usize) -> f64 {
        self.grad_sq[node]
    }

    /// `Δρ`
    #[inline]
    pub fn laplacian(&self, node: usize) -> f64 {
        self.laplacian[node]
    }

    /// `ρ²|Δlog ρ| = |ρΔρ − |∇ρ|²|`
    #[inline]
    pub fn log_laplacian_abs(&self, node: usize) -> f64 {
        (self.value(node) * self.laplacian[node] - self.grad_sq[node]).abs()
    }

    /// `ρ²(|∇log ρ|² + |Δlog ρ|)`
    #[inline]
    pub fn log_term(&self, node: usize) -> f64 {
        self.grad_sq[node] + self.log_laplacian_abs(node)
    }

    /// `ρ²(|Δρ| + |∇ρ|²)`
    #[inline]
    pub fn plain_term(&self, node: usize) -> f64 {
        let r = self.value(node);
        r * r * (self.laplacian[node].abs() + self.grad_sq[node])
    }

    /// `|∇ρ|² + ρ|Δρ|`
    #[inline]
    pub fn mixed_term(&self, node: usize) -> f64 {
        self.grad_sq[node] + self.value(node) * self.laplacian[node].abs()
    }

    /// Nodes where `ρ = 1`.
    pub fn plateau(&self) -> RegionMask {
        let member = self.rho.values().iter().map(|&r| r >= 1.0).collect();
        RegionMask::new(*self.grid(), member).expect("sizes match")
    }

    /// Whether `ρ` vanishes on every boundary node.
    pub fn vanishes_on_boundary(&self) -> bool {
        self.grid().boundary_nodes().all(|n| self.value(n) == 0.0)
    }

    pub fn meets_target(&self) -> bool {
        self.target.is_some_and(|t| self.achieved_constant <= t)
    }
}

/// Cutoff of width `κ t*` with `t* = (inf_∂Ω V)^{−1/2}`, without retries.
pub fn cutoff_for_kappa(v: &Potential, kappa: f64) -> Result<CutoffField> {
    let inf_b = v.inf_boundary();
    if !(inf_b > 0.0) {
        return Err(Error::BoundaryPotentialNonpositive { value: inf_b });
    }
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter("kappa must be positive"));
    }
    let t_star = 1.0 / sqrt(inf_b);
    let mut c = CutoffField::with_width(v.grid(), kappa * t_star)?;
    c.kappa = Some(kappa);
    c.t_star = Some(t_star);
    c.target = Some(3.0 * inf_b);
    Ok(c)
}

/// Cutoff of width `κ t*`, doubling `κ` (at most [`MAX_DOUBLINGS`] times)
/// while the achieved constant exceeds `3 inf_∂Ω V`.
pub fn build_cutoff(v: &Potential, kappa: f64) -> Result<CutoffField> {
    let mut k = kappa;
    let mut c = cutoff_for_kappa(v, k)?;
    let mut doublings = 0;
    while !c.meets_target() && doublings < MAX_DOUBLINGS {
        k *= 2.0;
        doublings += 1;
        c = cutoff_for_kappa(v, k)?;
    }
    c.doublings = doublings;
    Ok(c)
}
