//! Box domains, uniform node grids and the fields that live on them.
//!
//! Nodes are numbered row-major with `x` varying fastest:
//! `node = i + nx * j`. In 1D the `y` axis has a single node.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// An interval (`dim = 1`) or rectangle (`dim = 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        check_axis(lo, hi)?;
        Ok(Self {
            dim: 1,
            lo: [lo, 0.0],
            hi: [hi, 0.0],
        })
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        check_axis(x.0, x.1)?;
        check_axis(y.0, y.1)?;
        Ok(Self {
            dim: 2,
            lo: [x.0, y.0],
            hi: [x.1, y.1],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|a| self.length(a)).product()
    }

    pub fn center(&self) -> [f64; 2] {
        [
            0.5 * (self.lo[0] + self.hi[0]),
            0.5 * (self.lo[1] + self.hi[1]),
        ]
    }
}

fn check_axis(lo: f64, hi: f64) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidDomain("bounds must be finite"));
    }
    if lo >= hi {
        return Err(Error::InvalidDomain("lo must be smaller than hi"));
    }
    Ok(())
}

/// Uniform tensor grid over a [`Domain`], boundary nodes included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    domain: Domain,
    nodes: [usize; 2],
    spacing: [f64; 2],
}

/// Uniform grid with `nodes_per_axis[k]` nodes on axis `k`.
pub fn build_grid(domain: Domain, nodes_per_axis: &[usize]) -> Result<Grid> {
    if nodes_per_axis.len() != domain.dim() {
        return Err(Error::InvalidParameter(
            "one node count per domain axis is required",
        ));
    }
    let mut nodes = [1usize; 2];
    let mut spacing = [1.0f64; 2];
    for (axis, &n) in nodes_per_axis.iter().enumerate() {
        if n < 3 {
            return Err(Error::TooCoarse { axis, nodes: n });
        }
        nodes[axis] = n;
        spacing[axis] = domain.length(axis) / (n - 1) as f64;
    }
    Ok(Grid {
        domain,
        nodes,
        spacing,
    })
}

impl Grid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Ambient dimension, the `n` in the dimensional constants of the estimates.
    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn nodes(&self, axis: usize) -> usize {
        self.nodes[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim())
            .map(|a| self.spacing[a])
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.nodes[0] * self.nodes[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume of one grid cell, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing[a]).product()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.nodes[0] * j
    }

    #[inline]
    pub fn ij(&self, node: usize) -> (usize, usize) {
        (node % self.nodes[0], node / self.nodes[0])
    }

    pub fn coord(&self, node: usize) -> [f64; 2] {
        let (i, j) = self.ij(node);
        let x = self.domain.lo[0] + i as f64 * self.spacing[0];
        let y = if self.dim() == 2 {
            self.domain.lo[1] + j as f64 * self.spacing[1]
        } else {
            0.0
        };
        [x, y]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        let (i, j) = self.ij(node);
        let on_x = i == 0 || i + 1 == self.nodes[0];
        if self.dim() == 1 {
            on_x
        } else {
            on_x || j == 0 || j + 1 == self.nodes[1]
        }
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&n| self.is_boundary(n))
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&n| !self.is_boundary(n))
    }

    /// Node offset of one step along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        if axis == 0 {
            1
        } else {
            self.nodes[0]
        }
    }

    /// Trapezoid quadrature weight of a node.
    pub fn quadrature_weight(&self, node: usize) -> f64 {
        let (i, j) = self.ij(node);
        let mut w = self.cell_volume();
        if i == 0 || i + 1 == self.nodes[0] {
            w *= 0.5;
        }
        if self.dim() == 2 && (j == 0 || j + 1 == self.nodes[1]) {
            w *= 0.5;
        }
        w
    }

    /// Axis-aligned neighbours of a node (2 in 1D, up to 4 in 2D).
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.ij(node);
        let nx = self.nodes[0];
        let ny = self.nodes[1];
        let two_d = self.dim() == 2;
        let cands = [
            (i > 0).then(|| node - 1),
            (i + 1 < nx).then(|| node + 1),
            (two_d && j > 0).then(|| node - nx),
            (two_d && j + 1 < ny).then(|| node + nx),
        ];
        cands.into_iter().flatten()
    }

    /// Node closest to a point (clamped to the domain).
    pub fn nearest_node(&self, p: [f64; 2]) -> usize {
        let mut idx = [0usize; 2];
        for axis in 0..self.dim() {
            let s = (p[axis] - self.domain.lo[axis]) / self.spacing[axis];
            let s = if s.is_finite() { s } else { 0.0 };
            let k = libm::round(s).clamp(0.0, (self.nodes[axis] - 1) as f64);
            idx[axis] = k as usize;
        }
        self.index(idx[0], idx[1])
    }
}

/// Node-indexed real values with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if values.len() != grid.len() || mask.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, values, mask })
    }

    /// Field valid everywhere.
    pub fn full(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let mask = vec![true; grid.len()];
        Self::new(grid, values, mask)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
            mask: vec![true; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|n| f(grid.coord(n))).collect();
        Self {
            grid,
            values,
            mask: vec![true; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn get(&self, node: usize) -> f64 {
        self.values[node]
    }

    #[inline]
    pub fn is_valid(&self, node: usize) -> bool {
        self.mask[node]
    }

    pub fn valid_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(move |&n| self.mask[n])
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Largest valid value and its node; ties go to the lowest index.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for n in self.valid_nodes() {
            let v = self.values[n];
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((n, v));
            }
        }
        best
    }

    /// Smallest valid value and its node; ties go to the lowest index.
    pub fn argmin(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for n in self.valid_nodes() {
            let v = self.values[n];
            if best.map_or(true, |(_, b)| v < b) {
                best = Some((n, v));
            }
        }
        best
    }

    pub fn max(&self) -> Option<f64> {
        self.argmax().map(|(_, v)| v)
    }

    pub fn min(&self) -> Option<f64> {
        self.argmin().map(|(_, v)| v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            mask: self.mask.clone(),
        }
    }

    /// Same values with a narrower mask (`mask ∧ keep`).
    pub fn restricted(&self, keep: &[bool]) -> ScalarField {
        let mask = self
            .mask
            .iter()
            .zip(keep)
            .map(|(&a, &b)| a && b)
            .collect();
        Self {
            grid: self.grid,
            values: self.values.clone(),
            mask,
        }
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// A node subset, typically an inner parallel set `Ω_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    grid: Grid,
    member: Vec<bool>,
}

impl RegionMask {
    pub fn new(grid: Grid, member: Vec<bool>) -> Result<Self> {
        if member.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, member })
    }

    pub fn full(grid: Grid) -> Self {
        Self {
            grid,
            member: vec![true; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn member(&self) -> &[bool] {
        &self.member
    }

    #[inline]
    pub fn contains(&self, node: usize) -> bool {
        self.member[node]
    }

    pub fn count(&self) -> usize {
        self.member.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.member.len()).filter(move |&n| self.member[n])
    }

    pub fn is_subset_of(&self, other: &RegionMask) -> bool {
        self.member
            .iter()
            .zip(&other.member)
            .all(|(&a, &b)| !a || b)
    }
}

/// Exact distance of every node to the box boundary.
pub fn boundary_distance(grid: &Grid) -> ScalarField {
    let d = *grid.domain();
    ScalarField::from_fn(*grid, |p| {
        let mut t = f64::INFINITY;
        for axis in 0..d.dim() {
            t = t.min(p[axis] - d.lo(axis)).min(d.hi(axis) - p[axis]);
        }
        t.max(0.0)
    })
    .with_exact_boundary_zero()
}

impl ScalarField {
    fn with_exact_boundary_zero(mut self) -> Self {
        for n in 0..self.values.len() {
            if self.grid.is_boundary(n) {
                self.values[n] = 0.0;
            }
        }
        self
    }
}

/// Inner parallel set `Ω_t = {x : d(x, ∂Ω) ≥ t}`.
///
/// An empty result is not an error here; callers that need nodes check
/// [`RegionMask::is_empty`].
pub fn inner_region(grid: &Grid, t: f64) -> RegionMask {
    let dist = boundary_distance(grid);
    // tolerate round-off in node coordinates so that e.g. t = 0.5 keeps a node at 0.5
    let slack = 1e-12 * grid.max_spacing();
    let member = dist.values().iter().map(|&d| d >= t - slack).collect();
    RegionMask {
        grid: *grid,
        member,
    }
}

/// Trapezoid-consistent quadrature of `field` over `region`.
///
/// Nodes outside the region, and masked nodes of the field, contribute
/// nothing; nodes inside keep their full-domain weights.
pub fn integrate(field: &ScalarField, region: &RegionMask) -> Result<f64> {
    if field.grid != region.grid {
        return Err(Error::GridMismatch);
    }
    let g = &field.grid;
    Ok(region
        .nodes()
        .filter(|&n| field.mask[n])
        .map(|n| g.quadrature_weight(n) * field.values[n])
        .sum())
}

/// Quadrature of a node-wise product without building a field.
pub fn integrate_with(grid: &Grid, region: &RegionMask, f: impl Fn(usize) -> f64) -> f64 {
    region
        .nodes()
        .map(|n| grid.quadrature_weight(n) * f(n))
        .sum()
}
