//! Second-order finite differences on grid fields.
//!
//! Two flavours: [`central_derivatives`] evaluates centred stencils on the
//! eroded mask of a masked field (used for `φ`, `u`, `ψ`), while
//! [`full_derivatives`] covers every node, switching to second-order
//! one-sided stencils on the boundary (used for tabulated or parsed `V`).

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{Grid, ScalarField};
use crate::math::sqrt;

/// Derivative fields; entries outside `mask` are zero and meaningless.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivatives {
    pub grad: [Vec<f64>; 2],
    pub laplacian: Vec<f64>,
    pub hess_min: Vec<f64>,
    pub mask: Vec<bool>,
}

impl Derivatives {
    pub fn grad_sq(&self, node: usize) -> f64 {
        self.grad[0][node] * self.grad[0][node] + self.grad[1][node] * self.grad[1][node]
    }

    pub fn dot_grad(&self, other: &Derivatives, node: usize) -> f64 {
        self.grad[0][node] * other.grad[0][node] + self.grad[1][node] * other.grad[1][node]
    }
}

/// Smaller eigenvalue of the symmetric matrix `[[a, b], [b, c]]`.
#[inline]
pub fn min_eig_sym2(a: f64, b: f64, c: f64) -> f64 {
    let m = 0.5 * (a + c);
    let d = 0.5 * (a - c);
    m - sqrt(d * d + b * b)
}

/// Shrinks a mask by one stencil width: a node survives when it is interior
/// and its whole 3-point (1D) or 3×3 (2D) neighbourhood is in the mask.
pub fn erode(grid: &Grid, mask: &[bool]) -> Vec<bool> {
    let nx = grid.nodes(0);
    let two_d = grid.dim() == 2;
    (0..grid.len())
        .map(|n| {
            if !mask[n] || grid.is_boundary(n) {
                return false;
            }
            if !(mask[n - 1] && mask[n + 1]) {
                return false;
            }
            if two_d {
                for row in [n - nx, n + nx] {
                    if !(mask[row - 1] && mask[row] && mask[row + 1]) {
                        return false;
                    }
                }
            }
            true
        })
        .collect()
}

pub fn erode_times(grid: &Grid, mask: &[bool], times: usize) -> Vec<bool> {
    let mut m = mask.to_vec();
    for _ in 0..times {
        m = erode(grid, &m);
    }
    m
}

/// Centred first and second derivatives on `erode(field.mask)`.
pub fn central_derivatives(field: &ScalarField) -> Derivatives {
    let grid = field.grid();
    let v = field.values();
    let mask = erode(grid, field.mask());
    let len = grid.len();
    let mut gx = vec![0.0; len];
    let mut gy = vec![0.0; len];
    let mut lap = vec![0.0; len];
    let mut hmin = vec![0.0; len];
    let hx = grid.spacing(0);
    let hy = grid.spacing(1);
    let nx = grid.nodes(0);
    for n in (0..len).filter(|&n| mask[n]) {
        gx[n] = (v[n + 1] - v[n - 1]) / (2.0 * hx);
        let dxx = (v[n + 1] - 2.0 * v[n] + v[n - 1]) / (hx * hx);
        if grid.dim() == 1 {
            lap[n] = dxx;
            hmin[n] = dxx;
        } else {
            gy[n] = (v[n + nx] - v[n - nx]) / (2.0 * hy);
            let dyy = (v[n + nx] - 2.0 * v[n] + v[n - nx]) / (hy * hy);
            let dxy = (v[n + nx + 1] - v[n + nx - 1] - v[n - nx + 1] + v[n - nx - 1])
                / (4.0 * hx * hy);
            lap[n] = dxx + dyy;
            hmin[n] = min_eig_sym2(dxx, dxy, dyy);
        }
    }
    Derivatives {
        grad: [gx, gy],
        laplacian: lap,
        hess_min: hmin,
        mask,
    }
}

/// First derivative along `axis` at every node; second-order one-sided
/// stencils at the ends of each grid line.
pub fn d1_full(grid: &Grid, v: &[f64], axis: usize) -> Vec<f64> {
    let n_axis = grid.nodes(axis);
    let h = grid.spacing(axis);
    let s = grid.stride(axis);
    (0..grid.len())
        .map(|n| {
            let (i, j) = grid.ij(n);
            let k = if axis == 0 { i } else { j };
            if k == 0 {
                (-3.0 * v[n] + 4.0 * v[n + s] - v[n + 2 * s]) / (2.0 * h)
            } else if k + 1 == n_axis {
                (3.0 * v[n] - 4.0 * v[n - s] + v[n - 2 * s]) / (2.0 * h)
            } else {
                (v[n + s] - v[n - s]) / (2.0 * h)
            }
        })
        .collect()
}

/// Second derivative along `axis` at every node. The one-sided end stencil
/// is second order when the line has at least four nodes.
pub fn d2_full(grid: &Grid, v: &[f64], axis: usize) -> Vec<f64> {
    let n_axis = grid.nodes(axis);
    let h2 = grid.spacing(axis) * grid.spacing(axis);
    let s = grid.stride(axis);
    (0..grid.len())
        .map(|n| {
            let (i, j) = grid.ij(n);
            let k = if axis == 0 { i } else { j };
            if k == 0 {
                if n_axis >= 4 {
                    (2.0 * v[n] - 5.0 * v[n + s] + 4.0 * v[n + 2 * s] - v[n + 3 * s]) / h2
                } else {
                    (v[n] - 2.0 * v[n + s] + v[n + 2 * s]) / h2
                }
            } else if k + 1 == n_axis {
                if n_axis >= 4 {
                    (2.0 * v[n] - 5.0 * v[n - s] + 4.0 * v[n - 2 * s] - v[n - 3 * s]) / h2
                } else {
                    (v[n] - 2.0 * v[n - s] + v[n - 2 * s]) / h2
                }
            } else {
                (v[n + s] - 2.0 * v[n] + v[n - s]) / h2
            }
        })
        .collect()
}

/// Derivatives of a field known at every node (boundary included).
pub fn full_derivatives(grid: &Grid, v: &[f64]) -> Derivatives {
    let len = grid.len();
    let gx = d1_full(grid, v, 0);
    let dxx = d2_full(grid, v, 0);
    if grid.dim() == 1 {
        return Derivatives {
            grad: [gx, vec![0.0; len]],
            laplacian: dxx.clone(),
            hess_min: dxx,
            mask: vec![true; len],
        };
    }
    let gy = d1_full(grid, v, 1);
    let dyy = d2_full(grid, v, 1);
    let dxy = d1_full(grid, &gx, 1);
    let laplacian = dxx.iter().zip(&dyy).map(|(a, b)| a + b).collect();
    let hess_min = (0..len)
        .map(|n| min_eig_sym2(dxx[n], dxy[n], dyy[n]))
        .collect();
    Derivatives {
        grad: [gx, gy],
        laplacian,
        hess_min,
        mask: vec![true; len],
    }
}

/// Sup and `L²` norms of a residual over a node set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualNorms {
    pub sup: f64,
    /// Trapezoid-weighted `L²` norm over the same nodes.
    pub l2: f64,
    /// Node where the sup is attained.
    pub sup_node: Option<usize>,
    pub nodes: usize,
}

/// Norms of `r` over the nodes where `mask` holds.
pub fn residual_norms(grid: &Grid, mask: &[bool], r: impl Fn(usize) -> f64) -> ResidualNorms {
    let mut sup = 0.0;
    let mut sup_node = None;
    let mut sq = 0.0;
    let mut nodes = 0;
    for n in (0..grid.len()).filter(|&n| mask[n]) {
        let v = r(n);
        let a = v.abs();
        if sup_node.is_none() || a > sup {
            sup = a;
            sup_node = Some(n);
        }
        sq += grid.quadrature_weight(n) * v * v;
        nodes += 1;
    }
    ResidualNorms {
        sup,
        l2: sqrt(sq),
        sup_node,
        nodes,
    }
}
