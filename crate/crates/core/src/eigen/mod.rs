//! The Dirichlet operator `−Δ_h + V` and its two lowest eigenpairs.
//!
//! [`lowest_two_eigenpairs`] runs a thick-restarted block Krylov method on
//! the shift-inverted operator `(A − σI)⁻¹`, factoring `A − σI` once with a
//! banded Cholesky, and extracts Ritz pairs of `A` itself. The ground state
//! is then refined by inverse iteration at a shift just below `λ₁`: the
//! shifted matrix is a nonsingular M-matrix, so every iterate stays strictly
//! positive, down to the exponentially small values deep inside barriers.
//!
//! [`dense_oracle`] is an independent full eigendecomposition for small grids.

mod band;
pub mod dense;

use alloc::vec;
use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;

use crate::grid::{Grid, ScalarField};
use crate::math::sqrt;
use crate::{Error, Result};

use band::BandCholesky;

/// Largest interior node count accepted by the dense oracle.
pub const DENSE_ORACLE_LIMIT: usize = 2500;

/// Default residual tolerance of the iterative solver.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default cap on block Krylov extensions.
pub const DEFAULT_MAX_ITER: usize = 600;

/// Relative spacing below which `λ₃ − λ₂` marks `λ₂` as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Sparse symmetric matrix of `−Δ_h + V` on interior nodes.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: Grid,
    interior: Vec<usize>,
    row_of: Vec<usize>,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    bandwidth: usize,
}

const NOT_INTERIOR: usize = usize::MAX;

/// Central 3-point (1D) or 5-point (2D) Laplacian plus the diagonal `V`,
/// with the Dirichlet boundary eliminated.
pub fn assemble_operator(grid: &Grid, v: &ScalarField) -> Result<DiscreteOperator> {
    if v.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let interior: Vec<usize> = grid.interior_nodes().collect();
    let mut row_of = vec![NOT_INTERIOR; grid.len()];
    for (r, &n) in interior.iter().enumerate() {
        row_of[n] = r;
    }
    let mut diag = Vec::with_capacity(interior.len());
    let mut row_ptr = Vec::with_capacity(interior.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    row_ptr.push(0);
    for &n in &interior {
        let mut d = v.get(n);
        for axis in 0..grid.dim() {
            let h2 = grid.spacing(axis) * grid.spacing(axis);
            d += 2.0 / h2;
            let s = grid.stride(axis);
            for m in [n - s, n + s] {
                let r = row_of[m];
                if r != NOT_INTERIOR {
                    cols.push(r);
                    vals.push(-1.0 / h2);
                }
            }
        }
        diag.push(d);
        row_ptr.push(cols.len());
    }
    let bandwidth = if grid.dim() == 1 {
        1
    } else {
        grid.nodes(0) - 2
    };
    Ok(DiscreteOperator {
        grid: *grid,
        interior,
        row_of,
        diag,
        row_ptr,
        cols,
        vals,
        bandwidth,
    })
}

impl DiscreteOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of unknowns (interior nodes).
    pub fn size(&self) -> usize {
        self.interior.len()
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Stored nonzeros of a row, diagonal included.
    pub fn row_nnz(&self, row: usize) -> usize {
        1 + self.row_ptr[row + 1] - self.row_ptr[row]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.cols[a..b]
            .iter()
            .position(|&c| c == j)
            .map_or(0.0, |k| self.vals[a + k])
    }

    /// `y = A x`
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.size() {
            let mut s = self.diag[r] * x[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            y[r] = s;
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.size();
        let mut a = vec![0.0; n * n];
        for r in 0..n {
            a[r * n + r] = self.diag[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                a[r * n + self.cols[k]] = self.vals[k];
            }
        }
        a
    }

    fn factor_shifted(&self, sigma: f64) -> Option<BandCholesky> {
        BandCholesky::factor(self.size(), self.bandwidth, |i, j| {
            self.entry(i, j) - if i == j { sigma } else { 0.0 }
        })
    }

    /// Embeds an interior vector into a full-grid field (zero on the boundary).
    pub fn to_field(&self, x: &[f64]) -> ScalarField {
        let mut values = vec![0.0; self.grid.len()];
        for (r, &n) in self.interior.iter().enumerate() {
            values[n] = x[r];
        }
        ScalarField::full(self.grid, values).expect("sizes match")
    }

    /// Restricts a field to interior unknowns.
    pub fn from_field(&self, f: &ScalarField) -> Vec<f64> {
        self.interior.iter().map(|&n| f.get(n)).collect()
    }

    pub fn row_of(&self, node: usize) -> Option<usize> {
        let r = self.row_of[node];
        (r != NOT_INTERIOR).then_some(r)
    }

    fn residual(&self, x: &[f64], lambda: f64) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.apply(x, &mut ax);
        let r: f64 = ax
            .iter()
            .zip(x)
            .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
            .sum();
        sqrt(r) / norm(x)
    }

    fn rayleigh(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.apply(x, &mut ax);
        dot(x, &ax) / dot(x, x)
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub eigenvalue: f64,
    /// Normalised so that the trapezoid integral of its square is 1.
    pub eigenfunction: ScalarField,
    /// `‖Au − λu‖₂ / ‖u‖₂` over the interior unknowns.
    pub residual_norm: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub ground: EigenPair,
    pub excited: EigenPair,
    pub gap: f64,
    /// Probe of the third eigenvalue, when it converged.
    pub third: Option<f64>,
    pub degeneracy_flag: bool,
    pub iterations: usize,
}

/// Two smallest eigenpairs of `op`, normalised in the grid `L²` inner
/// product, `u₁ > 0` on the interior and `u₂` non-negative at the first
/// interior node.
pub fn lowest_two_eigenpairs(
    op: &DiscreteOperator,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let n = op.size();
    if n < 2 {
        return Err(Error::InvalidParameter("operator needs at least two unknowns"));
    }
    let min_v = op
        .interior
        .iter()
        .map(|&node| {
            let kinetic: f64 = (0..op.grid.dim())
                .map(|a| 2.0 / (op.grid.spacing(a) * op.grid.spacing(a)))
                .sum();
            op.diag[op.row_of[node]] - kinetic
        })
        .fold(f64::INFINITY, f64::min);
    let sigma = min_v.min(0.0) - 1.0;
    let chol = op
        .factor_shifted(sigma)
        .ok_or(Error::InvalidParameter("shifted operator is not positive definite"))?;

    let krylov = block_krylov(op, &chol, tol, max_iter)?;
    let [l1, l2] = [krylov.values[0], krylov.values[1]];

    let mut u1 = krylov.vectors[0].clone();
    let total: f64 = u1.iter().sum();
    if total < 0.0 {
        u1.iter_mut().for_each(|v| *v = -*v);
    }
    let peak = u1.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if u1.iter().any(|&v| v < -1e-6 * peak) {
        return Err(Error::NegativeGroundState);
    }

    let u1 = polish_ground_state(op, u1, l1, l2, &chol);
    if u1.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NegativeGroundState);
    }
    let lambda1 = op.rayleigh(&u1);
    let res1 = op.residual(&u1, lambda1);

    let mut u2 = krylov.vectors[1].clone();
    let c = dot(&u2, &u1) / dot(&u1, &u1);
    u2.iter_mut().zip(&u1).for_each(|(a, b)| *a -= c * b);
    if u2[0] < 0.0 {
        u2.iter_mut().for_each(|v| *v = -*v);
    }
    let lambda2 = op.rayleigh(&u2);
    let res2 = op.residual(&u2, lambda2);

    for (res, lambda) in [(res1, lambda1), (res2, lambda2)] {
        if !(res <= tol * lambda.abs().max(1.0)) {
            return Err(Error::NoConvergence {
                max_iter,
                residuals: [res1, res2],
            });
        }
    }

    let third = krylov.values.get(2).copied();
    let degeneracy_flag =
        third.is_some_and(|l3| l3 - lambda2 < DEGENERACY_THRESHOLD * lambda2.abs().max(1.0));

    let scale = 1.0 / sqrt(op.grid.cell_volume());
    let ground = EigenPair {
        eigenvalue: lambda1,
        eigenfunction: op.to_field(&scaled(&u1, scale / norm(&u1))),
        residual_norm: res1,
    };
    let excited = EigenPair {
        eigenvalue: lambda2,
        eigenfunction: op.to_field(&scaled(&u2, scale / norm(&u2))),
        residual_norm: res2,
    };
    Ok(SpectralResult {
        gap: lambda2 - lambda1,
        ground,
        excited,
        third,
        degeneracy_flag,
        iterations: krylov.iterations,
    })
}

struct KrylovOutcome {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    iterations: usize,
}

const BLOCK: usize = 4;
const MAX_BASIS: usize = 64;
const WANTED: usize = 3;

fn block_krylov(
    op: &DiscreteOperator,
    chol: &BandCholesky,
    tol: f64,
    max_iter: usize,
) -> Result<KrylovOutcome> {
    let n = op.size();
    let block = BLOCK.min(n);
    let wanted = WANTED.min(n);
    let max_basis = MAX_BASIS.max(2 * block + wanted).min(n);

    let mut q: Vec<Vec<f64>> = Vec::new();
    let mut aq: Vec<Vec<f64>> = Vec::new();
    let mut h: Vec<Vec<f64>> = Vec::new();

    let mut frontier = start_block(n, block);
    let mut best = [f64::INFINITY; 2];
    let mut last: Option<(Vec<f64>, Vec<Vec<f64>>, usize)> = None;

    for iter in 0..max_iter.max(1) {
        let mut incoming = Vec::with_capacity(frontier.len());
        for x in &frontier {
            let mut w = x.clone();
            if iter > 0 {
                chol.solve_in_place(&mut w);
            }
            incoming.push(w);
        }
        let added = extend_basis(op, &mut q, &mut aq, &mut h, incoming);

        let m = q.len();
        let flat: Vec<f64> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| {
            if i <= j {
                h[j][i]
            } else {
                h[i][j]
            }
        }).collect();
        let (theta, s) = dense::jacobi_eigen(&flat, m);

        let take = wanted.max(block).min(m);
        let mut ritz = Vec::with_capacity(take);
        let mut aritz = Vec::with_capacity(take);
        let mut residuals = Vec::with_capacity(take);
        for k in 0..take {
            let mut y = vec![0.0; n];
            let mut ay = vec![0.0; n];
            for i in 0..m {
                let c = s[i * m + k];
                if c != 0.0 {
                    axpy(c, &q[i], &mut y);
                    axpy(c, &aq[i], &mut ay);
                }
            }
            let r: f64 = ay
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - theta[k] * b) * (a - theta[k] * b))
                .sum();
            residuals.push(sqrt(r) / norm(&y));
            ritz.push(y);
            aritz.push(ay);
        }
        let converged = |k: usize| residuals[k] <= 0.1 * tol * theta[k].abs().max(1.0);
        best = [residuals[0], residuals.get(1).copied().unwrap_or(0.0)];
        let exhausted = m == n || added == 0;
        if (0..wanted.min(take)).all(converged) || exhausted {
            let k = if (0..wanted.min(take)).all(converged) || m == n {
                wanted.min(take)
            } else {
                2
            };
            return Ok(KrylovOutcome {
                values: theta[..k].to_vec(),
                vectors: ritz.into_iter().take(k).collect(),
                iterations: iter + 1,
            });
        }
        // Two pairs converged but the probe has not: remember them in case
        // the iteration budget runs out.
        if converged(0) && converged(1) {
            last = Some((theta[..2].to_vec(), ritz[..2].to_vec(), iter + 1));
        }

        if m + block > max_basis {
            // thick restart on the current Ritz vectors
            let keep = take;
            h = (0..keep)
                .map(|i| {
                    let mut row = vec![0.0; i + 1];
                    row[i] = theta[i];
                    row
                })
                .collect();
            q = ritz;
            aq = aritz;
            frontier = q.clone();
            // drop the converged-unwanted tail so the new block stays small
            frontier.truncate(block);
        } else {
            frontier = q[m - added..].to_vec();
        }
    }
    if let Some((values, vectors, iterations)) = last {
        return Ok(KrylovOutcome {
            values,
            vectors,
            iterations,
        });
    }
    Err(Error::NoConvergence {
        max_iter,
        residuals: best,
    })
}

/// Orthonormalises `incoming` against the basis (two Gram-Schmidt passes)
/// and appends the survivors, updating `A Q` and the projected matrix.
/// `h[j][i]` holds `qᵢ · A qⱼ` for `i ≤ j`.
fn extend_basis(
    op: &DiscreteOperator,
    q: &mut Vec<Vec<f64>>,
    aq: &mut Vec<Vec<f64>>,
    h: &mut Vec<Vec<f64>>,
    incoming: Vec<Vec<f64>>,
) -> usize {
    let n = op.size();
    let mut added = 0;
    for mut w in incoming {
        if q.len() == n {
            break;
        }
        let start = norm(&w);
        if !(start > 0.0) {
            continue;
        }
        for _ in 0..2 {
            for b in q.iter() {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let nw = norm(&w);
        if !(nw > 1e-10 * start) {
            continue;
        }
        w.iter_mut().for_each(|v| *v /= nw);
        let mut aw = vec![0.0; n];
        op.apply(&w, &mut aw);
        let mut row: Vec<f64> = q.iter().map(|b| dot(b, &aw)).collect();
        row.push(dot(&w, &aw));
        h.push(row);
        q.push(w);
        aq.push(aw);
        added += 1;
    }
    added
}

// Deterministic start: a constant vector (large overlap with the ground
// state) plus seeded noise vectors.
fn start_block(n: usize, block: usize) -> Vec<Vec<f64>> {
    let mut rng = XorShiftRng::seed_from_u64(0x9E37_79B9_7F4A_7C15);
    let mut next = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    let mut out = vec![vec![1.0; n]];
    for _ in 1..block {
        out.push((0..n).map(|_| next()).collect());
    }
    out
}

// Inverse iteration with the M-matrix `A − σ_p I`, `σ_p < λ₁`. Starting from
// |u|, every iterate is a nonnegative combination of positive quantities.
fn polish_ground_state(
    op: &DiscreteOperator,
    start: Vec<f64>,
    l1: f64,
    l2: f64,
    fallback: &BandCholesky,
) -> Vec<f64> {
    let gap = (l2 - l1).abs().max(1e-12 * l1.abs().max(1.0));
    let factored = op.factor_shifted(l1 - 0.1 * gap);
    let chol = factored.as_ref().unwrap_or(fallback);
    let mut x: Vec<f64> = start.iter().map(|v| v.abs()).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    for _ in 0..200 {
        let mut y = x.clone();
        chol.solve_in_place(&mut y);
        let ny = norm(&y);
        y.iter_mut().for_each(|v| *v /= ny);
        let change = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = y;
        if change <= 1e-15 {
            break;
        }
    }
    x
}

/// The `k` smallest eigenvalues by a dense Householder/QL decomposition.
pub fn dense_oracle(op: &DiscreteOperator, k: usize) -> Result<Vec<f64>> {
    let n = check_oracle_size(op)?;
    let eig = dense::symmetric_eigen(&op.to_dense(), n, false);
    Ok(eig.values.into_iter().take(k).collect())
}

/// Like [`dense_oracle`], also returning eigenvectors as grid fields
/// (unit Euclidean norm over the interior, arbitrary sign).
pub fn dense_oracle_pairs(op: &DiscreteOperator, k: usize) -> Result<Vec<(f64, ScalarField)>> {
    let n = check_oracle_size(op)?;
    let eig = dense::symmetric_eigen(&op.to_dense(), n, true);
    let vecs = eig.vectors.expect("vectors requested");
    Ok((0..k.min(n))
        .map(|col| {
            let x: Vec<f64> = (0..n).map(|row| vecs[row * n + col]).collect();
            (eig.values[col], op.to_field(&x))
        })
        .collect())
}

fn check_oracle_size(op: &DiscreteOperator) -> Result<usize> {
    let n = op.size();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    Ok(n)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(a, b)| *a += c * b);
}

fn scaled(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|v| v * c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, integrate, Domain, RegionMask};
    use crate::potential::{eval_potential, PotentialSpec};
    use core::f64::consts::{PI, SQRT_2};

    fn operator(spec: PotentialSpec, lo: f64, hi: f64, nodes: usize) -> DiscreteOperator {
        let g = build_grid(Domain::interval(lo, hi).unwrap(), &[nodes]).unwrap();
        let v = eval_potential(&spec, &g).unwrap();
        assemble_operator(&g, v.field()).unwrap()
    }

    #[test]
    fn five_node_stencil() {
        let op = operator(PotentialSpec::zero(), 0.0, PI, 5);
        let h = PI / 4.0;
        assert_eq!(op.size(), 3);
        let a = op.to_dense();
        for i in 0..3 {
            assert!((a[i * 3 + i] - 2.0 / (h * h)).abs() < 1e-12);
        }
        assert!((a[1] + 1.0 / (h * h)).abs() < 1e-12);
        assert_eq!(a[2], 0.0);
    }

    #[test]
    fn five_node_oracle_closed_form() {
        let op = operator(PotentialSpec::zero(), 0.0, PI, 5);
        let h2 = (PI / 4.0) * (PI / 4.0);
        let vals = dense_oracle(&op, 3).unwrap();
        let want = [(2.0 - SQRT_2) / h2, 2.0 / h2, (2.0 + SQRT_2) / h2];
        for (v, w) in vals.iter().zip(want) {
            assert!((v - w).abs() < 1e-12 * w);
        }
    }

    #[test]
    fn constant_shift_moves_spectrum() {
        let a = dense_oracle(&operator(PotentialSpec::harmonic(1.0), -4.0, 4.0, 61), 4).unwrap();
        let b = dense_oracle(
            &operator(PotentialSpec::harmonic(1.0).shifted(2.5), -4.0, 4.0, 61),
            4,
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x - 2.5).abs() < 1e-10);
        }
    }

    #[test]
    fn square_stencil_sparsity() {
        let g = build_grid(Domain::rectangle((0.0, PI), (0.0, PI)).unwrap(), &[5, 5]).unwrap();
        let v = ScalarField::constant(g, 0.0);
        let op = assemble_operator(&g, &v).unwrap();
        assert_eq!(op.size(), 9);
        assert!((0..9).all(|r| op.row_nnz(r) <= 5));
        assert_eq!(op.row_nnz(4), 5);
        let a = op.to_dense();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(a[i * 9 + j], a[j * 9 + i]);
            }
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g = build_grid(Domain::interval(0.0, 1.0).unwrap(), &[5]).unwrap();
        let g2 = build_grid(Domain::interval(0.0, 1.0).unwrap(), &[6]).unwrap();
        assert!(matches!(
            assemble_operator(&g, &ScalarField::constant(g2, 0.0)),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn oracle_size_limit() {
        let op = operator(PotentialSpec::zero(), 0.0, 1.0, 2600);
        assert!(matches!(dense_oracle(&op, 2), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn box_spectrum_and_normalisation() {
        let op = operator(PotentialSpec::zero(), 0.0, PI, 2001);
        let s = lowest_two_eigenpairs(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((s.ground.eigenvalue - 1.0).abs() < 1e-3);
        assert!((s.excited.eigenvalue - 4.0).abs() < 1e-3);
        assert!((s.gap - 3.0).abs() < 2e-3);
        assert!(!s.degeneracy_flag);
        let g = *op.grid();
        let full = RegionMask::full(g);
        let u1 = &s.ground.eigenfunction;
        let u2 = &s.excited.eigenfunction;
        let sq = |f: &ScalarField| f.map(|v| v * v);
        assert!((integrate(&sq(u1), &full).unwrap() - 1.0).abs() < 1e-10);
        assert!((integrate(&sq(u2), &full).unwrap() - 1.0).abs() < 1e-10);
        let prod = ScalarField::full(g, (0..g.len()).map(|n| u1.get(n) * u2.get(n)).collect()).unwrap();
        assert!(integrate(&prod, &full).unwrap().abs() < 1e-10);
        assert!(g.interior_nodes().all(|n| u1.get(n) > 0.0));
        // u₂ = sin 2x is positive next to x = 0
        assert!(u2.get(1) > 0.0);
        // ground state matches √(2/π) sin x
        let c = libm::sqrt(2.0 / PI);
        for n in 0..g.len() {
            assert!((u1.get(n) - c * libm::sin(g.coord(n)[0])).abs() < 1e-6);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        for spec in [
            PotentialSpec::double_well(5.0, 1.0),
            PotentialSpec::harmonic(1.0),
            PotentialSpec::zero(),
        ] {
            let op = operator(spec, -3.0, 3.0, 801);
            let it = lowest_two_eigenpairs(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            let dense = dense_oracle(&op, 2).unwrap();
            assert!((it.ground.eigenvalue - dense[0]).abs() <= 1e-10 * dense[0].abs());
            assert!((it.excited.eigenvalue - dense[1]).abs() <= 1e-10 * dense[1].abs());
        }
    }

    #[test]
    fn rayleigh_quotients_match() {
        let op = operator(PotentialSpec::double_well(5.0, 1.0), -3.0, 3.0, 1001);
        let s = lowest_two_eigenpairs(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        for pair in [&s.ground, &s.excited] {
            let x = op.from_field(&pair.eigenfunction);
            let rq = op.rayleigh(&x);
            assert!((rq - pair.eigenvalue).abs() < 1e-8 * pair.eigenvalue.abs().max(1.0));
            assert!(pair.residual_norm <= DEFAULT_TOL * pair.eigenvalue.abs().max(1.0));
        }
    }

    #[test]
    fn raising_potential_never_lowers_ground_energy() {
        let base = dense_oracle(&operator(PotentialSpec::double_well(2.0, 1.0), -2.0, 2.0, 201), 1).unwrap()[0];
        let g = build_grid(Domain::interval(-2.0, 2.0).unwrap(), &[201]).unwrap();
        let v = eval_potential(&PotentialSpec::double_well(2.0, 1.0), &g).unwrap();
        let bumped = v.field().map(|x| x);
        let bumped = ScalarField::full(
            g,
            bumped
                .values()
                .iter()
                .enumerate()
                .map(|(n, x)| x + libm::exp(-(g.coord(n)[0] * g.coord(n)[0])))
                .collect(),
        )
        .unwrap();
        let raised = dense_oracle(&assemble_operator(&g, &bumped).unwrap(), 1).unwrap()[0];
        assert!(raised >= base);
    }

    #[test]
    fn box_mesh_convergence_is_second_order() {
        let err = |nodes: usize| {
            let op = operator(PotentialSpec::zero(), 0.0, PI, nodes);
            let s = lowest_two_eigenpairs(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            (s.ground.eigenvalue - 1.0).abs()
        };
        let (e1, e2, e3) = (err(101), err(201), err(401));
        for r in [e1 / e2, e2 / e3] {
            assert!((3.2..=4.8).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn small_operator_exhausts_basis() {
        let op = operator(PotentialSpec::zero(), 0.0, PI, 5);
        let s = lowest_two_eigenpairs(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        let dense = dense_oracle(&op, 2).unwrap();
        assert!((s.ground.eigenvalue - dense[0]).abs() < 1e-12 * dense[0]);
        assert!((s.excited.eigenvalue - dense[1]).abs() < 1e-12 * dense[1]);
    }
}
