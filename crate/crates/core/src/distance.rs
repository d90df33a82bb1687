//! Weighted-metric distances: `d_α` with density `√(V+α)`, the cutoff
//! weighted `L(ρ,α,δ)` with density `ρ⁻¹√(V+α)`, the diameter `L(Ω)` and
//! the anchor pair `(x₀, x₁)`.
//!
//! 1D distances integrate the density exactly by the trapezoid rule along
//! the line. 2D distances use first-order fast marching whose relative error
//! budget is [`TOL_FM`].

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::fd::central_derivatives;
use crate::grid::{Grid, RegionMask, ScalarField};
use crate::math::{hypot, sqrt};
use crate::potential::Potential;
use crate::ratio::RatioState;
use crate::{Error, Result};

/// Relative error budget of 2D fast marching.
pub const TOL_FM: f64 = 0.02;

/// Cutoff values at or below this are outside `supp ρ`.
pub const RHO_MIN: f64 = 1e-8;

/// Nodes within this many cells of a 2D source start from the straight-line
/// distance.
pub const SOURCE_RADIUS: usize = 6;

/// Maximum number of level-tolerance doublings in [`locate_anchors`].
pub const MAX_LEVEL_WIDENINGS: usize = 10;

/// Metric density, `+∞` outside its support.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightField {
    pub w: ScalarField,
}

impl WeightField {
    pub fn new(w: ScalarField) -> Result<Self> {
        if w.values().iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative"));
        }
        Ok(Self { w })
    }

    pub fn grid(&self) -> &Grid {
        self.w.grid()
    }

    fn at(&self, n: usize) -> f64 {
        self.w.get(n)
    }

    /// Same density multiplied by `k > 0`.
    pub fn scaled(&self, k: f64) -> Self {
        Self { w: self.w.map(|x| k * x) }
    }
}

/// `√(V+α)`; fails when `V+α` is negative somewhere.
pub fn metric_weight(v: &Potential, alpha: f64) -> Result<WeightField> {
    let min = v.inf() + alpha;
    if min < 0.0 {
        return Err(Error::NonpositiveShift { min });
    }
    Ok(WeightField {
        w: v.field().map(|x| sqrt((x + alpha).max(0.0))),
    })
}

/// `ρ⁻¹√(V+α)` on `ρ > RHO_MIN`, `+∞` elsewhere.
pub fn cutoff_weight(v: &Potential, alpha: f64, rho: &ScalarField) -> Result<WeightField> {
    if rho.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let base = metric_weight(v, alpha)?;
    let w = (0..v.grid().len())
        .map(|n| {
            let r = rho.get(n);
            if r > RHO_MIN {
                base.at(n) / r
            } else {
                f64::INFINITY
            }
        })
        .collect();
    Ok(WeightField {
        w: ScalarField::full(*v.grid(), w)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    /// `+∞` at nodes unreachable through the support of the density.
    pub d: ScalarField,
    pub sources: Vec<usize>,
}

impl DistanceField {
    pub fn at(&self, n: usize) -> f64 {
        self.d.get(n)
    }

    /// Largest finite distance.
    pub fn max_finite(&self) -> f64 {
        self.d
            .values()
            .iter()
            .copied()
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on distance, then on node index
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Distance from `sources` under density `w`.
pub fn fast_march(w: &WeightField, sources: &[usize]) -> Result<DistanceField> {
    fast_march_in(w, sources, SOURCE_RADIUS)
}

fn fast_march_in(w: &WeightField, sources: &[usize], radius: usize) -> Result<DistanceField> {
    let grid = *w.grid();
    if sources.is_empty() {
        return Err(Error::EmptySource);
    }
    for &s in sources {
        if s >= grid.len() || !w.at(s).is_finite() {
            return Err(Error::AnchorOutsideSupport { node: s });
        }
    }
    let d = if grid.dim() == 1 {
        sweep_1d(&grid, w, sources)
    } else {
        march_2d(&grid, w, sources, radius)
    };
    let mut sources = sources.to_vec();
    sources.sort_unstable();
    sources.dedup();
    Ok(DistanceField {
        d: ScalarField::full(grid, d)?,
        sources,
    })
}

fn sweep_1d(grid: &Grid, w: &WeightField, sources: &[usize]) -> Vec<f64> {
    let n = grid.len();
    let h = grid.spacing(0);
    let mut d = vec![f64::INFINITY; n];
    for &s in sources {
        d[s] = 0.0;
    }
    let step = |a: usize, b: usize| 0.5 * h * (w.at(a) + w.at(b));
    for i in 1..n {
        if w.at(i).is_finite() {
            d[i] = d[i].min(d[i - 1] + step(i - 1, i));
        }
    }
    for i in (0..n - 1).rev() {
        if w.at(i).is_finite() {
            d[i] = d[i].min(d[i + 1] + step(i, i + 1));
        }
    }
    d
}

fn march_2d(grid: &Grid, w: &WeightField, sources: &[usize], radius: usize) -> Vec<f64> {
    let n = grid.len();
    let (nx, ny) = (grid.nodes(0), grid.nodes(1));
    let (hx, hy) = (grid.spacing(0), grid.spacing(1));
    let mut d = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        d[s] = 0.0;
        heap.push(Entry(0.0, s));
        let (si, sj) = grid.ij(s);
        let ps = grid.coord(s);
        for j in sj.saturating_sub(radius)..(sj + radius + 1).min(ny) {
            for i in si.saturating_sub(radius)..(si + radius + 1).min(nx) {
                let k = grid.index(i, j);
                if !w.at(k).is_finite() {
                    continue;
                }
                let p = grid.coord(k);
                let guess = 0.5 * (w.at(s) + w.at(k)) * hypot(p[0] - ps[0], p[1] - ps[1]);
                if guess < d[k] {
                    d[k] = guess;
                    heap.push(Entry(guess, k));
                }
            }
        }
    }
    while let Some(Entry(dist, k)) = heap.pop() {
        if done[k] || dist > d[k] {
            continue;
        }
        done[k] = true;
        for m in grid.neighbors(k) {
            if done[m] || !w.at(m).is_finite() {
                continue;
            }
            let cand = upwind(grid, &d, &done, m, w.at(m), hx, hy);
            if cand < d[m] {
                d[m] = cand;
                heap.push(Entry(cand, m));
            }
        }
    }
    d
}

/// Two-neighbour upwind solve of `((t−a)/hx)² + ((t−b)/hy)² = w²`.
fn upwind(grid: &Grid, d: &[f64], done: &[bool], m: usize, wm: f64, hx: f64, hy: f64) -> f64 {
    let (i, j) = grid.ij(m);
    let (nx, ny) = (grid.nodes(0), grid.nodes(1));
    let known = |k: usize| if done[k] { d[k] } else { f64::INFINITY };
    let mut a = f64::INFINITY;
    if i > 0 {
        a = a.min(known(m - 1));
    }
    if i + 1 < nx {
        a = a.min(known(m + 1));
    }
    let mut b = f64::INFINITY;
    if j > 0 {
        b = b.min(known(m - nx));
    }
    if j + 1 < ny {
        b = b.min(known(m + nx));
    }
    let one_sided = (a + hx * wm).min(b + hy * wm);
    if !a.is_finite() || !b.is_finite() {
        return one_sided;
    }
    let (p, q) = (1.0 / (hx * hx), 1.0 / (hy * hy));
    let qa = p + q;
    let qb = -2.0 * (a * p + b * q);
    let qc = a * a * p + b * b * q - wm * wm;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return one_sided;
    }
    let t = (-qb + sqrt(disc)) / (2.0 * qa);
    if t >= a.max(b) {
        t.min(one_sided)
    } else {
        one_sided
    }
}

/// `d_α(x₀, x₁)`.
pub fn d_alpha(v: &Potential, alpha: f64, x0: usize, x1: usize) -> Result<f64> {
    Ok(d_alpha_field(v, alpha, x0)?.at(x1))
}

/// `d_α(x₀, ·)` on the whole grid.
pub fn d_alpha_field(v: &Potential, alpha: f64, x0: usize) -> Result<DistanceField> {
    fast_march(&metric_weight(v, alpha)?, &[x0])
}

/// `L(ρ,α,δ)` between the anchors, paths confined to `supp ρ`.
pub fn l_functional(v: &Potential, alpha: f64, rho: &ScalarField, x0: usize, x1: usize) -> Result<f64> {
    for x in [x0, x1] {
        if x >= rho.grid().len() || !(rho.get(x) > RHO_MIN) {
            return Err(Error::AnchorOutsideSupport { node: x });
        }
    }
    let w = cutoff_weight(v, alpha, rho)?;
    Ok(fast_march(&w, &[x0])?.at(x1))
}

/// Diameter of a node set in the `√(V+α)` metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LOmega {
    pub value: f64,
    pub stride: usize,
    /// Number of source nodes marched from.
    pub sources: usize,
    /// Nodes of the region.
    pub nodes: usize,
}

impl LOmega {
    /// The sup over pairs was taken exactly.
    pub fn exact(&self) -> bool {
        self.stride == 1
    }
}

/// `L(Ω) = sup d_α(x, y)` with sources subsampled by `stride` per axis.
pub fn l_omega(v: &Potential, alpha: f64, stride: usize) -> Result<LOmega> {
    l_omega_in(v, alpha, &RegionMask::full(*v.grid()), stride)
}

/// `L` of a region with paths confined to it.
pub fn l_omega_in(v: &Potential, alpha: f64, region: &RegionMask, stride: usize) -> Result<LOmega> {
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1"));
    }
    let grid = *v.grid();
    if region.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let base = metric_weight(v, alpha)?;
    let w = (0..grid.len())
        .map(|n| if region.contains(n) { base.at(n) } else { f64::INFINITY })
        .collect();
    let w = WeightField {
        w: ScalarField::full(grid, w)?,
    };
    let sources = strided_nodes(region, stride);
    let mut value = 0.0f64;
    for &s in &sources {
        value = value.max(fast_march(&w, &[s])?.max_finite());
    }
    Ok(LOmega {
        value,
        stride,
        sources: sources.len(),
        nodes: region.count(),
    })
}

/// Region nodes whose index along every axis, counted from the region's
/// first row and column, is a multiple of `stride`.
fn strided_nodes(region: &RegionMask, stride: usize) -> Vec<usize> {
    let grid = region.grid();
    let mut lo = [usize::MAX; 2];
    for n in region.nodes() {
        let (i, j) = grid.ij(n);
        lo[0] = lo[0].min(i);
        lo[1] = lo[1].min(j);
    }
    region
        .nodes()
        .filter(|&n| {
            let (i, j) = grid.ij(n);
            (i - lo[0]) % stride == 0 && (j - lo[1]) % stride == 0
        })
        .collect()
}

/// Argmax of `u` and a node on the `δ` level set of `u/sup u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorPair {
    pub x0: usize,
    pub x1: usize,
    pub delta: f64,
    /// `u(x₁)/sup u`.
    pub level: f64,
    /// `d_α(x₀, x₁)`.
    pub distance: f64,
    /// Level tolerance after widening.
    pub level_tol: f64,
    pub widenings: usize,
}

/// Anchors for `δ`: `x₀ = argmax u` and `x₁` on the `δ` level set.
///
/// Nodes with `|u/sup u − δ| ≤ tol` are grouped into connected pieces; each
/// piece contributes its node closest to the level, and among those the one
/// nearest to `x₀` in `d_α` wins.
pub fn locate_anchors(state: &RatioState, delta: f64, v: &Potential, alpha: f64) -> Result<AnchorPair> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1)"));
    }
    let u = &state.u;
    let grid = *u.grid();
    if v.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let x0 = state.argmax;
    let dist = d_alpha_field(v, alpha, x0)?;
    let du = central_derivatives(u);
    let max_grad = (0..grid.len())
        .filter(|&n| du.mask[n])
        .map(|n| sqrt(du.grad_sq(n)))
        .fold(0.0, f64::max);
    let mut tol = 2.0 * grid.max_spacing() * max_grad / state.sup_u;
    if !(tol > 0.0) {
        tol = grid.max_spacing();
    }
    let err = |n: usize| (u.get(n) / state.sup_u - delta).abs();
    for widenings in 0..=MAX_LEVEL_WIDENINGS {
        let band: Vec<bool> = (0..grid.len()).map(|n| u.is_valid(n) && err(n) <= tol).collect();
        let mut seen = vec![false; grid.len()];
        let mut best: Option<(f64, f64, usize)> = None;
        for start in 0..grid.len() {
            if !band[start] || seen[start] {
                continue;
            }
            let rep = piece_representative(&grid, &band, &mut seen, start, err);
            let key = (dist.at(rep), err(rep), rep);
            let better = match best {
                None => true,
                Some(b) => key.0 < b.0 || (key.0 == b.0 && (key.1, key.2) < (b.1, b.2)),
            };
            if better {
                best = Some(key);
            }
        }
        if let Some((distance, _, x1)) = best {
            return Ok(AnchorPair {
                x0,
                x1,
                delta,
                level: u.get(x1) / state.sup_u,
                distance,
                level_tol: tol,
                widenings,
            });
        }
        tol *= 2.0;
    }
    Err(Error::NoLevelNodes)
}

/// Node of minimal level error in the connected piece of `band` at `start`.
fn piece_representative(
    grid: &Grid,
    band: &[bool],
    seen: &mut [bool],
    start: usize,
    err: impl Fn(usize) -> f64,
) -> usize {
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut rep = start;
    while let Some(k) = queue.pop_front() {
        if err(k) < err(rep) || (err(k) == err(rep) && k < rep) {
            rep = k;
        }
        for m in grid.neighbors(k) {
            if band[m] && !seen[m] {
                seen[m] = true;
                queue.push_back(m);
            }
        }
    }
    rep
}
