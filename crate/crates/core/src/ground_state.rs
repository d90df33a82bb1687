//! The log ground state `φ = −log u₁` and the quantities built from it.
//!
//! * [`log_transform`] and [`eq11_residual`]: `φ` on the floored mask and
//!   the residual of `Δφ = |∇φ|² − V + λ₁`.
//! * [`hessian_min_eig`]: the smallest eigenvalue of `Hess φ`.
//! * [`g_proxy`]: a lower envelope `ĝ` of certified functions `f` with
//!   `λ_min(Hess V) + Δf > f²`, and [`verify_theorem_1_1`] comparing it
//!   with `Hess φ`.
//! * [`gradient_estimate_report`]: both sides of the weighted gradient
//!   estimate for `φ`, node by node.

use alloc::vec;
use alloc::vec::Vec;

use crate::cutoff::CutoffField;
use crate::fd::{central_derivatives, erode, residual_norms, ResidualNorms};
use crate::grid::{Grid, ScalarField};
use crate::math::{exp, ln, pos, sqrt};
use crate::potential::Potential;
use crate::{Error, Result};

/// Default mask floor, relative to `max u₁`.
pub const DEFAULT_FLOOR: f64 = 1e-6;

/// Value standing in for `ĝ` when no candidate is certified.
pub const DEFAULT_G_FLOOR: f64 = -1e6;

/// Required slack in `λ_min(Hess V) + Δf − f² > 0`.
pub const CERTIFICATE_MARGIN: f64 = 1e-12;

/// Fewest nodes a floored mask may keep.
pub const MIN_MASK_NODES: usize = 10;

/// `φ = −log u₁` where `u₁ ≥ floor · max u₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGroundState {
    pub phi: ScalarField,
    pub floor: f64,
}

/// Interior nodes with `u₁ ≥ floor · max u₁`.
pub(crate) fn floored_mask(u1: &ScalarField, floor: f64) -> Vec<bool> {
    let grid = u1.grid();
    let peak = grid
        .interior_nodes()
        .map(|n| u1.get(n))
        .fold(f64::NEG_INFINITY, f64::max);
    (0..grid.len())
        .map(|n| !grid.is_boundary(n) && u1.get(n) > 0.0 && u1.get(n) >= floor * peak)
        .collect()
}

pub fn log_transform(u1: &ScalarField, floor: f64) -> Result<LogGroundState> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::InvalidParameter("floor must lie in (0, 1)"));
    }
    let mask = floored_mask(u1, floor);
    let surviving = mask.iter().filter(|&&m| m).count();
    if surviving < MIN_MASK_NODES {
        return Err(Error::DegenerateGroundState { surviving });
    }
    let values = u1
        .values()
        .iter()
        .zip(&mask)
        .map(|(&u, &m)| if m { -ln(u) } else { 0.0 })
        .collect();
    Ok(LogGroundState {
        phi: ScalarField::new(*u1.grid(), values, mask)?,
        floor,
    })
}

/// Residual `Δφ − |∇φ|² + V − λ₁` on the twice-eroded mask.
pub fn eq11_residual(phi: &LogGroundState, v: &ScalarField, lambda1: f64) -> Result<ResidualNorms> {
    let grid = phi.phi.grid();
    if v.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let d = central_derivatives(&phi.phi);
    let region = erode(grid, &d.mask);
    Ok(residual_norms(grid, &region, |n| {
        d.laplacian[n] - d.grad_sq(n) + v.get(n) - lambda1
    }))
}

/// `λ_min(Hess φ)` on the once-eroded mask.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianSpectrumField {
    pub field: ScalarField,
}

impl HessianSpectrumField {
    pub fn min(&self) -> Option<(usize, f64)> {
        self.field.argmin()
    }
}

pub fn hessian_min_eig(phi: &LogGroundState) -> Result<HessianSpectrumField> {
    let d = central_derivatives(&phi.phi);
    if !d.mask.iter().any(|&m| m) {
        return Err(Error::EmptyMask);
    }
    let field = ScalarField::new(*phi.phi.grid(), d.hess_min, d.mask)?;
    Ok(HessianSpectrumField { field })
}

/// A candidate `f` for the lower envelope `ĝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Candidate {
    /// `f ≡ value`
    Constant { value: f64 },
    /// `f = amplitude · exp(−‖x − center‖²/width²)`
    Bump {
        center: [f64; 2],
        width: f64,
        amplitude: f64,
    },
    /// `f = b(‖x − center‖² − q)`
    Quadratic { center: [f64; 2], b: f64, q: f64 },
}

fn dist_sq(p: [f64; 2], c: [f64; 2], dim: usize) -> f64 {
    let dx = p[0] - c[0];
    let dy = if dim == 2 { p[1] - c[1] } else { 0.0 };
    dx * dx + dy * dy
}

impl Candidate {
    pub fn value(&self, p: [f64; 2], dim: usize) -> f64 {
        match *self {
            Candidate::Constant { value } => value,
            Candidate::Bump {
                center,
                width,
                amplitude,
            } => amplitude * exp(-dist_sq(p, center, dim) / (width * width)),
            Candidate::Quadratic { center, b, q } => b * (dist_sq(p, center, dim) - q),
        }
    }

    pub fn laplacian(&self, p: [f64; 2], dim: usize) -> f64 {
        match *self {
            Candidate::Constant { .. } => 0.0,
            Candidate::Bump {
                center,
                width,
                amplitude,
            } => {
                let r2 = dist_sq(p, center, dim);
                let w2 = width * width;
                amplitude * exp(-r2 / w2) * (4.0 * r2 / (w2 * w2) - 2.0 * dim as f64 / w2)
            }
            Candidate::Quadratic { b, .. } => 2.0 * dim as f64 * b,
        }
    }
}

/// `min` over all nodes of `λ_min(Hess V) + Δf − f²`; the candidate is
/// certified when this is at least [`CERTIFICATE_MARGIN`].
pub fn certificate_margin(v: &Potential, f: &Candidate) -> f64 {
    let grid = v.grid();
    let dim = grid.dim();
    (0..grid.len())
        .map(|n| {
            let p = grid.coord(n);
            let fv = f.value(p, dim);
            v.hess_min(n) + f.laplacian(p, dim) - fv * fv
        })
        .fold(f64::INFINITY, f64::min)
}

fn is_certified(v: &Potential, f: &Candidate) -> bool {
    let grid = v.grid();
    let dim = grid.dim();
    (0..grid.len()).all(|n| {
        let p = grid.coord(n);
        let fv = f.value(p, dim);
        v.hess_min(n) + f.laplacian(p, dim) - fv * fv >= CERTIFICATE_MARGIN
    })
}

/// Sizes of the candidate families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictionarySizes {
    pub constants: usize,
    /// At most 8.
    pub bump_centers: usize,
    pub bump_widths: usize,
    /// Split evenly between positive and negative signs.
    pub bump_amplitudes: usize,
    pub quadratic_b: usize,
    pub quadratic_q: usize,
}

impl Default for DictionarySizes {
    fn default() -> Self {
        Self {
            constants: 64,
            bump_centers: 8,
            bump_widths: 8,
            bump_amplitudes: 16,
            quadratic_b: 16,
            quadratic_q: 16,
        }
    }
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect(),
    }
}

fn geomspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    linspace(ln(lo), ln(hi), k).into_iter().map(exp).collect()
}

/// The deterministic candidate list for `V`.
pub fn dictionary(v: &Potential, sizes: &DictionarySizes) -> Vec<Candidate> {
    let grid = v.grid();
    let domain = grid.domain();
    let dim = grid.dim();
    let mut out = Vec::new();

    // Constants: a symmetric grid plus the sharpest constant ±√(inf λ_min Hess V).
    let m = (0..grid.len()).map(|n| v.hess_min(n)).fold(f64::INFINITY, f64::min);
    let span = 5.0f64.max(1.5 * sqrt(pos(m)));
    let sharp = sqrt(pos(m - 2.0 * CERTIFICATE_MARGIN)) * (1.0 - 1e-12);
    let with_sharp = sharp > 0.0 && sizes.constants >= 2;
    let grid_count = if with_sharp {
        sizes.constants - 2
    } else {
        sizes.constants
    };
    for s in linspace(-span, span, grid_count) {
        out.push(Candidate::Constant { value: s });
    }
    if with_sharp {
        out.push(Candidate::Constant { value: -sharp });
        out.push(Candidate::Constant { value: sharp });
    }

    // Bumps.
    let lo = [domain.lo(0), if dim == 2 { domain.lo(1) } else { 0.0 }];
    let len = [domain.length(0), if dim == 2 { domain.length(1) } else { 0.0 }];
    let at = |fx: f64, fy: f64| [lo[0] + fx * len[0], lo[1] + fy * len[1]];
    let hess_argmin = {
        let n = (0..grid.len())
            .min_by(|&a, &b| v.hess_min(a).total_cmp(&v.hess_min(b)).then(a.cmp(&b)))
            .unwrap_or(0);
        grid.coord(n)
    };
    let centers: Vec<[f64; 2]> = if dim == 1 {
        let mut c: Vec<[f64; 2]> = (1..=7).map(|k| at(k as f64 / 8.0, 0.0)).collect();
        c.push([hess_argmin[0], 0.0]);
        c
    } else {
        vec![
            at(0.5, 0.5),
            hess_argmin,
            at(0.25, 0.25),
            at(0.75, 0.25),
            at(0.25, 0.75),
            at(0.75, 0.75),
            at(0.25, 0.5),
            at(0.75, 0.5),
        ]
    };
    let scale = len[0].max(len[1]);
    let widths = geomspace(scale / 64.0, scale / 2.0, sizes.bump_widths);
    let half = sizes.bump_amplitudes / 2;
    let magnitudes = geomspace(1e-2, 1e1, half);
    for &center in centers.iter().take(sizes.bump_centers.min(8)) {
        for &width in &widths {
            for &a in &magnitudes {
                for amplitude in [a, -a] {
                    out.push(Candidate::Bump {
                        center,
                        width,
                        amplitude,
                    });
                }
            }
        }
    }

    // Quadratics centred in the domain.
    let center = domain.center();
    let r2 = (0..dim).map(|a| 0.25 * len[a] * len[a]).sum::<f64>();
    for &b in &geomspace(1e-3, 1e1, sizes.quadratic_b) {
        for q in linspace(0.0, r2, sizes.quadratic_q) {
            out.push(Candidate::Quadratic { center, b, q });
        }
    }
    out
}

/// A certified candidate and its margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub candidate: Candidate,
    pub margin: f64,
}

/// The envelope `ĝ(x) = max f(x)` over certified candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct GProxy {
    /// `ĝ`, or `g_floor` everywhere when `sentinel` is set.
    pub g: ScalarField,
    /// No candidate was certified.
    pub sentinel: bool,
    pub g_floor: f64,
    pub certified: Vec<Certificate>,
    pub tested: usize,
}

pub fn g_proxy(v: &Potential, sizes: &DictionarySizes, g_floor: f64) -> GProxy {
    g_proxy_from(v, &dictionary(v, sizes), g_floor)
}

/// `ĝ` over an explicit candidate list.
pub fn g_proxy_from(v: &Potential, candidates: &[Candidate], g_floor: f64) -> GProxy {
    let grid = *v.grid();
    let dim = grid.dim();
    let mut g = vec![f64::NEG_INFINITY; grid.len()];
    let mut certified = Vec::new();
    for f in candidates {
        if !is_certified(v, f) {
            continue;
        }
        for (n, gn) in g.iter_mut().enumerate() {
            *gn = gn.max(f.value(grid.coord(n), dim));
        }
        certified.push(Certificate {
            candidate: *f,
            margin: certificate_margin(v, f),
        });
    }
    let sentinel = certified.is_empty();
    if sentinel {
        g.iter_mut().for_each(|x| *x = g_floor);
    }
    GProxy {
        g: ScalarField::full(grid, g).expect("sizes match"),
        sentinel,
        g_floor,
        certified,
        tested: candidates.len(),
    }
}

/// `inf (λ_min(Hess φ) − ĝ)` over the Hessian mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianMargin {
    pub margin: f64,
    pub node: usize,
}

pub fn verify_theorem_1_1(hess: &HessianSpectrumField, gproxy: &GProxy) -> Result<HessianMargin> {
    if gproxy.sentinel {
        return Err(Error::SentinelG);
    }
    floored_margin(hess, gproxy)
}

/// As [`verify_theorem_1_1`], but also accepting the sentinel `ĝ ≡ g_floor`.
pub fn floored_margin(hess: &HessianSpectrumField, gproxy: &GProxy) -> Result<HessianMargin> {
    if hess.field.grid() != gproxy.g.grid() {
        return Err(Error::GridMismatch);
    }
    hess.field
        .valid_nodes()
        .map(|n| (n, hess.field.get(n) - gproxy.g.get(n)))
        .fold(None, |best: Option<(usize, f64)>, (n, m)| match best {
            Some((_, b)) if b <= m => best,
            _ => Some((n, m)),
        })
        .map(|(node, margin)| HessianMargin { margin, node })
        .ok_or(Error::EmptyMask)
}

/// Pointwise comparison of the gradient estimate for `φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimateReport {
    /// Nodes of the twice-eroded mask where both sides were evaluated.
    pub nodes: usize,
    pub sup_lhs: f64,
    pub sup_rhs: f64,
    /// `LHS ≤ RHS` at every evaluated node.
    pub holds: bool,
    /// Node of smallest `RHS − LHS`, and that value.
    pub worst_node: Option<usize>,
    pub worst_margin: f64,
    /// `sup G` with `G = ρ²(V+α)⁻¹Δφ`.
    pub sup_g: f64,
    /// `max |LHS − G + ρ²(V+α)⁻¹ r|` with `r` the residual of `Δφ = |∇φ|² − V + λ₁`.
    pub identity_defect: f64,
    /// `(V − λ₁)^{1/2}` was clamped at some node.
    pub clamped_sqrt: bool,
    pub particular: ParticularEstimate,
}

/// The global form: `ρ²(V+α)⁻¹|∇φ|²` against a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticularEstimate {
    pub sup_lhs: f64,
    pub rhs: f64,
    /// `(sup V − λ₁)/(sup V + α)`, the `10n²` cutoff term, the `3n`
    /// potential term and the `6n` square-root term.
    pub terms: [f64; 4],
    pub holds: bool,
    /// `sup V − λ₁ < 0`, so the square root was clamped at zero.
    pub clamped_sqrt: bool,
}

pub fn gradient_estimate_report(
    phi: &LogGroundState,
    v: &Potential,
    rho: &CutoffField,
    alpha: f64,
    lambda1: f64,
    n: usize,
) -> Result<GradientEstimateReport> {
    let grid: &Grid = phi.phi.grid();
    if v.grid() != grid || rho.grid() != grid {
        return Err(Error::GridMismatch);
    }
    if !rho.vanishes_on_boundary() {
        return Err(Error::UnsupportedRho);
    }
    let min_shifted = v.inf() + alpha;
    if !(min_shifted > 0.0) {
        return Err(Error::NonpositiveShift { min: min_shifted });
    }
    let nf = n as f64;
    let d = central_derivatives(&phi.phi);
    let region = erode(grid, &d.mask);

    let mut out = GradientEstimateReport {
        nodes: 0,
        sup_lhs: f64::NEG_INFINITY,
        sup_rhs: f64::NEG_INFINITY,
        holds: true,
        worst_node: None,
        worst_margin: f64::INFINITY,
        sup_g: f64::NEG_INFINITY,
        identity_defect: 0.0,
        clamped_sqrt: false,
        particular: ParticularEstimate {
            sup_lhs: f64::NEG_INFINITY,
            rhs: 0.0,
            terms: [0.0; 4],
            holds: true,
            clamped_sqrt: false,
        },
    };

    // Constant right-hand side of the global form, suprema over all nodes.
    let sup_v = v.sup();
    let ratio = (sup_v - lambda1) / (sup_v + alpha);
    let mut sup_cut = 0.0f64;
    let mut sup_pot = 0.0f64;
    let mut sup_inv_sqrt = 0.0f64;
    for k in 0..grid.len() {
        let w = v.value(k) + alpha;
        sup_cut = sup_cut.max(rho.log_term(k) / w);
        sup_pot = sup_pot.max(v.laplacian_pos(k) / (w * w) + v.grad_sq(k) / (w * w * w));
        sup_inv_sqrt = sup_inv_sqrt.max(1.0 / sqrt(w));
    }
    let terms = [
        ratio,
        10.0 * nf * nf * sup_cut,
        3.0 * nf * sup_pot,
        6.0 * nf * sup_inv_sqrt * sqrt(pos(ratio)),
    ];
    out.particular.terms = terms;
    out.particular.rhs = terms.iter().sum();
    out.particular.clamped_sqrt = ratio < 0.0;

    for k in (0..grid.len()).filter(|&k| region[k]) {
        let vk = v.value(k);
        let w = vk + alpha;
        let r = rho.value(k);
        let weight = r * r / w;
        let grad_phi_sq = d.grad_sq(k);
        let lhs = weight * (grad_phi_sq - vk + lambda1);
        let grad_log_v_sq = v.grad_sq(k) / (w * w);
        let lap_log_v = v.laplacian(k) / w - grad_log_v_sq;
        let root = vk - lambda1;
        if root < 0.0 {
            out.clamped_sqrt = true;
        }
        let rhs = 10.0 * nf * rho.log_term(k) / w
            + 1.5 * nf * weight * (pos(lap_log_v) + 2.0 * grad_log_v_sq + 4.0 * sqrt(pos(root)));
        let g = weight * d.laplacian[k];
        let residual = d.laplacian[k] - grad_phi_sq + vk - lambda1;

        out.nodes += 1;
        out.sup_lhs = out.sup_lhs.max(lhs);
        out.sup_rhs = out.sup_rhs.max(rhs);
        out.sup_g = out.sup_g.max(g);
        out.identity_defect = out.identity_defect.max((lhs - g + weight * residual).abs());
        let margin = rhs - lhs;
        if margin < out.worst_margin {
            out.worst_margin = margin;
            out.worst_node = Some(k);
        }
        if lhs > rhs + 1e-12 * rhs.abs().max(1.0) {
            out.holds = false;
        }
        let lhs_p = weight * grad_phi_sq;
        out.particular.sup_lhs = out.particular.sup_lhs.max(lhs_p);
    }
    if out.nodes == 0 {
        return Err(Error::EmptyMask);
    }
    let rhs_p = out.particular.rhs;
    out.particular.holds = out.particular.sup_lhs <= rhs_p + 1e-12 * rhs_p.abs().max(1.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{assemble_operator, lowest_two_eigenpairs, DEFAULT_MAX_ITER, DEFAULT_TOL};
    use crate::grid::{build_grid, inner_region, Domain};
    use crate::potential::{eval_potential, PotentialSpec};
    use core::f64::consts::PI;

    fn ground(spec: PotentialSpec, lo: f64, hi: f64, nodes: usize) -> (Potential, ScalarField, f64) {
        let g = build_grid(Domain::interval(lo, hi).unwrap(), &[nodes]).unwrap();
        let v = eval_potential(&spec, &g).unwrap();
        let op = assemble_operator(&g, v.field()).unwrap();
        let s = lowest_two_eigenpairs(&op, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        (v, s.ground.eigenfunction, s.ground.eigenvalue)
    }

    fn exact_box_ground(nodes: usize) -> ScalarField {
        let g = build_grid(Domain::interval(0.0, PI).unwrap(), &[nodes]).unwrap();
        let c = libm::sqrt(2.0 / PI);
        ScalarField::from_fn(g, |p| c * libm::sin(p[0]))
    }

    #[test]
    fn box_log_transform_midpoint() {
        let u = exact_box_ground(2001);
        let phi = log_transform(&u, DEFAULT_FLOOR).unwrap();
        assert!((phi.phi.get(1000) + libm::log(libm::sqrt(2.0 / PI))).abs() < 1e-12);
        assert!((phi.phi.get(1000) - 0.2258).abs() < 1e-4);
        assert!(!phi.phi.is_valid(0) && !phi.phi.is_valid(2000));
        // sin x ≥ 1e-6·max keeps every interior node at this resolution
        assert!(phi.phi.is_valid(1));
    }

    #[test]
    fn floor_masks_near_boundary() {
        let u = exact_box_ground(2001);
        let phi = log_transform(&u, 0.05).unwrap();
        let g = phi.phi.grid();
        for n in 0..g.len() {
            let near = libm::sin(g.coord(n)[0]) < 0.05;
            if near {
                assert!(!phi.phi.is_valid(n));
            }
        }
    }

    #[test]
    fn degenerate_floor_rejected() {
        let g = build_grid(Domain::interval(0.0, 1.0).unwrap(), &[8]).unwrap();
        let u = ScalarField::from_fn(g, |p| libm::sin(PI * p[0]));
        assert!(matches!(
            log_transform(&u, 1e-6),
            Err(Error::DegenerateGroundState { surviving: 6 })
        ));
        assert!(log_transform(&u, 1.5).is_err());
    }

    #[test]
    fn rescaling_shifts_phi_and_keeps_hessian() {
        let u = exact_box_ground(401);
        let scaled = u.map(|x| 3.0 * x);
        let a = log_transform(&u, 1e-3).unwrap();
        let b = log_transform(&scaled, 1e-3).unwrap();
        for n in a.phi.valid_nodes() {
            assert!((a.phi.get(n) - b.phi.get(n) - libm::log(3.0)).abs() < 1e-12);
        }
        let ha = hessian_min_eig(&a).unwrap();
        let hb = hessian_min_eig(&b).unwrap();
        for n in ha.field.valid_nodes() {
            assert!((ha.field.get(n) - hb.field.get(n)).abs() < 1e-6 * ha.field.get(n).abs());
        }
        let v = ScalarField::constant(*u.grid(), 0.0);
        let ra = eq11_residual(&a, &v, 1.0).unwrap();
        let rb = eq11_residual(&b, &v, 1.0).unwrap();
        assert!((ra.sup - rb.sup).abs() < 1e-6 * ra.sup.max(1.0));
    }

    #[test]
    fn box_hessian_minimum_is_one() {
        let (_, u1, _) = ground(PotentialSpec::zero(), 0.0, PI, 2001);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let (node, min) = hessian_min_eig(&phi).unwrap().min().unwrap();
        assert!((min - 1.0).abs() < 1e-3, "min {min}");
        assert!((phi.phi.grid().coord(node)[0] - PI / 2.0).abs() < 0.1);
    }

    #[test]
    fn harmonic_hessian_is_near_one() {
        let (_, u1, _) = ground(PotentialSpec::harmonic(1.0), -10.0, 10.0, 4001);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let h = hessian_min_eig(&phi).unwrap();
        assert!(h.min().unwrap().1 >= 0.999);
    }

    #[test]
    fn residual_of_exact_box_ground_state_is_second_order() {
        // nested grids and a fixed region keep the comparison set in place
        let sup = |nodes: usize| {
            let u = exact_box_ground(nodes);
            let phi = log_transform(&u, DEFAULT_FLOOR).unwrap();
            let g = *u.grid();
            let core = inner_region(&g, 0.25);
            let restricted = LogGroundState {
                phi: phi.phi.restricted(core.member()),
                floor: phi.floor,
            };
            eq11_residual(&restricted, &ScalarField::constant(g, 0.0), 1.0).unwrap().sup
        };
        let (a, b, c) = (sup(251), sup(501), sup(1001));
        for r in [a / b, b / c] {
            assert!((3.2..=4.8).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn constant_dictionary_matches_hessian_bound() {
        let (v, _, _) = ground(PotentialSpec::harmonic(1.0), -3.0, 3.0, 301);
        assert!(certificate_margin(&v, &Candidate::Constant { value: 1.41 }) > 0.0);
        assert!(certificate_margin(&v, &Candidate::Constant { value: 1.42 }) < 0.0);
        let gp = g_proxy(&v, &DictionarySizes::default(), DEFAULT_G_FLOOR);
        assert!(!gp.sentinel);
        assert!(gp.g.min().unwrap() >= 1.41);
        for c in &gp.certified {
            assert!(certificate_margin(&v, &c.candidate) >= CERTIFICATE_MARGIN);
        }
    }

    #[test]
    fn box_quadratic_certificate() {
        let g = build_grid(Domain::interval(0.0, PI).unwrap(), &[401]).unwrap();
        let v = eval_potential(&PotentialSpec::zero(), &g).unwrap();
        let q = PI * PI / 8.0;
        let center = [PI / 2.0, 0.0];
        // admissible for b below 2/(π⁴/64)
        let limit = 2.0 / (PI.powi(4) / 64.0);
        assert!((limit - 1.3140).abs() < 1e-3);
        assert!(certificate_margin(&v, &Candidate::Quadratic { center, b: 1.3, q }) > 0.0);
        assert!(certificate_margin(&v, &Candidate::Quadratic { center, b: 1.33, q }) < 0.0);
        // no constant is admissible
        assert!(certificate_margin(&v, &Candidate::Constant { value: 0.0 }) < CERTIFICATE_MARGIN);
        let gp = g_proxy(&v, &DictionarySizes::default(), DEFAULT_G_FLOOR);
        assert!(!gp.sentinel);
        assert!(gp
            .certified
            .iter()
            .all(|c| !matches!(c.candidate, Candidate::Constant { .. })));
    }

    #[test]
    fn dictionary_search_oracle() {
        // brute-force (b, q) search for the box, independent of the dictionary
        let g = build_grid(Domain::interval(0.0, PI).unwrap(), &[201]).unwrap();
        let v = eval_potential(&PotentialSpec::zero(), &g).unwrap();
        let center = [PI / 2.0, 0.0];
        for i in 1..20 {
            for j in 0..20 {
                let b = 0.1 * i as f64;
                let q = PI * PI / 4.0 * j as f64 / 19.0;
                let admissible = (0..g.len()).all(|n| {
                    let x = g.coord(n)[0] - PI / 2.0;
                    let f = b * (x * x - q);
                    2.0 * b - f * f >= CERTIFICATE_MARGIN
                });
                let margin = certificate_margin(&v, &Candidate::Quadratic { center, b, q });
                assert_eq!(admissible, margin >= CERTIFICATE_MARGIN);
            }
        }
    }

    #[test]
    fn larger_dictionary_never_lowers_envelope() {
        let (v, _, _) = ground(PotentialSpec::harmonic(0.5), -3.0, 3.0, 201);
        let all = dictionary(&v, &DictionarySizes::default());
        let small = g_proxy_from(&v, &all[..all.len() / 3], DEFAULT_G_FLOOR);
        let large = g_proxy_from(&v, &all, DEFAULT_G_FLOOR);
        for n in 0..v.grid().len() {
            assert!(large.g.get(n) >= small.g.get(n));
        }
    }

    #[test]
    fn double_well_constants_inadmissible() {
        let (v, _, _) = ground(PotentialSpec::double_well(5.0, 1.0), -3.0, 3.0, 601);
        assert!((v.hess_min(300) + 20.0).abs() < 1e-9);
        let dict = dictionary(&v, &DictionarySizes::default());
        let consts: Vec<_> = dict
            .iter()
            .filter(|c| matches!(c, Candidate::Constant { .. }))
            .collect();
        assert_eq!(consts.len(), 64);
        let gp = g_proxy(&v, &DictionarySizes::default(), DEFAULT_G_FLOOR);
        assert!(gp
            .certified
            .iter()
            .all(|c| !matches!(c.candidate, Candidate::Constant { .. })));
        if gp.sentinel {
            assert!(gp.g.values().iter().all(|&x| x == DEFAULT_G_FLOOR));
        }
    }

    #[test]
    fn theorem_1_1_margins() {
        let (v, u1, _) = ground(PotentialSpec::harmonic(1.0), -10.0, 10.0, 2001);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let h = hessian_min_eig(&phi).unwrap();
        let gp = g_proxy(&v, &DictionarySizes::default(), DEFAULT_G_FLOOR);
        let m = verify_theorem_1_1(&h, &gp).unwrap();
        // Hess φ ≈ 1 while ĝ ≈ √2: the constant family overshoots
        assert!(m.margin >= -0.45 && m.margin < 0.0, "margin {}", m.margin);

        let (v, u1, _) = ground(PotentialSpec::zero(), 0.0, PI, 401);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let h = hessian_min_eig(&phi).unwrap();
        let gp = g_proxy(&v, &DictionarySizes::default(), DEFAULT_G_FLOOR);
        assert!(verify_theorem_1_1(&h, &gp).unwrap().margin > 0.0);

        let empty = g_proxy_from(&v, &[], DEFAULT_G_FLOOR);
        assert!(empty.sentinel);
        assert!(matches!(verify_theorem_1_1(&h, &empty), Err(Error::SentinelG)));
        assert!(floored_margin(&h, &empty).unwrap().margin > 1e5);
    }

    #[test]
    fn gradient_estimate_zero_cutoff_is_vacuous() {
        let (v, u1, l1) = ground(PotentialSpec::zero(), 0.0, PI, 401);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let rho = CutoffField::zero(v.grid());
        let r = gradient_estimate_report(&phi, &v, &rho, 1.0, l1, 1).unwrap();
        assert_eq!(r.sup_lhs, 0.0);
        assert_eq!(r.sup_rhs, 0.0);
        assert!(r.holds);
    }

    #[test]
    fn gradient_estimate_box_with_cutoff() {
        let (v, u1, l1) = ground(PotentialSpec::zero(), 0.0, PI, 2001);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let rho = CutoffField::with_width(v.grid(), 0.5).unwrap();
        let r = gradient_estimate_report(&phi, &v, &rho, 1.0, l1, 1).unwrap();
        assert!(r.sup_lhs.is_finite() && r.sup_rhs.is_finite());
        assert!(r.identity_defect < 1e-10);
        assert!(r.clamped_sqrt);
    }

    #[test]
    fn gradient_estimate_rejects_unsupported_cutoff() {
        let (v, u1, l1) = ground(PotentialSpec::zero(), 0.0, PI, 201);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let rho = CutoffField::constant(v.grid(), 1.0);
        assert!(matches!(
            gradient_estimate_report(&phi, &v, &rho, 1.0, l1, 1),
            Err(Error::UnsupportedRho)
        ));
    }

    #[test]
    fn g_identity_for_constant_potential() {
        // V ≡ 3: wherever the residual is negligible LHS equals G
        let (v, u1, l1) = ground(PotentialSpec::zero().shifted(3.0), 0.0, PI, 2001);
        let phi = log_transform(&u1, DEFAULT_FLOOR).unwrap();
        let rho = CutoffField::with_width(v.grid(), 0.5).unwrap();
        let r = gradient_estimate_report(&phi, &v, &rho, 1.0, l1, 1).unwrap();
        assert!(r.identity_defect < 1e-10);
        let d = central_derivatives(&phi.phi);
        let region = erode(v.grid(), &d.mask);
        for k in (0..v.grid().len()).filter(|&k| region[k]) {
            let res = d.laplacian[k] - d.grad_sq(k) + 3.0 - l1;
            if res.abs() <= 1e-8 {
                let w = rho.value(k) * rho.value(k) / 4.0;
                let lhs = w * (d.grad_sq(k) - 3.0 + l1);
                assert!((lhs - w * d.laplacian[k]).abs() <= 1e-8);
            }
        }
    }
}
