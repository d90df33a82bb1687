//! grid → potential → eigensolve → analyses → bounds → oscillation.

use std::collections::BTreeMap;

use gaplab_core::bounds::{
    alpha_grid, best_bound, bracket, epsilon_from_potential, l_delta, theorem_4_1_bound, theorem_6_1_bound,
    BracketTerms, CTildeRecipe, EpsilonBoundInput, EpsilonResult, GapBoundReport, HypothesisFlag, LDeltaContext,
    LDeltaResult,
};
use gaplab_core::cutoff::{build_cutoff, cutoff_for_kappa, CutoffField};
use gaplab_core::distance::{d_alpha, d_alpha_field, l_omega, l_omega_in, locate_anchors, AnchorPair, LOmega};
use gaplab_core::eigen::{assemble_operator, lowest_two_eigenpairs, EigenPair, SpectralResult};
use gaplab_core::fd::ResidualNorms;
use gaplab_core::grid::{inner_region, Grid, ScalarField};
use gaplab_core::ground_state::{
    eq11_residual, floored_margin, g_proxy, gradient_estimate_report, hessian_min_eig, log_transform,
    verify_theorem_1_1, GProxy, LogGroundState,
};
use gaplab_core::oscillation::{check_section5, InequalityEntry, OscillationInputs, OscillationReport, Relation};
use gaplab_core::potential::{eval_potential, potential_stats, Potential};
use gaplab_core::ratio::{
    classify_theorem_3_1, eq31_residual, f_functional, psi_residual, ratio_field, CaseContext, CaseReport,
    RatioState,
};
use serde_json::Value;

use crate::config::{CTildeConfig, Mode, RunConfig};
use crate::error::{GaplabError, Result};
use crate::report::{coords, num_array, Obj, SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION};

/// Identifiers of the fields a run retains for CSV export.
pub const FIELD_IDS: [&str; 9] = ["V", "u1", "u2", "u", "phi", "psi", "F", "rho", "d_alpha"];

/// Sources per axis targeted by the automatic `L(Ω)` stride in 2D.
const AUTO_SOURCES_PER_AXIS: usize = 8;

/// Cutoff widths, as fractions of the smallest half-length, used when
/// `inf_∂Ω V ≤ 0`.
const WIDTH_FRACTIONS: [f64; 3] = [0.125, 0.25, 0.5];

pub struct Run {
    pub config: RunConfig,
    pub report: Value,
    pub fields: BTreeMap<&'static str, ScalarField>,
}

impl Run {
    pub fn field(&self, id: &str) -> Result<&ScalarField> {
        self.fields.get(id).ok_or_else(|| GaplabError::UnknownField(id.to_string()))
    }
}

fn skipped(mode: Mode) -> String {
    format!("skipped in {} mode", mode.label())
}

fn err_text(e: gaplab_core::Error) -> String {
    e.to_string()
}

pub fn run_pipeline(config: &RunConfig) -> Result<Run> {
    config.validate()?;
    let grid = config.grid()?;
    let spec = config.potential_spec()?;
    let v = eval_potential(&spec, &grid).map_err(|e| GaplabError::config(format!("potential: {e}")))?;
    let op = assemble_operator(&grid, v.field()).map_err(GaplabError::Eigensolve)?;
    let spectral =
        lowest_two_eigenpairs(&op, config.solver.tol, config.solver.max_iter).map_err(GaplabError::Eigensolve)?;

    let mut fields = BTreeMap::new();
    fields.insert("V", v.field().clone());
    fields.insert("u1", spectral.ground.eigenfunction.clone());
    fields.insert("u2", spectral.excited.eigenfunction.clone());

    let mode = config.run.mode;
    let mut report = Obj::new()
        .int("gaplab_schema", SCHEMA_VERSION as usize)
        .obj("tool", Obj::new().text("name", TOOL_NAME).text("version", TOOL_VERSION))
        .value("config", serde_json::to_value(config).expect("config serializes"))
        .obj("spectral", spectral_block(&grid, &spectral))
        .obj("potential", potential_block(&v));

    if mode == Mode::EigenOnly {
        let why = skipped(mode);
        for key in ["ground_state", "ratio", "distance", "bounds", "oscillation"] {
            report = report.null(key, &why);
        }
        return Ok(Run {
            config: config.clone(),
            report: report.build(),
            fields,
        });
    }

    let ctx = Analysis::new(config, &v, &spectral);
    if let Ok(phi) = &ctx.phi {
        fields.insert("phi", phi.phi.clone());
    }
    if let Ok(state) = &ctx.state {
        fields.insert("u", state.u.clone());
        fields.insert("psi", state.psi.clone());
    }
    if let Some(rho) = ctx.cutoffs.as_ref().ok().and_then(|c| c.first()) {
        fields.insert("rho", rho.rho().clone());
    }

    let distance = ctx.distance_block();
    if let Ok((_, Some(d))) = &distance {
        fields.insert("d_alpha", d.clone());
    }
    let distance = distance.map(|(o, _)| o);

    if mode == Mode::DistancesOnly {
        let why = skipped(mode);
        report = report
            .null("ground_state", &why)
            .null("ratio", &why)
            .block("distance", distance)
            .null("bounds", &why)
            .null("oscillation", &why);
    } else {
        let ratio = ctx.ratio_block();
        if let Ok((_, Some(f))) = &ratio {
            fields.insert("F", f.clone());
        }
        report = report
            .block("ground_state", ctx.ground_state_block())
            .block("ratio", ratio.map(|(o, _)| o))
            .block("distance", distance)
            .block("bounds", ctx.bounds_block())
            .block("oscillation", ctx.oscillation_block());
    }
    Ok(Run {
        config: config.clone(),
        report: report.build(),
        fields,
    })
}

fn norms_obj(r: &ResidualNorms, grid: &Grid) -> Obj {
    let o = Obj::new().num("sup", r.sup).num("l2", r.l2).int("nodes", r.nodes);
    match r.sup_node {
        Some(n) => o.value("sup_at", coords(grid, n)),
        None => o.null("sup_at", "no evaluated nodes"),
    }
}

fn pair_obj(p: &EigenPair) -> Obj {
    Obj::new()
        .num("eigenvalue", p.eigenvalue)
        .num("residual", p.residual_norm)
}

fn spectral_block(grid: &Grid, s: &SpectralResult) -> Obj {
    let nodes: Vec<f64> = (0..grid.dim()).map(|a| grid.nodes(a) as f64).collect();
    Obj::new()
        .num("lambda1", s.ground.eigenvalue)
        .num("lambda2", s.excited.eigenvalue)
        .num("gap", s.gap)
        .opt_num("lambda3", s.third, "third eigenvalue probe did not converge")
        .num("residual1", s.ground.residual_norm)
        .num("residual2", s.excited.residual_norm)
        .flag("degeneracy_flag", s.degeneracy_flag)
        .int("iterations", s.iterations)
        .value("nodes", num_array(&nodes))
        .int("interior_nodes", grid.interior_nodes().count())
        .obj("ground", pair_obj(&s.ground))
        .obj("excited", pair_obj(&s.excited))
}

fn potential_block(v: &Potential) -> Obj {
    Obj::new()
        .num("inf", v.inf())
        .num("sup", v.sup())
        .num("inf_boundary", v.inf_boundary())
        .flag("analytic_derivatives", v.analytic_derivatives())
}

fn flags_list(flags: &[HypothesisFlag]) -> Vec<Obj> {
    flags
        .iter()
        .map(|f| {
            Obj::new()
                .text("name", f.name)
                .text("condition", f.condition)
                .num("measured", f.measured)
                .flag("pass", f.pass)
        })
        .collect()
}

fn gap_report_obj(r: &GapBoundReport) -> Obj {
    let mut terms = Obj::new();
    for (name, x) in &r.terms {
        terms = terms.num(name, *x);
    }
    Obj::new()
        .text("theorem", r.theorem.label())
        .list("flags", flags_list(&r.flags))
        .flag("hypotheses_hold", r.hypotheses_hold())
        .opt_num("bound", r.bound, "hypothesis flags fail")
        .num("measured_gap", r.measured_gap)
        .opt_flag("sound", r.sound, "no bound: hypothesis flags fail")
        .flag("inequality_holds", r.inequality_holds)
        .obj("terms", terms)
}

fn bracket_obj(b: &BracketTerms) -> Obj {
    Obj::new()
        .num("cutoff", b.cutoff)
        .num("potential", b.potential)
        .num("ratio", b.ratio)
        .num("root", b.root)
        .num("g", b.g)
        .num("sum", b.sum())
        .flag("clamped_sqrt", b.clamped_sqrt)
}

fn anchors_obj(grid: &Grid, a: &AnchorPair) -> Obj {
    Obj::new()
        .num("delta", a.delta)
        .value("x0", coords(grid, a.x0))
        .value("x1", coords(grid, a.x1))
        .num("level", a.level)
        .num("distance", a.distance)
        .num("level_tol", a.level_tol)
        .int("widenings", a.widenings)
}

fn l_omega_obj(l: &LOmega) -> Obj {
    Obj::new()
        .num("value", l.value)
        .int("stride", l.stride)
        .int("sources", l.sources)
        .int("nodes", l.nodes)
        .flag("exact", l.exact())
}

fn cutoff_obj(c: &CutoffField) -> Obj {
    let no_v = "built without a boundary potential";
    Obj::new()
        .num("width", c.width)
        .opt_num("kappa", c.kappa, no_v)
        .opt_num("t_star", c.t_star, no_v)
        .num("achieved_constant", c.achieved_constant)
        .opt_num("target", c.target, no_v)
        .opt_flag("meets_target", c.target.map(|_| c.meets_target()), no_v)
        .int("doublings", c.doublings)
}

fn case_report_obj(grid: &Grid, r: &CaseReport) -> Obj {
    let cases = r
        .cases
        .iter()
        .enumerate()
        .map(|(k, c)| {
            Obj::new()
                .int("case", k + 1)
                .num("lhs", c.lhs)
                .num("rhs", c.rhs)
                .num("margin", c.margin)
                .opt_flag("holds", c.holds, "indeterminate: g is the floor sentinel")
        })
        .collect();
    let o = Obj::new()
        .num("f_max", r.f_max)
        .list("cases", cases)
        .flag("at_least_one_holds", r.at_least_one_holds)
        .flag("vacuous", r.vacuous)
        .num("tolerance", r.tolerance);
    match r.node {
        Some(n) => o.value("at", coords(grid, n)),
        None => o.null("at", "F has no evaluated nodes"),
    }
}

fn entry_obj(e: &InequalityEntry) -> Obj {
    let why = e.note.unwrap_or("not evaluated");
    Obj::new()
        .text("id", e.id)
        .text(
            "relation",
            match e.relation {
                Relation::AtLeast => ">=",
                Relation::AtMost => "<=",
            },
        )
        .opt_num("lhs", e.lhs, why)
        .opt_num("rhs", e.rhs, why)
        .opt_flag("holds", e.holds, why)
        .opt_num("margin", e.margin, why)
        .flag("mask_clipped", e.mask_clipped)
}

fn oscillation_obj(r: &OscillationReport) -> Obj {
    let i = &r.integrals;
    Obj::new()
        .num("t", r.t)
        .obj(
            "integrals",
            Obj::new()
                .num("u1_sq", i.u1_sq)
                .num("u2_sq", i.u2_sq)
                .num("u1u2", i.u1u2)
                .num("plus_sq", i.plus_sq)
                .num("minus_sq", i.minus_sq)
                .num("identity_defect", i.identity_defect()),
        )
        .num("ratio_weighted", r.ratio_weighted)
        .list("entries", r.entries.iter().map(entry_obj).collect())
}

/// Shared state of the analyses after the eigensolve.
struct Analysis<'a> {
    config: &'a RunConfig,
    v: &'a Potential,
    spectral: &'a SpectralResult,
    grid: Grid,
    n: usize,
    phi: std::result::Result<LogGroundState, String>,
    state: std::result::Result<RatioState, String>,
    gproxy: GProxy,
    alphas: std::result::Result<Vec<f64>, String>,
    cutoffs: std::result::Result<Vec<CutoffField>, String>,
    epsilon: std::result::Result<EpsilonResult, String>,
}

impl<'a> Analysis<'a> {
    fn new(config: &'a RunConfig, v: &'a Potential, spectral: &'a SpectralResult) -> Self {
        let grid = *v.grid();
        let a = &config.analysis;
        let u1 = &spectral.ground.eigenfunction;
        let phi = log_transform(u1, a.floor).map_err(err_text);
        let state = ratio_field(&spectral.excited.eigenfunction, u1, a.floor, a.gamma).map_err(err_text);
        let gproxy = if config.run.mode == Mode::Full {
            g_proxy(v, &config.dictionary.sizes(), a.g_floor)
        } else {
            g_proxy_skipped(v, a.g_floor)
        };
        let requested = if a.alphas.is_empty() { alpha_grid(v) } else { a.alphas.clone() };
        let kept: Vec<f64> = requested.into_iter().filter(|&x| v.inf() + x > 0.0).collect();
        let alphas = if kept.is_empty() {
            Err("no alpha with inf V + alpha > 0".to_string())
        } else {
            Ok(kept)
        };
        let cutoffs = cutoff_family(v, a.kappa).map_err(err_text);
        let epsilon = alphas
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|al| potential_stats(v, al[al.len() / 2]).map_err(err_text))
            .map(|s| epsilon_from_potential(&s, spectral.excited.eigenvalue));
        Self {
            config,
            v,
            spectral,
            grid,
            n: grid.dim(),
            phi,
            state,
            gproxy,
            alphas,
            cutoffs,
            epsilon,
        }
    }

    fn alpha_ref(&self) -> std::result::Result<f64, String> {
        self.alphas.as_ref().map(|a| a[a.len() / 2]).map_err(Clone::clone)
    }

    fn lambda1(&self) -> f64 {
        self.spectral.ground.eigenvalue
    }

    fn gap(&self) -> f64 {
        self.spectral.gap
    }

    fn primary_cutoff(&self) -> std::result::Result<&CutoffField, String> {
        self.cutoffs
            .as_ref()
            .map_err(Clone::clone)
            .map(|c| &c[0])
    }

    fn t_star(&self) -> Option<f64> {
        let b = self.v.inf_boundary();
        (b > 0.0).then(|| 1.0 / b.sqrt())
    }

    fn auto_stride(&self) -> usize {
        match self.config.analysis.stride {
            0 if self.n == 1 => 1,
            0 => ((0..self.n).map(|a| self.grid.nodes(a)).min().unwrap_or(1) / AUTO_SOURCES_PER_AXIS).max(1),
            s => s,
        }
    }

    fn ground_state_block(&self) -> std::result::Result<Obj, String> {
        let phi = self.phi.as_ref().map_err(Clone::clone)?;
        let grid = &self.grid;
        let eq11 = eq11_residual(phi, self.v.field(), self.lambda1()).map_err(err_text)?;
        let hess = hessian_min_eig(phi).map_err(err_text)?;
        let g = &self.gproxy;
        let mut out = Obj::new()
            .num("floor", phi.floor)
            .int("mask_nodes", phi.phi.valid_count())
            .obj("eq11_residual", norms_obj(&eq11, grid));
        out = match hess.min() {
            Some((node, m)) => out.obj("hessian_min", Obj::new().num("value", m).value("at", coords(grid, node))),
            None => out.null("hessian_min", "Hessian mask is empty"),
        };
        let mut gsum = Obj::new()
            .flag("sentinel", g.sentinel)
            .num("g_floor", g.g_floor)
            .int("certified", g.certified.len())
            .int("tested", g.tested)
            .num("min", g.g.min().unwrap_or(f64::NAN))
            .num("max", g.g.max().unwrap_or(f64::NAN));
        gsum = match g.certified.iter().map(|c| c.margin).reduce(f64::max) {
            Some(m) => gsum.num("best_certificate_margin", m),
            None => gsum.null("best_certificate_margin", "no certified candidate"),
        };
        out = out.obj("g_proxy", gsum);

        let mut t11 = Obj::new();
        t11 = match verify_theorem_1_1(&hess, g) {
            Ok(m) => t11.num("margin", m.margin).value("at", coords(grid, m.node)),
            Err(e) => t11.null("margin", &err_text(e)).null("at", "no margin"),
        };
        t11 = match floored_margin(&hess, g) {
            Ok(m) => t11.num("floored_margin", m.margin),
            Err(e) => t11.null("floored_margin", &err_text(e)),
        };
        out = out.obj("theorem_1_1", t11);
        out = out.block("theorem_2_1", self.theorem_2_1(phi));
        Ok(out)
    }

    fn theorem_2_1(&self, phi: &LogGroundState) -> std::result::Result<Obj, String> {
        let rho = self.primary_cutoff()?;
        let alpha = self.alpha_ref()?;
        let r = gradient_estimate_report(phi, self.v, rho, alpha, self.lambda1(), self.n).map_err(err_text)?;
        let p = &r.particular;
        let o = Obj::new()
            .num("alpha", alpha)
            .num("cutoff_width", rho.width)
            .int("nodes", r.nodes)
            .num("sup_lhs", r.sup_lhs)
            .num("sup_rhs", r.sup_rhs)
            .flag("holds", r.holds)
            .flag("holds_sup_form", r.sup_lhs <= r.sup_rhs)
            .num("worst_margin", r.worst_margin)
            .num("sup_g", r.sup_g)
            .num("identity_defect", r.identity_defect)
            .flag("clamped_sqrt", r.clamped_sqrt)
            .obj(
                "particular",
                Obj::new()
                    .num("sup_lhs", p.sup_lhs)
                    .num("rhs", p.rhs)
                    .value("terms", num_array(&p.terms))
                    .flag("holds", p.holds)
                    .flag("clamped_sqrt", p.clamped_sqrt),
            );
        Ok(match r.worst_node {
            Some(n) => o.value("worst_at", coords(&self.grid, n)),
            None => o.null("worst_at", "no evaluated nodes"),
        })
    }

    fn ratio_block(&self) -> std::result::Result<(Obj, Option<ScalarField>), String> {
        let state = self.state.as_ref().map_err(Clone::clone)?;
        let grid = &self.grid;
        let mut out = Obj::new()
            .num("gamma", self.config.analysis.gamma)
            .num("c", state.c)
            .num("sup_u", state.sup_u)
            .value("argmax_u", coords(grid, state.argmax))
            .int("mask_nodes", state.u.valid_count());
        let phi = self.phi.as_ref().map_err(Clone::clone);
        let residual = |f: fn(&RatioState, &LogGroundState, f64) -> gaplab_core::Result<ResidualNorms>| {
            phi.clone()
                .and_then(|p| f(state, p, self.gap()).map_err(err_text))
                .map(|r| norms_obj(&r, grid))
        };
        out = out
            .block("eq31_residual", residual(eq31_residual))
            .block("psi_residual", residual(psi_residual));
        let classified = self.primary_cutoff().and_then(|rho| {
            let alpha = self.alpha_ref()?;
            let f = f_functional(state, self.v, rho, alpha, self.gap()).map_err(err_text)?;
            let ctx = CaseContext {
                state,
                v: self.v,
                rho,
                gproxy: &self.gproxy,
                lambda1: self.lambda1(),
                gap: self.gap(),
                n: self.n,
            };
            let cases = classify_theorem_3_1(&f, &ctx).map_err(err_text)?;
            Ok((case_report_obj(grid, &cases).num("alpha", alpha), f.f))
        });
        Ok(match classified {
            Ok((o, f)) => (out.obj("theorem_3_1", o), Some(f)),
            Err(e) => (out.null("theorem_3_1", &e), None),
        })
    }

    fn distance_block(&self) -> std::result::Result<(Obj, Option<ScalarField>), String> {
        let state = self.state.as_ref().map_err(Clone::clone)?;
        let alphas = self.alphas.as_ref().map_err(Clone::clone)?;
        let alpha = self.alpha_ref()?;
        let grid = &self.grid;
        let deltas = &self.config.analysis.deltas;
        let anchors: Vec<std::result::Result<AnchorPair, String>> = deltas
            .iter()
            .map(|&d| locate_anchors(state, d, self.v, alpha).map_err(err_text))
            .collect();
        let anchor_list = anchors
            .iter()
            .zip(deltas)
            .map(|(a, &d)| match a {
                Ok(a) => anchors_obj(grid, a).flag("found", true),
                Err(e) => Obj::new().num("delta", d).flag("found", false).text("error", e),
            })
            .collect();
        let mut out = Obj::new()
            .num("alpha_ref", alpha)
            .list("anchors", anchor_list);
        let mut field = None;
        match anchors.iter().find_map(|a| a.as_ref().ok()) {
            Some(a) => {
                let table: Vec<(f64, std::result::Result<f64, String>)> = alphas
                    .iter()
                    .map(|&al| (al, d_alpha(self.v, al, a.x0, a.x1).map_err(err_text)))
                    .collect();
                let values: Vec<f64> = table.iter().filter_map(|(_, d)| d.as_ref().ok().copied()).collect();
                let monotone = values.windows(2).all(|w| w[1] >= w[0]);
                let rows = table
                    .iter()
                    .map(|(al, d)| {
                        let o = Obj::new().num("alpha", *al);
                        match d {
                            Ok(d) => o.num("distance", *d),
                            Err(e) => o.null("distance", e),
                        }
                    })
                    .collect();
                out = out
                    .obj(
                        "d_alpha_table",
                        Obj::new()
                            .num("delta", a.delta)
                            .value("x0", coords(grid, a.x0))
                            .value("x1", coords(grid, a.x1))
                            .list("rows", rows)
                            .flag("monotone_in_alpha", monotone),
                    );
                field = d_alpha_field(self.v, alpha, a.x0).ok().map(|d| d.d);
            }
            None => out = out.null("d_alpha_table", "no anchors located"),
        }
        let stride = self.auto_stride();
        out = out.block(
            "l_omega",
            l_omega(self.v, alpha, stride).map(|l| l_omega_obj(&l)).map_err(err_text),
        );
        let l_t = match self.t_star() {
            Some(t) => {
                let region = inner_region(grid, t);
                if region.is_empty() {
                    Err(format!("inner region at t* = {t} is empty"))
                } else {
                    l_omega_in(self.v, alpha, &region, stride)
                        .map(|l| l_omega_obj(&l).num("t", t))
                        .map_err(err_text)
                }
            }
            None => Err("inf of V on the boundary is not positive".to_string()),
        };
        out = out.block("l_omega_t", l_t);
        Ok((out, field))
    }

    fn bounds_block(&self) -> std::result::Result<Obj, String> {
        let state = self.state.as_ref().map_err(Clone::clone)?;
        let alphas = self.alphas.as_ref().map_err(Clone::clone)?;
        let cutoffs = self.cutoffs.as_ref().map_err(Clone::clone)?;
        let grid = &self.grid;
        let ctx = LDeltaContext {
            v: self.v,
            state,
            gproxy: &self.gproxy,
            lambda1: self.lambda1(),
            n: self.n,
        };
        let per_delta: Vec<(f64, std::result::Result<(LDeltaResult, GapBoundReport), String>)> = self
            .config
            .analysis
            .deltas
            .iter()
            .map(|&d| {
                let r = l_delta(&ctx, d, alphas, cutoffs).map_err(err_text).map(|ld| {
                    let rep = theorem_4_1_bound(d, ld.value, ld.inf_weighted_l, self.gap());
                    (ld, rep)
                });
                (d, r)
            })
            .collect();
        let reports: Vec<GapBoundReport> = per_delta
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok().map(|(_, rep)| rep.clone()))
            .collect();
        let best4 = best_bound(&reports).map(|k| (reports[k].bound.unwrap_or(f64::NAN), reports[k].terms.clone()));
        let rows = per_delta
            .iter()
            .map(|(d, r)| match r {
                Ok((ld, rep)) => {
                    let o = Obj::new()
                        .num("delta", *d)
                        .num_or("l_delta", ld.value, "no candidate with finite L")
                        .num_or("inf_weighted_l", ld.inf_weighted_l, "no candidate with finite L")
                        .flag("g_floored", ld.g_floored)
                        .int("candidates", ld.candidates.len())
                        .obj("report", gap_report_obj(rep));
                    match ld.winning() {
                        Some(w) => o.obj(
                            "winner",
                            Obj::new()
                                .num("alpha", w.alpha)
                                .int("cutoff", w.rho)
                                .num("l", w.l)
                                .num("value", w.value)
                                .num("weighted_l", w.weighted_l)
                                .obj("bracket", bracket_obj(&w.bracket))
                                .obj("anchors", anchors_obj(grid, &w.anchors)),
                        ),
                        None => o.null("winner", "no candidate with finite L"),
                    }
                }
                Err(e) => Obj::new().num("delta", *d).null("report", e),
            })
            .collect();
        let mut t41 = Obj::new().list("per_delta", rows);
        t41 = match &best4 {
            Some((b, terms)) => {
                let delta = terms.iter().find(|(n, _)| *n == "inv_delta").map_or(f64::NAN, |(_, x)| 1.0 / x);
                t41.num("best_bound", *b).num("best_delta", delta)
            }
            None => t41
                .null("best_bound", "no delta with passing hypothesis flags")
                .null("best_delta", "no delta with passing hypothesis flags"),
        };

        let out = Obj::new()
            .value("alphas", num_array(alphas))
            .list("cutoffs", cutoffs.iter().map(cutoff_obj).collect())
            .obj("theorem_4_1", t41)
            .block("theorem_6_1", self.theorem_6_1(alphas, cutoffs));
        Ok(out)
    }

    fn theorem_6_1(&self, alphas: &[f64], cutoffs: &[CutoffField]) -> std::result::Result<Obj, String> {
        let eps = self.epsilon.as_ref().map_err(Clone::clone)?;
        let recipe = match self.config.analysis.c_tilde {
            CTildeConfig::Fixed(c) => CTildeRecipe::Fixed(c),
            CTildeConfig::Recipe(_) => CTildeRecipe::Bracket,
        };
        let mut out = Obj::new()
            .obj(
                "epsilon",
                Obj::new()
                    .opt_num("value", eps.epsilon, "inf of V on the boundary is not positive")
                    .opt_num("level_ratio", eps.level_ratio, "epsilon is not below one")
                    .num("inf_boundary", eps.inf_boundary)
                    .list("flags", flags_list(&eps.flags))
                    .flag("ok", eps.ok()),
            )
            .text("c_tilde_recipe", recipe.label());
        if !eps.ok() {
            return Ok(out
                .list("per_alpha", Vec::new())
                .null("best_bound", "epsilon hypotheses fail")
                .null("best_alpha", "epsilon hypotheses fail"));
        }
        let t = self.t_star().expect("epsilon flags imply a positive boundary infimum");
        let region = inner_region(&self.grid, t);
        let stride = self.auto_stride();
        let rho = &cutoffs[0];
        let mut reports = Vec::new();
        let mut rows = Vec::new();
        for &alpha in alphas {
            let row = (|| -> std::result::Result<(Obj, GapBoundReport), String> {
                let stats = potential_stats(self.v, alpha).map_err(err_text)?;
                let b = bracket(self.v, rho, alpha, self.lambda1(), &self.gproxy, self.n).map_err(err_text)?;
                let l_target = if region.is_empty() {
                    f64::INFINITY
                } else {
                    l_omega_in(self.v, alpha, &region, stride).map_err(err_text)?.value
                };
                let input = EpsilonBoundInput {
                    epsilon: eps.clone(),
                    alpha,
                    c_tilde: recipe.evaluate(&b),
                    recipe,
                    l_target,
                    sup_inv_shift: 1.0 / (self.v.inf() + alpha),
                    c_alpha: stats.c_alpha,
                };
                let rep = theorem_6_1_bound(&input, self.gap());
                let o = Obj::new()
                    .num("alpha", alpha)
                    .num("c_tilde", input.c_tilde)
                    .num("c_alpha", stats.c_alpha)
                    .value("c_alpha_at", coords(&self.grid, stats.c_alpha_node))
                    .num_or("l_target", l_target, "inner region empty")
                    .num("sup_inv_shift", input.sup_inv_shift)
                    .obj("report", gap_report_obj(&rep));
                Ok((o, rep))
            })();
            match row {
                Ok((o, rep)) => {
                    rows.push(o);
                    reports.push((alpha, rep));
                }
                Err(e) => rows.push(Obj::new().num("alpha", alpha).null("report", &e)),
            }
        }
        let only: Vec<GapBoundReport> = reports.iter().map(|(_, r)| r.clone()).collect();
        out = out.num("t_star", t).list("per_alpha", rows);
        Ok(match best_bound(&only) {
            Some(k) => out
                .num("best_bound", only[k].bound.unwrap_or(f64::NAN))
                .num("best_alpha", reports[k].0),
            None => out
                .null("best_bound", "no alpha with passing hypothesis flags")
                .null("best_alpha", "no alpha with passing hypothesis flags"),
        })
    }

    fn oscillation_block(&self) -> std::result::Result<Obj, String> {
        let state = self.state.as_ref().map_err(Clone::clone)?;
        let epsilon = self
            .epsilon
            .as_ref()
            .ok()
            .filter(|e| e.ok())
            .and_then(|e| e.epsilon);
        let inputs = OscillationInputs {
            inf_v: self.v.inf(),
            inf_boundary: self.v.inf_boundary(),
            epsilon,
        };
        let per_t = self
            .config
            .analysis
            .t_list
            .iter()
            .map(|&t| match check_section5(self.spectral, state, &inputs, t) {
                Ok(r) => oscillation_obj(&r),
                Err(e) => Obj::new().num("t", t).null("integrals", &err_text(e)),
            })
            .collect();
        Ok(Obj::new().list("per_t", per_t))
    }
}

/// `ĝ` placeholder when the dictionary is not needed.
fn g_proxy_skipped(v: &Potential, g_floor: f64) -> GProxy {
    gaplab_core::ground_state::g_proxy_from(v, &[], g_floor)
}

/// Cutoffs scanned by `L_δ`: the potential-built one and two wider ones
/// when `inf_∂Ω V > 0`, otherwise three fixed fractions of the domain.
pub fn cutoff_family(v: &Potential, kappa: f64) -> gaplab_core::Result<Vec<CutoffField>> {
    let grid = v.grid();
    if v.inf_boundary() > 0.0 {
        let base = build_cutoff(v, kappa)?;
        let k = base.kappa.unwrap_or(kappa);
        let mut out = vec![base];
        for m in [2.0, 4.0] {
            out.push(cutoff_for_kappa(v, k * m)?);
        }
        Ok(out)
    } else {
        let half = (0..grid.dim())
            .map(|a| 0.5 * grid.domain().length(a))
            .fold(f64::INFINITY, f64::min);
        WIDTH_FRACTIONS
            .iter()
            .map(|f| CutoffField::with_width(grid, kappa * f * half))
            .collect()
    }
}
