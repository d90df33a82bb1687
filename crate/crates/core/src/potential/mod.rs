//! Potentials `V`: specification, evaluation on a grid, derivative statistics.

pub mod expr;

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::fd::{full_derivatives, min_eig_sym2, Derivatives};
use crate::grid::{Grid, ScalarField};
use crate::math::{pos, sqrt};
use crate::{Error, Result};

pub use expr::{parse_expr, Expr};

/// Built-in families, all radial in `r = ‖x‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// `β (r² − a²)²`
    DoubleWell { beta: f64, a: f64 },
    /// `k r²`
    Harmonic { k: f64 },
    /// `0`
    Box,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// A built-in family plus an additive constant.
    Builtin { family: Builtin, shift: f64 },
    Expression(Expr),
    /// Node values in row-major order; `shape` is one count per axis.
    Tabulated { shape: Vec<usize>, values: Vec<f64> },
}

impl PotentialSpec {
    pub fn double_well(beta: f64, a: f64) -> Self {
        PotentialSpec::Builtin {
            family: Builtin::DoubleWell { beta, a },
            shift: 0.0,
        }
    }

    pub fn harmonic(k: f64) -> Self {
        PotentialSpec::Builtin {
            family: Builtin::Harmonic { k },
            shift: 0.0,
        }
    }

    pub fn zero() -> Self {
        PotentialSpec::Builtin {
            family: Builtin::Box,
            shift: 0.0,
        }
    }

    pub fn shifted(self, c: f64) -> Self {
        match self {
            PotentialSpec::Builtin { family, shift } => PotentialSpec::Builtin {
                family,
                shift: shift + c,
            },
            other => other,
        }
    }
}

const BUILTINS: [&str; 3] = ["double_well", "harmonic", "box"];

/// Parses a potential description.
///
/// Built-ins use `name(param=value, ...)`, e.g. `double_well(beta=5, a=1)`,
/// `harmonic(k=2, shift=1)` or `box`; every built-in accepts `shift`.
/// Anything else is parsed as an expression in `x` and `y`.
pub fn parse_potential(text: &str) -> Result<PotentialSpec> {
    use expr::{tokenize, Parser, Tok};

    let toks = tokenize(text)?;
    let is_builtin = matches!(&toks[0].tok, Tok::Ident(name) if BUILTINS.contains(&name.as_str()))
        && matches!(toks[1].tok, Tok::Sym('(') | Tok::End);
    if !is_builtin {
        return Ok(PotentialSpec::Expression(parse_expr(text)?));
    }

    let name = match &toks[0].tok {
        Tok::Ident(n) => n.clone(),
        _ => unreachable!(),
    };
    let mut p = Parser::new(toks);
    p.bump();
    let mut params: Vec<(alloc::string::String, f64, usize)> = Vec::new();
    if p.eat('(') && !p.eat(')') {
        loop {
            let tok = p.bump();
            let key = match tok.tok {
                Tok::Ident(k) => k,
                _ => {
                    return Err(Error::Parse {
                        position: tok.pos,
                        expected: vec!["parameter name".to_string()],
                    })
                }
            };
            p.expect('=')?;
            let at = p.peek().pos;
            let value = p.expr()?.eval(f64::NAN, None).map_err(|_| Error::Parse {
                position: at,
                expected: vec!["constant".to_string()],
            })?;
            params.push((key, value, tok.pos));
            if p.eat(')') {
                break;
            }
            p.expect(',')?;
        }
    }
    p.expect_end()?;

    let allowed: &[&str] = match name.as_str() {
        "double_well" => &["beta", "a", "shift"],
        "harmonic" => &["k", "shift"],
        _ => &["shift"],
    };
    let get = |key: &str, default: f64| -> f64 {
        params
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map_or(default, |(_, v, _)| *v)
    };
    let shift = get("shift", 0.0);
    let family = match name.as_str() {
        "double_well" => Builtin::DoubleWell {
            beta: get("beta", 1.0),
            a: get("a", 1.0),
        },
        "harmonic" => Builtin::Harmonic { k: get("k", 1.0) },
        _ => Builtin::Box,
    };
    if let Some((k, _, pos)) = params.iter().find(|(k, _, _)| !allowed.contains(&k.as_str())) {
        return Err(Error::UnknownIdentifier {
            name: k.clone(),
            position: *pos,
        });
    }
    Ok(PotentialSpec::Builtin { family, shift })
}

/// `V` on a grid together with its derivative fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    field: ScalarField,
    derivs: Derivatives,
    analytic: bool,
}

impl Potential {
    /// Wraps node values, differentiating them numerically.
    pub fn from_field(field: ScalarField) -> Self {
        let derivs = full_derivatives(field.grid(), field.values());
        Self {
            field,
            derivs,
            analytic: false,
        }
    }

    pub fn field(&self) -> &ScalarField {
        &self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    #[inline]
    pub fn value(&self, node: usize) -> f64 {
        self.field.get(node)
    }

    pub fn derivatives(&self) -> &Derivatives {
        &self.derivs
    }

    /// Whether derivatives come from closed forms rather than differencing.
    pub fn analytic_derivatives(&self) -> bool {
        self.analytic
    }

    pub fn grad_sq(&self, node: usize) -> f64 {
        self.derivs.grad_sq(node)
    }

    pub fn grad_norm(&self, node: usize) -> f64 {
        sqrt(self.derivs.grad_sq(node))
    }

    pub fn laplacian(&self, node: usize) -> f64 {
        self.derivs.laplacian[node]
    }

    /// `(ΔV)₊`
    pub fn laplacian_pos(&self, node: usize) -> f64 {
        pos(self.derivs.laplacian[node])
    }

    /// Smallest eigenvalue of `Hess V`.
    pub fn hess_min(&self, node: usize) -> f64 {
        self.derivs.hess_min[node]
    }

    pub fn inf(&self) -> f64 {
        self.field.min().unwrap_or(f64::NAN)
    }

    pub fn sup(&self) -> f64 {
        self.field.max().unwrap_or(f64::NAN)
    }

    pub fn inf_boundary(&self) -> f64 {
        self.grid()
            .boundary_nodes()
            .map(|n| self.value(n))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates `V` at every node.
pub fn eval_potential(spec: &PotentialSpec, grid: &Grid) -> Result<Potential> {
    match spec {
        PotentialSpec::Builtin { family, shift } => Ok(eval_builtin(*family, *shift, grid)),
        PotentialSpec::Expression(e) => {
            let two_d = grid.dim() == 2;
            let mut values = Vec::with_capacity(grid.len());
            for n in 0..grid.len() {
                let [x, y] = grid.coord(n);
                let v = e
                    .eval(x, two_d.then_some(y))
                    .map_err(|f| Error::Eval {
                        node: n,
                        message: f.message().to_string(),
                    })?;
                values.push(v);
            }
            Ok(Potential::from_field(ScalarField::full(*grid, values)?))
        }
        PotentialSpec::Tabulated { shape, values } => {
            let expected = grid.len();
            let matches = shape.len() == grid.dim()
                && shape.iter().enumerate().all(|(a, &n)| n == grid.nodes(a));
            if !matches || values.len() != expected {
                return Err(Error::TabulatedShape {
                    expected,
                    found: values.len(),
                });
            }
            if let Some(n) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Eval {
                    node: n,
                    message: "non-finite tabulated value".to_string(),
                });
            }
            Ok(Potential::from_field(ScalarField::full(*grid, values.clone())?))
        }
    }
}

fn eval_builtin(family: Builtin, shift: f64, grid: &Grid) -> Potential {
    let len = grid.len();
    let dim = grid.dim() as f64;
    let mut v = vec![0.0; len];
    let mut gx = vec![0.0; len];
    let mut gy = vec![0.0; len];
    let mut lap = vec![0.0; len];
    let mut hmin = vec![0.0; len];
    for n in 0..len {
        let [x, y0] = grid.coord(n);
        let y = if grid.dim() == 2 { y0 } else { 0.0 };
        let r2 = x * x + y * y;
        match family {
            Builtin::DoubleWell { beta, a } => {
                let s = r2 - a * a;
                v[n] = beta * s * s;
                gx[n] = 4.0 * beta * s * x;
                gy[n] = 4.0 * beta * s * y;
                lap[n] = 4.0 * beta * (dim * s + 2.0 * r2);
                // Hess V = 4β[(r² − a²) I + 2 x xᵀ]
                let hxx = 4.0 * beta * (s + 2.0 * x * x);
                if grid.dim() == 1 {
                    hmin[n] = hxx;
                } else {
                    let hyy = 4.0 * beta * (s + 2.0 * y * y);
                    let hxy = 8.0 * beta * x * y;
                    hmin[n] = min_eig_sym2(hxx, hxy, hyy);
                }
            }
            Builtin::Harmonic { k } => {
                v[n] = k * r2;
                gx[n] = 2.0 * k * x;
                gy[n] = 2.0 * k * y;
                lap[n] = 2.0 * k * dim;
                hmin[n] = 2.0 * k;
            }
            Builtin::Box => {}
        }
        v[n] += shift;
    }
    Potential {
        field: ScalarField::full(*grid, v).expect("sizes match"),
        derivs: Derivatives {
            grad: [gx, gy],
            laplacian: lap,
            hess_min: hmin,
            mask: vec![true; len],
        },
        analytic: true,
    }
}

/// Global statistics of `V` for a shift `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialStats {
    pub alpha: f64,
    pub inf: f64,
    pub sup: f64,
    pub inf_boundary: f64,
    /// Smallest `c` with `|∇V| ≤ c (V+α)^{3/2}` and `(ΔV)₊ ≤ c (V+α)³` on the grid.
    pub c_alpha: f64,
    pub c_alpha_gradient: f64,
    pub c_alpha_laplacian: f64,
    /// Node where the larger of the two parts is attained.
    pub c_alpha_node: usize,
    pub inf_hess_min: f64,
}

pub fn potential_stats(v: &Potential, alpha: f64) -> Result<PotentialStats> {
    let grid = v.grid();
    let min_shifted = v.inf() + alpha;
    if !(min_shifted > 0.0) {
        return Err(Error::NonpositiveShift { min: min_shifted });
    }
    let mut grad_part = (0.0f64, 0usize);
    let mut lap_part = (0.0f64, 0usize);
    let mut inf_hess = f64::INFINITY;
    for n in 0..grid.len() {
        let w = v.value(n) + alpha;
        let g = v.grad_norm(n) / (w * sqrt(w));
        if g > grad_part.0 {
            grad_part = (g, n);
        }
        let l = v.laplacian_pos(n) / (w * w * w);
        if l > lap_part.0 {
            lap_part = (l, n);
        }
        inf_hess = inf_hess.min(v.hess_min(n));
    }
    let (c_alpha, node) = if lap_part.0 > grad_part.0 {
        lap_part
    } else {
        grad_part
    };
    Ok(PotentialStats {
        alpha,
        inf: v.inf(),
        sup: v.sup(),
        inf_boundary: v.inf_boundary(),
        c_alpha,
        c_alpha_gradient: grad_part.0,
        c_alpha_laplacian: lap_part.0,
        c_alpha_node: node,
        inf_hess_min: inf_hess,
    })
}
