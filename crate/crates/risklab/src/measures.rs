//! Risk-functional catalog and combinators.
//!
//! A [`RiskFunctional`] is an evaluable map from positions to reals, built as
//! an expression tree over base measures (negated expectation, worst case,
//! value-at-risk, expected shortfall, entropic, scenario maximum, orthant and
//! hull members, induced measures of acceptance sets) and combinators
//! (translation, pointwise minimum of a family, floor pre-composition).
//!
//! Conventions baked in here:
//!
//! * `var_alpha(X) = inf { m : P(X + m < 0) <= alpha }`, computed exactly by
//!   sorting outcome losses and scanning cumulative probability. The strict
//!   `<` inside the probability and the weak `<=` on the level make the value
//!   attained, cash invariant, monotone, and positively homogeneous on finite
//!   spaces.
//! * `es_alpha(X) = (1/alpha) * integral of var_u(X) over u in (0, alpha)`,
//!   summed exactly over the probability atoms, so the catalog carries a
//!   certified coherent member.

use crate::acceptance::AcceptanceSet;
use crate::error::{Error, Result};
use crate::space::{Position, ProbSpace};

/// Expression tree for evaluable risk functionals.
#[derive(Clone, Debug)]
pub enum Expr {
    NegExpectation,
    WorstCase,
    Var {
        alpha: f64,
    },
    Es {
        alpha: f64,
    },
    Entropic {
        theta: f64,
    },
    ScenarioMax {
        scenarios: Vec<Vec<f64>>,
    },
    /// `X -> max_i (z_i - X_i)`, the induced measure of the orthant at `z`.
    OrthantMember {
        z: Vec<f64>,
    },
    /// `X -> min_{t in [0,1]} max_i (t z_i + (1-t) y_i - X_i)`, the induced
    /// measure of the convex hull of the orthants at `z` and `y`.
    HullMember {
        z: Vec<f64>,
        y: Vec<f64>,
    },
    /// Induced measure of an arbitrary acceptance set, evaluated by bisection
    /// at the stored tolerance.
    InducedBy {
        set: Box<AcceptanceSet>,
        tol: f64,
    },
    Translate {
        inner: Box<Expr>,
        by: f64,
    },
    MinOf {
        members: Vec<Expr>,
    },
    FloorCompose {
        inner: Box<Expr>,
    },
}

/// An evaluable risk functional bound to a probability space.
#[derive(Clone, Debug)]
pub struct RiskFunctional {
    expr: Expr,
    space: ProbSpace,
    label: String,
}

impl RiskFunctional {
    pub fn new(expr: Expr, space: ProbSpace, label: impl Into<String>) -> Self {
        RiskFunctional {
            expr,
            space,
            label: label.into(),
        }
    }

    pub fn neg_expectation(space: ProbSpace) -> Self {
        RiskFunctional::new(Expr::NegExpectation, space, "neg_expectation")
    }

    pub fn worst_case(space: ProbSpace) -> Self {
        RiskFunctional::new(Expr::WorstCase, space, "worst_case")
    }

    pub fn var(space: ProbSpace, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(RiskFunctional::new(
            Expr::Var { alpha },
            space,
            format!("var(alpha={alpha})"),
        ))
    }

    pub fn es(space: ProbSpace, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(RiskFunctional::new(
            Expr::Es { alpha },
            space,
            format!("es(alpha={alpha})"),
        ))
    }

    pub fn entropic(space: ProbSpace, theta: f64) -> Result<Self> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::config(format!(
                "entropic theta must be finite and > 0, got {theta}"
            )));
        }
        Ok(RiskFunctional::new(
            Expr::Entropic { theta },
            space,
            format!("entropic(theta={theta})"),
        ))
    }

    pub fn scenario_max(space: ProbSpace, scenarios: Vec<Vec<f64>>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::config("scenario_max needs at least one scenario"));
        }
        let scenarios = scenarios
            .into_iter()
            .enumerate()
            .map(|(k, q)| validate_scenario(&space, k, q))
            .collect::<Result<Vec<_>>>()?;
        let n = scenarios.len();
        Ok(RiskFunctional::new(
            Expr::ScenarioMax { scenarios },
            space,
            format!("scenario_max({n} scenarios)"),
        ))
    }

    /// Convex monetary functional `X -> max_i (z_i - X_i)` induced by the
    /// orthant `{ X : X >= z }`.
    pub fn orthant_member(space: ProbSpace, z: &Position) -> Result<Self> {
        space.check_position(z)?;
        Ok(RiskFunctional::new(
            Expr::OrthantMember {
                z: z.values().to_vec(),
            },
            space,
            "orthant_member",
        ))
    }

    /// Convex monetary functional induced by `conv(orthant(z) U orthant(y))`.
    pub fn hull_member(space: ProbSpace, z: &Position, y: &Position) -> Result<Self> {
        space.check_position(z)?;
        space.check_position(y)?;
        Ok(RiskFunctional::new(
            Expr::HullMember {
                z: z.values().to_vec(),
                y: y.values().to_vec(),
            },
            space,
            "hull_member",
        ))
    }

    /// Induced measure of `set`, evaluated by bisection at tolerance `tol`
    /// (closed forms are used where the set structure provides them).
    pub fn induced_by(set: AcceptanceSet, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::config(format!(
                "bisection tol must be > 0, got {tol}"
            )));
        }
        let space = set.space().clone();
        Ok(RiskFunctional::new(
            Expr::InducedBy {
                set: Box::new(set),
                tol,
            },
            space,
            "induced_measure",
        ))
    }

    /// New functional evaluating to `self + a`; a downward translation
    /// `rho - c` is `translate(-c)`.
    pub fn translate(&self, a: f64) -> Self {
        RiskFunctional::new(
            Expr::Translate {
                inner: Box::new(self.expr.clone()),
                by: a,
            },
            self.space.clone(),
            format!("{} {:+}", self.label, a),
        )
    }

    /// Evaluates `self` on the componentwise floor of the input. Monotone,
    /// but deliberately not cash invariant.
    pub fn floor_compose(&self) -> Self {
        RiskFunctional::new(
            Expr::FloorCompose {
                inner: Box::new(self.expr.clone()),
            },
            self.space.clone(),
            format!("floor_compose({})", self.label),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn space(&self) -> &ProbSpace {
        &self.space
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, x: &Position) -> Result<f64> {
        self.space.check_position(x)?;
        let v = eval_expr(&self.expr, &self.space, x)?;
        if v.is_nan() {
            return Err(Error::numerical(format!(
                "{} evaluated to NaN on a finite position",
                self.label
            )));
        }
        Ok(v)
    }

    /// Evaluation at the zero position.
    pub fn value_at_zero(&self) -> Result<f64> {
        self.eval(&self.space.zero())
    }

    /// Evaluation at the constant position `c`.
    pub fn eval_constant(&self, c: f64) -> Result<f64> {
        self.eval(&self.space.constant(c))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn validate_scenario(space: &ProbSpace, k: usize, q: Vec<f64>) -> Result<Vec<f64>> {
    if q.len() != space.len() {
        return Err(Error::DimensionMismatch {
            expected: space.len(),
            got: q.len(),
        });
    }
    for (i, p) in q.iter().enumerate() {
        if !p.is_finite() || *p < 0.0 {
            return Err(Error::config(format!(
                "scenario {k} entry {i} must be finite and >= 0, got {p}"
            )));
        }
    }
    let sum: f64 = q.iter().sum();
    if (sum - 1.0).abs() > crate::space::PROB_SUM_TOL {
        return Err(Error::config(format!(
            "scenario {k} sums to {sum}, outside 1 +/- {}",
            crate::space::PROB_SUM_TOL
        )));
    }
    Ok(q.into_iter().map(|p| p / sum).collect())
}

fn eval_expr(expr: &Expr, space: &ProbSpace, x: &Position) -> Result<f64> {
    match expr {
        Expr::NegExpectation => Ok(-space.expectation(x)?),
        Expr::WorstCase => {
            let (lo, _) = space.ess_bounds(x)?;
            Ok(-lo)
        }
        Expr::Var { alpha } => var_alpha(space, *alpha, x),
        Expr::Es { alpha } => es_alpha(space, *alpha, x),
        Expr::Entropic { theta } => {
            // log-sum-exp with max subtraction keeps the exponentials bounded
            let m = x
                .values()
                .iter()
                .map(|v| -theta * v)
                .fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = space
                .probs()
                .iter()
                .zip(x.values())
                .map(|(p, v)| p * (-theta * v - m).exp())
                .sum();
            Ok((m + s.ln()) / theta)
        }
        Expr::ScenarioMax { scenarios } => Ok(scenarios
            .iter()
            .map(|q| {
                -q.iter()
                    .zip(x.values())
                    .map(|(qi, xi)| qi * xi)
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)),
        Expr::OrthantMember { z } => Ok(z
            .iter()
            .zip(x.values())
            .map(|(zi, xi)| zi - xi)
            .fold(f64::NEG_INFINITY, f64::max)),
        Expr::HullMember { z, y } => Ok(crate::acceptance::hull_minimax(z, y, x.values())),
        Expr::InducedBy { set, tol } => match set.induced_value(x, *tol)? {
            crate::acceptance::InducedValue::Finite(v) => Ok(v),
            other => Err(Error::numerical(format!(
                "induced measure is {other:?} at the evaluated position"
            ))),
        },
        Expr::Translate { inner, by } => Ok(eval_expr(inner, space, x)? + by),
        Expr::MinOf { members } => {
            let mut best = f64::INFINITY;
            for m in members {
                let v = eval_expr(m, space, x)?;
                if v < best {
                    best = v;
                }
            }
            Ok(best)
        }
        Expr::FloorCompose { inner } => eval_expr(inner, space, &x.floor()),
    }
}

/// `inf { m : P(x + m < 0) <= alpha }`, exact on the atoms.
pub fn var_alpha(space: &ProbSpace, alpha: f64, x: &Position) -> Result<f64> {
    check_alpha(alpha)?;
    space.check_position(x)?;
    let values = x.values();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut cum = 0.0;
    for &i in &order {
        cum += space.probs()[i];
        if cum > alpha {
            return Ok(-values[i]);
        }
    }
    // cum reaches 1 > alpha, so the scan always returns; kept for safety
    Ok(-values[*order.last().expect("nonempty space")])
}

/// `(1/alpha) * integral of var_u over (0, alpha]`, summed exactly over the
/// atoms of the loss distribution.
pub fn es_alpha(space: &ProbSpace, alpha: f64, x: &Position) -> Result<f64> {
    check_alpha(alpha)?;
    space.check_position(x)?;
    let values = x.values();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut acc = 0.0;
    let mut lo = 0.0;
    for &i in &order {
        let hi = lo + space.probs()[i];
        let seg = (hi.min(alpha) - lo).max(0.0);
        acc += seg * (-values[i]);
        lo = hi;
        if lo >= alpha {
            break;
        }
    }
    Ok(acc / alpha)
}

/// `max_Q E_Q[-x]` over finitely many scenario measures.
pub fn scenario_max(space: &ProbSpace, scenarios: &[Vec<f64>], x: &Position) -> Result<f64> {
    RiskFunctional::scenario_max(space.clone(), scenarios.to_vec())?.eval(x)
}

/// Result of a family minimum: the value and the index attaining it
/// (ties break to the lowest index).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinEval {
    pub value: f64,
    pub argmin: usize,
}

/// Finite ordered family of risk functionals on one common space.
#[derive(Clone, Debug)]
pub struct MeasureFamily {
    members: Vec<RiskFunctional>,
    generator: Option<GeneratorTag>,
}

/// Marks a family as a finite probe of an infinite indexed family.
#[derive(Clone, Debug)]
pub struct GeneratorTag {
    pub parameter: String,
    pub probe_budget: usize,
}

impl MeasureFamily {
    pub fn new(members: Vec<RiskFunctional>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::config("measure family must be nonempty"));
        }
        let space = members[0].space().clone();
        for m in &members[1..] {
            if *m.space() != space {
                return Err(Error::config(
                    "all family members must share one probability space",
                ));
            }
        }
        Ok(MeasureFamily {
            members,
            generator: None,
        })
    }

    pub fn with_generator(mut self, tag: GeneratorTag) -> Self {
        self.generator = Some(tag);
        self
    }

    pub fn members(&self) -> &[RiskFunctional] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn generator(&self) -> Option<&GeneratorTag> {
        self.generator.as_ref()
    }

    pub fn space(&self) -> &ProbSpace {
        self.members[0].space()
    }

    /// Pointwise minimum with the attaining index.
    pub fn min_eval(&self, x: &Position) -> Result<MinEval> {
        let mut best = f64::INFINITY;
        let mut argmin = 0usize;
        for (i, m) in self.members.iter().enumerate() {
            let v = m.eval(x)?;
            if v < best {
                best = v;
                argmin = i;
            }
        }
        Ok(MinEval {
            value: best,
            argmin,
        })
    }

    pub fn values_at_zero(&self) -> Result<Vec<f64>> {
        self.members.iter().map(|m| m.value_at_zero()).collect()
    }
}

/// Pointwise minimum of a family as a single functional.
pub fn min_of(family: &MeasureFamily) -> Result<RiskFunctional> {
    let members: Vec<Expr> = family.members().iter().map(|m| m.expr().clone()).collect();
    let label = format!("min_of({} members)", members.len());
    Ok(RiskFunctional::new(
        Expr::MinOf { members },
        family.space().clone(),
        label,
    ))
}

/// Penalty `f(lambda) = lambda` for `lambda >= epsilon`, else `epsilon`.
/// Nonnegative, minimized at `epsilon`, unbounded along the grid.
pub fn penalty(epsilon: f64, lambda: f64) -> f64 {
    if lambda >= epsilon {
        lambda
    } else {
        epsilon
    }
}

/// Parameters of a penalized family `{ base + f(lambda) }`.
#[derive(Clone, Debug)]
pub struct PenaltySpec {
    pub epsilon: f64,
    pub grid: Vec<f64>,
}

/// Builds the penalized family on a finite probe grid.
///
/// The grid must contain `epsilon` so the pointwise minimum `base + f(epsilon)`
/// is reproduced exactly, and `f(epsilon) > -base(0)` must hold (the minimum
/// over the family must exceed the base's acceptance of zero, otherwise the
/// construction's hypothesis fails and we reject rather than guess).
pub fn penalized_family(base: &RiskFunctional, spec: &PenaltySpec) -> Result<MeasureFamily> {
    if !(spec.epsilon > 0.0) {
        return Err(Error::config(format!(
            "penalty epsilon must be > 0, got {}",
            spec.epsilon
        )));
    }
    if spec.grid.is_empty() {
        return Err(Error::config("penalty grid must be nonempty"));
    }
    if !spec.grid.contains(&spec.epsilon) {
        return Err(Error::config(format!(
            "penalty grid must contain epsilon = {}",
            spec.epsilon
        )));
    }
    let rho0 = base.value_at_zero()?;
    let f_eps = penalty(spec.epsilon, spec.epsilon);
    if !(f_eps > -rho0) {
        return Err(Error::config(format!(
            "penalized family needs f(epsilon) > -base(0): f(epsilon) = {f_eps}, base(0) = {rho0}"
        )));
    }
    let members = spec
        .grid
        .iter()
        .map(|&l| {
            base.translate(penalty(spec.epsilon, l))
                .with_label(format!("{} + f({l})", base.label()))
        })
        .collect::<Vec<_>>();
    Ok(MeasureFamily::new(members)?.with_generator(GeneratorTag {
        parameter: "lambda".to_string(),
        probe_budget: spec.grid.len(),
    }))
}
