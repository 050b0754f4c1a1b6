//! Acceptance sets as membership oracles.
//!
//! A set is built from one of five structure tags: the sublevel set of a risk
//! functional, the upward orthant at a position, the convex hull of two
//! orthants, and unions or intersections of other sets. Every tag yields a
//! monotone set by construction.
//!
//! The induced risk measure `inf { m : X + m in A }` is computed by a closed
//! form where the tag provides one (orthant, hull) and otherwise by bisection
//! on the cash level, with a doubling bracket expansion from 0 capped at
//! `BRACKET_CAP`. A cap breach signals a genuinely non-finite induced value,
//! reported as a distinguished outcome rather than an error used for control
//! flow.

use serde::{Deserialize, Serialize};

use crate::axioms::{PropertyReport, Verdict, Witness};
use crate::error::{Error, Result};
use crate::measures::RiskFunctional;
use crate::rng;
use crate::space::{Position, ProbSpace, SamplerConfig};

/// Doubling expansion cap for bracket search. All catalog measures on sampled
/// positions stay far below this, so a breach signals a non-finite value.
pub const BRACKET_CAP: f64 = 1e6;

/// Default bisection tolerance for induced measures.
pub const DEFAULT_BISECT_TOL: f64 = 1e-9;

/// Default draw budget for rejection sampling of set members.
pub const DEFAULT_REJECTION_BUDGET: usize = 100_000;

/// Default shrink factors probed by the set star-shapedness check, covering
/// both the near-0 and near-1 regimes.
pub const SET_STAR_LAMBDAS: [f64; 6] = [
    1.0 / 16.0,
    1.0 / 8.0,
    1.0 / 4.0,
    1.0 / 2.0,
    3.0 / 4.0,
    15.0 / 16.0,
];

const RANDOM_LAMBDAS_PER_SAMPLE: usize = 8;
const STREAM_SET_MEMBER: u64 = 0x200;
const STREAM_SET_SCALAR: u64 = 0x201;

/// Structure tag of an acceptance set.
#[derive(Clone, Debug)]
pub enum SetStructure {
    /// `{ X : rho(X) <= 0 }`.
    FromMeasure(RiskFunctional),
    /// `{ X : X >= z componentwise }`.
    Orthant {
        z: Position,
    },
    /// `conv( orthant(z) U orthant(y) )`, i.e. positions dominating some
    /// point of the segment `[z, y]`.
    Hull {
        z: Position,
        y: Position,
    },
    Union(Vec<AcceptanceSet>),
    Intersection(Vec<AcceptanceSet>),
}

/// Membership oracle with a structure tag; monotone and deterministic.
#[derive(Clone, Debug)]
pub struct AcceptanceSet {
    structure: SetStructure,
    space: ProbSpace,
}

/// Result of an induced-measure computation; the non-finite cases mean no
/// translate of the position is accepted (plus) or every translate is
/// accepted down to the bracket cap (minus).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum InducedValue {
    Finite(f64),
    PlusInfinite,
    MinusInfinite,
}

/// Bisection bracket: `membership(x + lo)` is out, `membership(x + hi)` is in.
#[derive(Clone, Copy, Debug)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// `{ X : rho(X) <= 0 }` with exact comparison at evaluation precision.
pub fn from_measure(m: RiskFunctional) -> AcceptanceSet {
    let space = m.space().clone();
    AcceptanceSet {
        structure: SetStructure::FromMeasure(m),
        space,
    }
}

/// Upward orthant `{ X : X >= z }`.
pub fn orthant_at(space: ProbSpace, z: Position) -> Result<AcceptanceSet> {
    space.check_position(&z)?;
    Ok(AcceptanceSet {
        structure: SetStructure::Orthant { z },
        space,
    })
}

/// Convex hull of the orthants at `z` and `y`.
pub fn hull_of_orthants(space: ProbSpace, z: Position, y: Position) -> Result<AcceptanceSet> {
    space.check_position(&z)?;
    space.check_position(&y)?;
    Ok(AcceptanceSet {
        structure: SetStructure::Hull { z, y },
        space,
    })
}

pub fn union(sets: Vec<AcceptanceSet>) -> Result<AcceptanceSet> {
    combine(sets, true)
}

pub fn intersection(sets: Vec<AcceptanceSet>) -> Result<AcceptanceSet> {
    combine(sets, false)
}

fn combine(sets: Vec<AcceptanceSet>, is_union: bool) -> Result<AcceptanceSet> {
    if sets.is_empty() {
        return Err(Error::config("set combination needs at least one member"));
    }
    let space = sets[0].space.clone();
    for s in &sets[1..] {
        if s.space != space {
            return Err(Error::config(
                "all combined sets must share one probability space",
            ));
        }
    }
    let structure = if is_union {
        SetStructure::Union(sets)
    } else {
        SetStructure::Intersection(sets)
    };
    Ok(AcceptanceSet { structure, space })
}

impl AcceptanceSet {
    pub fn space(&self) -> &ProbSpace {
        &self.space
    }

    pub fn structure(&self) -> &SetStructure {
        &self.structure
    }

    /// Deterministic membership test.
    pub fn member(&self, x: &Position) -> Result<bool> {
        self.space.check_position(x)?;
        match &self.structure {
            SetStructure::FromMeasure(m) => Ok(m.eval(x)? <= 0.0),
            SetStructure::Orthant { z } => {
                Ok(z.values().iter().zip(x.values()).all(|(zi, xi)| xi >= zi))
            }
            SetStructure::Hull { z, y } => Ok(hull_member(z.values(), y.values(), x.values())),
            SetStructure::Union(sets) => {
                for s in sets {
                    if s.member(x)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            SetStructure::Intersection(sets) => {
                for s in sets {
                    if !s.member(x)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// `inf { m : X + m in A }` within `tol`, or the distinguished non-finite
    /// outcomes when the bracket expansion caps out.
    pub fn induced_value(&self, x: &Position, tol: f64) -> Result<InducedValue> {
        if !(tol > 0.0) {
            return Err(Error::config(format!("tolerance must be > 0, got {tol}")));
        }
        self.space.check_position(x)?;
        match &self.structure {
            SetStructure::Orthant { z } => Ok(InducedValue::Finite(
                z.values()
                    .iter()
                    .zip(x.values())
                    .map(|(zi, xi)| zi - xi)
                    .fold(f64::NEG_INFINITY, f64::max),
            )),
            SetStructure::Hull { z, y } => Ok(InducedValue::Finite(hull_minimax(
                z.values(),
                y.values(),
                x.values(),
            ))),
            _ => self.induced_by_bisection(x, tol),
        }
    }

    /// Finite induced measure; non-finite outcomes become numerical errors.
    pub fn induced_measure(&self, x: &Position, tol: f64) -> Result<f64> {
        match self.induced_value(x, tol)? {
            InducedValue::Finite(v) => Ok(v),
            InducedValue::PlusInfinite => Err(Error::numerical(
                "induced measure is +infinite: no cash level up to the bracket cap is accepted",
            )),
            InducedValue::MinusInfinite => Err(Error::numerical(
                "induced measure is -infinite: every cash level down to the bracket cap is accepted",
            )),
        }
    }

    /// Wraps the induced measure as an evaluable functional.
    pub fn as_functional(&self, tol: f64) -> Result<RiskFunctional> {
        RiskFunctional::induced_by(self.clone(), tol)
    }

    fn induced_by_bisection(&self, x: &Position, tol: f64) -> Result<InducedValue> {
        let bracket = match self.find_bracket(x)? {
            Ok(b) => b,
            Err(v) => return Ok(v),
        };
        let Bracket { mut lo, mut hi } = bracket;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.member(&x.shift(mid))? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // hi is an accepted level within tol of the infimum
        Ok(InducedValue::Finite(hi))
    }

    /// Doubling expansion from m = 0; `Err` carries the non-finite outcome.
    fn find_bracket(&self, x: &Position) -> Result<std::result::Result<Bracket, InducedValue>> {
        if self.member(x)? {
            let mut lo = -1.0;
            let mut hi = 0.0;
            while self.member(&x.shift(lo))? {
                hi = lo;
                lo *= 2.0;
                if lo < -BRACKET_CAP {
                    return Ok(Err(InducedValue::MinusInfinite));
                }
            }
            Ok(Ok(Bracket { lo, hi }))
        } else {
            let mut lo = 0.0;
            let mut hi = 1.0;
            while !self.member(&x.shift(hi))? {
                lo = hi;
                hi *= 2.0;
                if hi > BRACKET_CAP {
                    return Ok(Err(InducedValue::PlusInfinite));
                }
            }
            Ok(Ok(Bracket { lo, hi }))
        }
    }

    /// Draws a member by rejection sampling; `None` when the budget runs out.
    fn sample_member(
        &self,
        sampler: &SamplerConfig,
        draw_counter: &mut u64,
        budget: &mut usize,
    ) -> Result<Option<Position>> {
        while *budget > 0 {
            *budget -= 1;
            let x = self.space.sample_position(
                sampler,
                STREAM_SET_MEMBER
                    .wrapping_mul(0x1_0000_0000)
                    .wrapping_add(*draw_counter),
            );
            *draw_counter += 1;
            if self.member(&x)? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

/// Hull membership: some `t in [0, 1]` has `x >= t z + (1-t) y` componentwise,
/// decided exactly by intersecting the per-coordinate feasible t-intervals.
pub(crate) fn hull_member(z: &[f64], y: &[f64], x: &[f64]) -> bool {
    let mut t_lo = 0.0f64;
    let mut t_hi = 1.0f64;
    for i in 0..x.len() {
        let d = z[i] - y[i];
        let r = x[i] - y[i];
        if d > 0.0 {
            t_hi = t_hi.min(r / d);
        } else if d < 0.0 {
            t_lo = t_lo.max(r / d);
        } else if r < 0.0 {
            return false;
        }
    }
    t_lo <= t_hi
}

/// `min_{t in [0,1]} max_i (t z_i + (1-t) y_i - x_i)`: the upper envelope of
/// lines in t is convex piecewise linear, so the minimum sits at an endpoint
/// or at a pairwise line intersection. Enumerating those breakpoints solves
/// the problem exactly.
pub(crate) fn hull_minimax(z: &[f64], y: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    let slope = |i: usize| z[i] - y[i];
    let intercept = |i: usize| y[i] - x[i];
    let envelope = |t: f64| {
        (0..n)
            .map(|i| slope(i) * t + intercept(i))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best = envelope(0.0).min(envelope(1.0));
    for i in 0..n {
        for j in (i + 1)..n {
            let da = slope(i) - slope(j);
            if da != 0.0 {
                let t = (intercept(j) - intercept(i)) / da;
                if (0.0..=1.0).contains(&t) {
                    best = best.min(envelope(t));
                }
            }
        }
    }
    best
}

/// Samples members of `a` and checks the segment toward `v` stays inside.
///
/// Returns a failing witness `(X, lambda)`, a pass over all tested members,
/// or an inconclusive verdict when rejection sampling finds no member within
/// the draw budget.
pub fn is_star_shaped_at(
    a: &AcceptanceSet,
    v: &Position,
    sampler: &SamplerConfig,
    lambdas: &[f64],
) -> Result<PropertyReport> {
    a.space.check_position(v)?;
    check_members(a, sampler, |a, sampler, x, k| {
        for l in lambdas
            .iter()
            .copied()
            .chain((0..RANDOM_LAMBDAS_PER_SAMPLE).map(|i| {
                rng::unit(
                    sampler.seed,
                    STREAM_SET_SCALAR,
                    k * RANDOM_LAMBDAS_PER_SAMPLE as u64 + i as u64,
                )
            }))
        {
            if !(0.0 < l && l < 1.0) {
                continue;
            }
            let point = x.scale(l).add(&v.scale(1.0 - l))?;
            if !a.member(&point)? {
                return Ok(Some(Witness {
                    positions: vec![x.values().to_vec()],
                    scalars: vec![l],
                    margin: set_violation_margin(a, &point)?,
                }));
            }
        }
        Ok(None)
    })
}

/// Samples member pairs and checks their convex combinations stay inside.
pub fn is_convex_sampled(a: &AcceptanceSet, sampler: &SamplerConfig) -> Result<PropertyReport> {
    let mut draw_counter = 0u64;
    let mut budget = DEFAULT_REJECTION_BUDGET;
    let mut tested = 0usize;
    let mut witness = None;

    'outer: for k in 0..sampler.count as u64 {
        let Some(x) = a.sample_member(sampler, &mut draw_counter, &mut budget)? else {
            break;
        };
        let Some(y) = a.sample_member(sampler, &mut draw_counter, &mut budget)? else {
            break;
        };
        tested += 1;
        let mut weights = sampler.weight_grid.clone();
        for i in 0..4 {
            weights.push(rng::unit(sampler.seed, STREAM_SET_SCALAR + 1, k * 4 + i));
        }
        for w in weights {
            if !(0.0 < w && w < 1.0) {
                continue;
            }
            let point = x.combine(w, &y)?;
            if !a.member(&point)? {
                witness = Some(Witness {
                    positions: vec![x.values().to_vec(), y.values().to_vec()],
                    scalars: vec![w],
                    margin: set_violation_margin(a, &point)?,
                });
                break 'outer;
            }
        }
    }

    Ok(finish_set_report(
        crate::axioms::Property::Convexity,
        witness,
        tested,
        sampler,
    ))
}

fn check_members<F>(
    a: &AcceptanceSet,
    sampler: &SamplerConfig,
    mut probe: F,
) -> Result<PropertyReport>
where
    F: FnMut(&AcceptanceSet, &SamplerConfig, &Position, u64) -> Result<Option<Witness>>,
{
    let mut draw_counter = 0u64;
    let mut budget = DEFAULT_REJECTION_BUDGET;
    let mut tested = 0usize;
    let mut witness = None;
    for k in 0..sampler.count as u64 {
        let Some(x) = a.sample_member(sampler, &mut draw_counter, &mut budget)? else {
            break;
        };
        tested += 1;
        if let Some(w) = probe(a, sampler, &x, k)? {
            witness = Some(w);
            break;
        }
    }
    Ok(finish_set_report(
        crate::axioms::Property::StarShapedness,
        witness,
        tested,
        sampler,
    ))
}

fn finish_set_report(
    property: crate::axioms::Property,
    witness: Option<Witness>,
    tested: usize,
    sampler: &SamplerConfig,
) -> PropertyReport {
    let verdict = if witness.is_some() {
        Verdict::Fail
    } else if tested == 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    PropertyReport {
        property,
        verdict,
        witness,
        samples: tested,
        tol: DEFAULT_BISECT_TOL,
        seed: sampler.seed,
    }
}

/// Cash distance of an excluded point to the set, used as a witness margin.
fn set_violation_margin(a: &AcceptanceSet, point: &Position) -> Result<f64> {
    Ok(match a.induced_value(point, DEFAULT_BISECT_TOL)? {
        InducedValue::Finite(v) => v,
        InducedValue::PlusInfinite => BRACKET_CAP,
        InducedValue::MinusInfinite => -BRACKET_CAP,
    })
}
