//! Turnkey counterexample reproductions.
//!
//! * [`example1`] — the penalized family `{ base + f(lambda) }` whose
//!   pointwise minimum `base + f(epsilon)` is convex monetary but not
//!   star-shaped: scaling a constant position by `k > 1` violates the star
//!   inequality by exactly `(f(epsilon) + base(0)) * (1 - k)`.
//! * [`example2_sweep`] — the floor staircase. The induced measure of
//!   `{ X : base(floor(X)) <= 0 }` is monetary but fails star-shapedness
//!   under every translation `c`; the sweep produces, for each candidate
//!   `c`, a strict witness with a shrink factor from the dyadic grid
//!   `lambda_j = 1 - 2^-j`.
//! * [`figure_data`] — the cone vs. staircase geometry on a two-outcome
//!   space: the acceptance boundary of a scenario-max functional and of its
//!   floor composition over a fixed window.
//!
//! For translations `c >= 0` the induced staircase measure is exactly linear
//! along the constant diagonal, so constant positions cannot witness the
//! failure; the sweep then scales a staircase corner `(a + 0.9, -a, 0, ...)`
//! to the probed dyadic depth instead. Constant witnesses still appear for
//! `c < 0`, and the classical constant-position ratio survey is reported
//! alongside (see [`floor_ratio`]).

use serde::{Deserialize, Serialize};

use crate::acceptance::{from_measure, AcceptanceSet, DEFAULT_BISECT_TOL};
use crate::axioms::{self, Property};
use crate::error::{Error, Result};
use crate::measures::{min_of, penalized_family, penalty, Expr, PenaltySpec, RiskFunctional};
use crate::space::{Position, SamplerConfig};

/// Grid factors (times epsilon) materializing the penalized family.
pub const PENALTY_GRID_FACTORS: [f64; 4] = [0.5, 1.0, 2.0, 10.0];

/// Default dyadic search depth for the floor sweep.
pub const DEFAULT_SWEEP_DEPTH: u32 = 40;

/// Margins below this are treated as bisection noise, not violations.
const SWEEP_MARGIN_GUARD: f64 = 1e-7;

/// Figure window, x then y.
pub const FIGURE_WINDOW: ((f64, f64), (f64, f64)) = ((-4.0, 4.0), (-2.0, 4.0));

/// `(floor(lambda x) - lambda floor(x)) / (1 - lambda)` for a constant
/// position with value `x`: the constant-position star-shapedness ratio of a
/// floor-composed functional.
pub fn floor_ratio(lambda: f64, x: f64) -> f64 {
    ((lambda * x).floor() - lambda * x.floor()) / (1.0 - lambda)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KMargin {
    pub k: f64,
    /// `rho_eps(k X) - k rho_eps(X)` at the constant position X = 1.
    pub measured_constant: f64,
    /// `(f(epsilon) + base(0)) * (1 - k)`.
    pub formula: f64,
    pub constant_deviation: f64,
    /// Largest deviation from the formula over sampled positions; present
    /// only when the base is positively homogeneous (then the violation is
    /// position-independent).
    pub max_sample_deviation: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Example1Report {
    pub base: String,
    pub epsilon: f64,
    pub base_at_zero: f64,
    pub base_positively_homogeneous: bool,
    /// Samples on which `min(family) == base + f(epsilon)` was confirmed.
    pub min_verified_samples: usize,
    pub margins: Vec<KMargin>,
}

/// Builds the penalized family and measures the star-shapedness violation of
/// its pointwise minimum for each scaling `k`.
pub fn example1(
    base: &RiskFunctional,
    epsilon: f64,
    ks: &[f64],
    sampler: &SamplerConfig,
) -> Result<Example1Report> {
    for &k in ks {
        if !(k >= 1.0) {
            return Err(Error::config(format!(
                "scalings must satisfy k >= 1, got {k}"
            )));
        }
    }
    let rho0 = base.value_at_zero()?;
    let f_eps = penalty(epsilon, epsilon);
    if !(epsilon > 0.0) || !(f_eps > -rho0) {
        return Err(Error::config(format!(
            "penalized construction needs epsilon > 0 and f(epsilon) > -base(0); \
             got epsilon = {epsilon}, base(0) = {rho0}"
        )));
    }
    let grid: Vec<f64> = PENALTY_GRID_FACTORS.iter().map(|f| f * epsilon).collect();
    let family = penalized_family(base, &PenaltySpec { epsilon, grid })?;
    let rho_eps = min_of(&family)?;
    let space = base.space().clone();

    // the family minimum reproduces base + f(epsilon) sample for sample
    let verify = sampler.count.min(200);
    for k in 0..verify as u64 {
        let x = space.sample_position(sampler, k);
        let diff = (family.min_eval(&x)?.value - (base.eval(&x)? + f_eps)).abs();
        if diff > 1e-12 {
            return Err(Error::numerical(format!(
                "family minimum deviates from base + f(epsilon) by {diff} at sample {k}"
            )));
        }
    }

    let pos_hom = axioms::check(
        base,
        Property::PositiveHomogeneity,
        &sampler.clone().with_count(sampler.count.min(500)),
        1e-7,
    )?
    .passed();

    let ones = space.constant(1.0);
    let mut margins = Vec::new();
    for &k in ks {
        let measured_constant = rho_eps.eval(&ones.scale(k))? - k * rho_eps.eval(&ones)?;
        let formula = (f_eps + rho0) * (1.0 - k);
        let max_sample_deviation = if pos_hom {
            let mut worst = 0.0f64;
            for s in 0..verify as u64 {
                let x = space.sample_position(sampler, s);
                let measured = rho_eps.eval(&x.scale(k))? - k * rho_eps.eval(&x)?;
                worst = worst.max((measured - formula).abs());
            }
            Some(worst)
        } else {
            None
        };
        margins.push(KMargin {
            k,
            measured_constant,
            formula,
            constant_deviation: (measured_constant - formula).abs(),
            max_sample_deviation,
        });
    }

    Ok(Example1Report {
        base: base.label().to_string(),
        epsilon,
        base_at_zero: rho0,
        base_positively_homogeneous: pos_hom,
        min_verified_samples: verify,
        margins,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepWitness {
    pub j: u32,
    pub lambda: f64,
    /// Position W with `(rho_A - c)(lambda W) > lambda (rho_A - c)(W)`.
    pub witness: Vec<f64>,
    pub kind: String,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepEntry {
    pub c: f64,
    pub found: Option<SweepWitness>,
    /// First dyadic depth at which the constant-position floor ratio drops
    /// below `c + base(0)` (the classical constant-position computation).
    pub ratio_first_j: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Example2Report {
    pub base: String,
    pub depth: u32,
    pub entries: Vec<SweepEntry>,
    pub all_found: bool,
}

/// Sweeps candidate translations of the induced floor-staircase measure and
/// finds, for each, a strict star-shapedness witness within the dyadic depth.
///
/// A sweep entry without a witness signals an implementation bug rather than
/// a mathematical possibility; the report flags it via `all_found`.
pub fn example2_sweep(base: &RiskFunctional, cs: &[f64], depth: u32) -> Result<Example2Report> {
    let raw = base.floor_compose();
    let set = from_measure(raw);
    let space = base.space().clone();
    let rho0 = base.value_at_zero()?;

    let mut entries = Vec::new();
    for &c in cs {
        let mut found = None;
        let mut ratio_first_j = None;
        for j in 1..=depth {
            let lambda = 1.0 - 0.5f64.powi(j as i32);
            if ratio_first_j.is_none() && floor_ratio(lambda, 1.0) < c + rho0 {
                ratio_first_j = Some(j);
            }
            if found.is_none() {
                for (kind, x) in witness_candidates(&space, c, j) {
                    if let Some(margin) = verify_star_violation(&set, &x, c, lambda)? {
                        found = Some(SweepWitness {
                            j,
                            lambda,
                            witness: x.shift(-c).values().to_vec(),
                            kind: kind.to_string(),
                            margin,
                        });
                        break;
                    }
                }
            }
            if found.is_some() && ratio_first_j.is_some() {
                break;
            }
        }
        entries.push(SweepEntry {
            c,
            found,
            ratio_first_j,
        });
    }

    let all_found = entries.iter().all(|e| e.found.is_some());
    Ok(Example2Report {
        base: base.label().to_string(),
        depth,
        entries,
        all_found,
    })
}

/// Candidate set-level witnesses at dyadic depth `j` for the center `c`:
/// the constant position 1 and a staircase corner scaled to the depth.
fn witness_candidates(
    space: &crate::space::ProbSpace,
    c: f64,
    j: u32,
) -> Vec<(&'static str, Position)> {
    let mut out = vec![("constant", space.constant(1.0))];
    if space.len() >= 2 && j < 53 {
        let pow = 2.0f64.powi(j as i32);
        let lo_a = c + 0.9 * (pow - 1.0);
        let hi_a = pow - c;
        let mut a = lo_a.floor() + 1.0;
        a = a.max(1.0).max((-c).floor() + 1.0);
        if a > lo_a && a < hi_a {
            let mut values = vec![0.0; space.len()];
            values[0] = a + 0.9;
            values[1] = -a;
            if let Ok(x) = space.position(values) {
                out.push(("corner", x));
            }
        }
    }
    out
}

/// Confirms `(rho_A - c)(lambda W) > lambda (rho_A - c)(W)` strictly for
/// `W = x - c`, evaluating the induced measure by bisection. Returns the
/// margin, or `None` when the candidate does not violate.
fn verify_star_violation(
    set: &AcceptanceSet,
    x: &Position,
    c: f64,
    lambda: f64,
) -> Result<Option<f64>> {
    // quick reject on the membership level: x must be accepted and the chord
    // point toward the constant center must leave the set
    if !set.member(x)? {
        return Ok(None);
    }
    let chord = x
        .scale(lambda)
        .add(&set.space().constant((1.0 - lambda) * c))?;
    if set.member(&chord)? {
        return Ok(None);
    }
    let w = x.shift(-c);
    let sigma_w = set.induced_measure(&w, DEFAULT_BISECT_TOL)? - c;
    let sigma_lw = set.induced_measure(&w.scale(lambda), DEFAULT_BISECT_TOL)? - c;
    let margin = sigma_lw - lambda * sigma_w;
    if margin > SWEEP_MARGIN_GUARD {
        Ok(Some(margin))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FigureReport {
    pub scenarios: Vec<Vec<f64>>,
    /// (x_min, x_max), (y_min, y_max)
    pub window: ((f64, f64), (f64, f64)),
    /// Boundary polyline of the cone `{ x : scenario_max(x) <= 0 }`.
    pub cone: Vec<[f64; 2]>,
    /// Boundary polyline of the staircase `{ x : scenario_max(floor x) <= 0 }`.
    pub staircase: Vec<[f64; 2]>,
    /// Per-column staircase heights: the region in column `[i, i+1)` is
    /// `y >= height`.
    pub staircase_heights: Vec<(i64, i64)>,
}

impl FigureReport {
    /// Plain vertex-list export: one `x y` pair per line, one block per
    /// polyline.
    pub fn vertex_list_string(&self) -> String {
        let mut out = String::new();
        for (name, pts) in [("cone", &self.cone), ("staircase", &self.staircase)] {
            out.push_str(name);
            out.push('\n');
            for p in pts {
                out.push_str(&format!("{} {}\n", p[0], p[1]));
            }
        }
        out
    }

    /// Membership in the staircase region as defined by the emitted heights.
    pub fn staircase_region_contains(&self, x: f64, y: f64) -> bool {
        let col = x.floor() as i64;
        self.staircase_heights
            .iter()
            .find(|(i, _)| *i == col)
            .map(|(_, h)| y >= *h as f64)
            .unwrap_or(false)
    }

    /// Membership in the cone region.
    pub fn cone_region_contains(&self, x: f64, y: f64) -> bool {
        self.scenarios.iter().all(|q| q[0] * x + q[1] * y >= 0.0)
    }
}

/// Extracts the cone and staircase boundary polylines of a two-outcome
/// scenario-max functional over the fixed window.
///
/// Cone vertices are exact ratios of the scenario data; staircase vertices
/// are integers found by scanning lattice cells with the measure itself.
pub fn figure_data(coherent: &RiskFunctional) -> Result<FigureReport> {
    let scenarios =
        match coherent.expr() {
            Expr::ScenarioMax { scenarios } => scenarios.clone(),
            _ => return Err(Error::config(
                "figure_data needs a scenario_max functional (its acceptance cone is polyhedral)",
            )),
        };
    let space = coherent.space().clone();
    if space.len() != 2 {
        return Err(Error::config(format!(
            "figure_data needs a 2-outcome space, got {}",
            space.len()
        )));
    }
    for (k, q) in scenarios.iter().enumerate() {
        if q.iter().any(|&p| p <= 0.0) {
            return Err(Error::config(format!(
                "figure_data needs strictly positive scenario entries, scenario {k} has a zero"
            )));
        }
    }

    let ((x_min, x_max), (y_min, y_max)) = FIGURE_WINDOW;

    // cone boundary: all scenario half-plane boundaries pass through the
    // origin, so the envelope has one breakpoint there
    let ratios: Vec<f64> = scenarios.iter().map(|q| q[0] / q[1]).collect();
    let r_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let cone = vec![[x_min, -x_min * r_max], [0.0, 0.0], [x_max, -x_max * r_min]];

    // staircase heights by lattice-cell scan with the measure itself
    let cols: Vec<i64> = (x_min as i64..x_max as i64).collect();
    let scan_lo = y_min as i64 - 1;
    let scan_hi = y_max as i64 + 2;
    let mut heights = Vec::with_capacity(cols.len());
    for &i in &cols {
        let mut h = None;
        for jj in scan_lo..=scan_hi {
            let corner = space.position(vec![i as f64, jj as f64])?;
            if coherent.eval(&corner)? <= 0.0 {
                h = Some(jj);
                break;
            }
        }
        let h = h.ok_or_else(|| {
            Error::numerical(format!(
                "no accepted lattice cell in column {i} within the figure window"
            ))
        })?;
        heights.push((i, h));
    }

    // step polyline with collinear merge
    let mut staircase: Vec<[f64; 2]> = Vec::new();
    push_vertex(&mut staircase, [x_min, heights[0].1 as f64]);
    for (idx, &(i, h)) in heights.iter().enumerate() {
        push_vertex(&mut staircase, [(i + 1) as f64, h as f64]);
        if idx + 1 < heights.len() {
            let h_next = heights[idx + 1].1;
            if h_next != h {
                push_vertex(&mut staircase, [(i + 1) as f64, h_next as f64]);
            }
        }
    }

    Ok(FigureReport {
        scenarios,
        window: FIGURE_WINDOW,
        cone,
        staircase,
        staircase_heights: heights,
    })
}

fn push_vertex(pts: &mut Vec<[f64; 2]>, p: [f64; 2]) {
    if pts.last() == Some(&p) {
        return;
    }
    if pts.len() >= 2 {
        let a = pts[pts.len() - 2];
        let b = pts[pts.len() - 1];
        if (a[0] == b[0] && b[0] == p[0]) || (a[1] == b[1] && b[1] == p[1]) {
            pts.pop();
        }
    }
    pts.push(p);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::ProbSpace;

    fn half_half() -> ProbSpace {
        ProbSpace::new(vec![0.5, 0.5]).unwrap()
    }

    fn sampler() -> SamplerConfig {
        SamplerConfig::new(42, 200, -5.0, 5.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn example1_base_cases() {
        let ne = RiskFunctional::neg_expectation(half_half());
        let r = example1(&ne, 1.0, &[1.0, 2.0], &sampler()).unwrap();
        assert!(r.base_positively_homogeneous);
        assert!(close(r.margins[0].measured_constant, 0.0, 1e-12));
        assert!(close(r.margins[1].measured_constant, -1.0, 1e-12));
        assert!(close(r.margins[1].formula, -1.0, 1e-15));
        assert!(r.margins[1].max_sample_deviation.unwrap() <= 1e-12);
    }

    #[test]
    fn example1_es_base() {
        let s = ProbSpace::uniform(4).unwrap();
        let es = RiskFunctional::es(s, 0.5).unwrap();
        let r = example1(&es, 0.5, &[3.0], &sampler()).unwrap();
        assert!(close(r.margins[0].measured_constant, -1.0, 1e-12));
        assert!(r.margins[0].max_sample_deviation.unwrap() <= 1e-12);
    }

    #[test]
    fn example1_rejects_violated_hypothesis() {
        let ne = RiskFunctional::neg_expectation(half_half());
        assert!(example1(&ne, -1.0, &[2.0], &sampler()).is_err());
        // base(0) = -2 needs f(epsilon) > 2, which epsilon = 1 violates
        let sunk = ne.translate(-2.0);
        assert!(example1(&sunk, 1.0, &[2.0], &sampler()).is_err());
        assert!(example1(&ne, 1.0, &[0.5], &sampler()).is_err());
    }

    #[test]
    fn floor_ratio_values() {
        assert!(close(floor_ratio(0.5, 1.0), -1.0, 1e-15));
        assert!(close(floor_ratio(0.9, 1.0), -9.0, 1e-9));
        let l5 = 1.0 - 0.5f64.powi(5);
        assert!(close(floor_ratio(l5, 1.0), -31.0, 1e-9));
    }

    #[test]
    fn sweep_finds_witnesses_for_small_grid() {
        let ne = RiskFunctional::neg_expectation(half_half());
        let r = example2_sweep(&ne, &[-5.0, 0.0, 3.0], 40).unwrap();
        assert!(r.all_found);
        // ratio survey matches the constant-position computation
        assert_eq!(r.entries[1].ratio_first_j, Some(1)); // c = 0: -1 < 0
        let e = &r.entries[0]; // c = -5: first ratio below -5 is -7 at j = 3
        assert_eq!(e.ratio_first_j, Some(3));
        for entry in &r.entries {
            let w = entry.found.as_ref().unwrap();
            assert!(w.margin > 1e-7);
            assert!(w.j <= 40);
        }
    }

    #[test]
    fn sweep_witnesses_reverify_via_bisection() {
        let ne = RiskFunctional::neg_expectation(half_half());
        let set = from_measure(ne.floor_compose());
        let r = example2_sweep(&ne, &[0.0, 2.0], 40).unwrap();
        for entry in &r.entries {
            let w = entry.found.as_ref().unwrap();
            let pos = set.space().position(w.witness.clone()).unwrap();
            let sigma = |p: &Position| -> f64 { set.induced_measure(p, 1e-9).unwrap() - entry.c };
            let margin = sigma(&pos.scale(w.lambda)) - w.lambda * sigma(&pos);
            assert!(margin > 1e-7, "c = {}: margin {margin}", entry.c);
            assert!(close(margin, w.margin, 1e-6));
        }
    }

    #[test]
    fn figure_geometry_default_scenarios() {
        let s = half_half();
        let m = RiskFunctional::scenario_max(s, vec![vec![0.5, 0.5], vec![1.0 / 3.0, 2.0 / 3.0]])
            .unwrap();
        let fig = figure_data(&m).unwrap();
        // cone slopes -1 on the left half, -1/2 on the right half
        assert_eq!(fig.cone, vec![[-4.0, 4.0], [0.0, 0.0], [4.0, -2.0]]);
        // the staircase runs through the pinned vertex sequence
        let run = [[0.0, 1.0], [0.0, 0.0], [2.0, 0.0], [2.0, -1.0]];
        let found = fig.staircase.windows(4).any(|w| w == run);
        assert!(found, "staircase {:?}", fig.staircase);
    }

    #[test]
    fn figure_regions_agree_on_integer_lattice() {
        let s = half_half();
        let m = RiskFunctional::scenario_max(s, vec![vec![0.5, 0.5], vec![1.0 / 3.0, 2.0 / 3.0]])
            .unwrap();
        let fig = figure_data(&m).unwrap();
        for i in -4..4 {
            for j in -2..4 {
                let (x, y) = (i as f64, j as f64);
                assert_eq!(
                    fig.cone_region_contains(x, y),
                    fig.staircase_region_contains(x, y),
                    "disagreement at integer point ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn figure_rejects_wrong_structure() {
        let s = half_half();
        assert!(figure_data(&RiskFunctional::neg_expectation(s.clone())).is_err());
        let s3 = ProbSpace::uniform(3).unwrap();
        let m3 = RiskFunctional::scenario_max(s3, vec![vec![0.4, 0.3, 0.3]]).unwrap();
        assert!(figure_data(&m3).is_err());
    }
}
