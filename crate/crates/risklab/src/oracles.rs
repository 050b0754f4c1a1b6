//! Independent brute-force baselines.
//!
//! These oracles back the tests and the `oracle` CLI subcommand. They are
//! deliberately slow and simple — plain linear scans with no shortcuts — so
//! they cannot share bugs with the main solvers they cross-check.

use crate::acceptance::AcceptanceSet;
use crate::axioms::{Property, Witness};
use crate::error::{Error, Result};
use crate::measures::RiskFunctional;
use crate::space::{Position, DEFAULT_SCALING_GRID, DEFAULT_WEIGHT_GRID};

/// Minimum violation magnitude for the exhaustive lattice search; guards
/// against reporting pure floating-point noise as a counterexample.
pub const LATTICE_MARGIN_GUARD: f64 = 1e-9;

/// Componentwise slack for the brute-force hull scan, absorbing rounding in
/// the convex combination at each probed `t`.
const HULL_BRUTE_SLACK: f64 = 1e-12;

/// Cash shifts probed by the lattice cash-invariance search; fractional so
/// floor-type breaks are visible.
const LATTICE_SHIFT_GRID: [f64; 4] = [0.5, -0.5, 1.5, -1.5];

/// Smallest grid level `m` in `[m_range.0, m_range.1]` with `x + m` accepted.
///
/// Differs from the bisection value by at most `pitch`; errors when no level
/// in the range is accepted.
pub fn grid_induced(
    a: &AcceptanceSet,
    x: &Position,
    m_range: (f64, f64),
    pitch: f64,
) -> Result<f64> {
    if !(pitch > 0.0) {
        return Err(Error::config(format!("pitch must be > 0, got {pitch}")));
    }
    let (lo, hi) = m_range;
    if lo > hi {
        return Err(Error::config(format!("empty m range: lo {lo} > hi {hi}")));
    }
    let steps = ((hi - lo) / pitch).ceil() as u64;
    for k in 0..=steps {
        let m = lo + k as f64 * pitch;
        if a.member(&x.shift(m))? {
            return Ok(m);
        }
    }
    Err(Error::numerical(format!(
        "no accepted cash level in [{lo}, {hi}] at pitch {pitch}"
    )))
}

/// Brute-force hull membership: scans `t` over `{0, pitch, 2 pitch, ..., 1}`
/// and accepts when `x >= t z + (1-t) y` componentwise up to a hairline slack.
pub fn hull_member_brute(z: &[f64], y: &[f64], x: &[f64], t_pitch: f64) -> Result<bool> {
    if !(t_pitch > 0.0) {
        return Err(Error::config(format!("t pitch must be > 0, got {t_pitch}")));
    }
    if z.len() != x.len() || y.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: z.len().max(y.len()),
        });
    }
    let steps = (1.0 / t_pitch).ceil() as u64;
    for k in 0..=steps {
        let t = (k as f64 * t_pitch).min(1.0);
        let dominated =
            (0..x.len()).all(|i| x[i] >= t * z[i] + (1.0 - t) * y[i] - HULL_BRUTE_SLACK);
        if dominated {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Ternary search on the convex envelope `t -> max_i (t z_i + (1-t) y_i - x_i)`
/// over `[0, 1]`; cross-checks the breakpoint solver.
pub fn hull_induced_ternary(z: &[f64], y: &[f64], x: &[f64], iters: usize) -> Result<f64> {
    if z.len() != x.len() || y.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: z.len().max(y.len()),
        });
    }
    let envelope = |t: f64| {
        (0..x.len())
            .map(|i| t * z[i] + (1.0 - t) * y[i] - x[i])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..iters {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if envelope(m1) < envelope(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(envelope(0.5 * (lo + hi))
        .min(envelope(0.0))
        .min(envelope(1.0)))
}

/// Exhaustive counterexample search over an integer-pitch lattice box.
///
/// Scans lattice positions (and pairs, for the two-position properties) in
/// lexicographic order against the default weight/scaling grids and returns
/// the first violation, or `None` after a full pass.
pub fn lattice_counterexample(
    m: &RiskFunctional,
    property: Property,
    box_lo: f64,
    box_hi: f64,
    step: f64,
) -> Result<Option<Witness>> {
    if !(step > 0.0) {
        return Err(Error::config(format!("step must be > 0, got {step}")));
    }
    if box_lo > box_hi {
        return Err(Error::config(format!(
            "empty box: lo {box_lo} > hi {box_hi}"
        )));
    }
    let n = m.space().len();
    let axis: Vec<f64> = {
        let mut v = Vec::new();
        let mut t = box_lo;
        while t <= box_hi + 1e-12 {
            v.push(t);
            t += step;
        }
        v
    };
    let points: Vec<Position> = lattice_points(&axis, n)
        .into_iter()
        .map(|values| Position::new(values).expect("lattice entries are finite"))
        .collect();

    match property {
        Property::Normalization => {
            let v = m.value_at_zero()?;
            if v.abs() > LATTICE_MARGIN_GUARD {
                return Ok(Some(Witness {
                    positions: vec![m.space().zero().values().to_vec()],
                    scalars: vec![],
                    margin: v.abs(),
                }));
            }
            Ok(None)
        }
        Property::Monotonicity => {
            for x in &points {
                let vx = m.eval(x)?;
                for y in &points {
                    if !x.le(y) {
                        continue;
                    }
                    let margin = m.eval(y)? - vx;
                    if margin > LATTICE_MARGIN_GUARD {
                        return Ok(Some(Witness {
                            positions: vec![x.values().to_vec(), y.values().to_vec()],
                            scalars: vec![],
                            margin,
                        }));
                    }
                }
            }
            Ok(None)
        }
        Property::CashInvariance => {
            for x in &points {
                let vx = m.eval(x)?;
                for c in LATTICE_SHIFT_GRID {
                    let margin = (m.eval(&x.shift(c))? - (vx - c)).abs();
                    if margin > LATTICE_MARGIN_GUARD {
                        return Ok(Some(Witness {
                            positions: vec![x.values().to_vec()],
                            scalars: vec![c],
                            margin,
                        }));
                    }
                }
            }
            Ok(None)
        }
        Property::Convexity => {
            // one pass precomputes member values; pairs then need only the
            // combination evaluation
            let vals: Vec<f64> = points.iter().map(|x| m.eval(x)).collect::<Result<_>>()?;
            for (i, x) in points.iter().enumerate() {
                for (j, y) in points.iter().enumerate() {
                    for w in DEFAULT_WEIGHT_GRID {
                        let margin =
                            m.eval(&x.combine(w, y)?)? - (w * vals[i] + (1.0 - w) * vals[j]);
                        if margin > LATTICE_MARGIN_GUARD {
                            return Ok(Some(Witness {
                                positions: vec![x.values().to_vec(), y.values().to_vec()],
                                scalars: vec![w],
                                margin,
                            }));
                        }
                    }
                }
            }
            Ok(None)
        }
        Property::PositiveHomogeneity => {
            for x in &points {
                let vx = m.eval(x)?;
                for l in std::iter::once(0.0).chain(DEFAULT_SCALING_GRID) {
                    let margin = (m.eval(&x.scale(l))? - l * vx).abs();
                    if margin > LATTICE_MARGIN_GUARD {
                        return Ok(Some(Witness {
                            positions: vec![x.values().to_vec()],
                            scalars: vec![l],
                            margin,
                        }));
                    }
                }
            }
            Ok(None)
        }
        Property::StarShapedness => {
            for x in &points {
                let vx = m.eval(x)?;
                for l in DEFAULT_SCALING_GRID {
                    let margin = l * vx - m.eval(&x.scale(l))?;
                    if margin > LATTICE_MARGIN_GUARD {
                        return Ok(Some(Witness {
                            positions: vec![x.values().to_vec()],
                            scalars: vec![l],
                            margin,
                        }));
                    }
                }
            }
            Ok(None)
        }
    }
}

/// All lattice points of `axis^n` in lexicographic order.
fn lattice_points(axis: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(axis.len().pow(n as u32));
    let mut current = vec![0usize; n];
    loop {
        out.push(current.iter().map(|&i| axis[i]).collect());
        // odometer increment, last coordinate fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < axis.len() {
                break;
            }
            current[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acceptance::{from_measure, orthant_at};
    use crate::space::ProbSpace;

    fn uniform4() -> ProbSpace {
        ProbSpace::uniform(4).unwrap()
    }

    #[test]
    fn grid_induced_orthant() {
        let s = ProbSpace::new(vec![0.5, 0.5]).unwrap();
        let a = orthant_at(s.clone(), s.position(vec![1.0, 2.0]).unwrap()).unwrap();
        let v = grid_induced(&a, &s.zero(), (-5.0, 5.0), 1e-4).unwrap();
        assert!((v - 2.0).abs() <= 1e-4);
    }

    #[test]
    fn grid_induced_floor_set() {
        let s = ProbSpace::new(vec![0.5, 0.5]).unwrap();
        let a = from_measure(RiskFunctional::neg_expectation(s.clone()).floor_compose());
        let x = s.position(vec![0.5, 0.5]).unwrap();
        let v = grid_induced(&a, &x, (-5.0, 5.0), 1e-4).unwrap();
        assert!((v - (-0.5)).abs() <= 1e-4);
    }

    #[test]
    fn grid_induced_matches_var() {
        let s = uniform4();
        let var = RiskFunctional::var(s.clone(), 0.25).unwrap();
        let a = from_measure(var.clone());
        let cfg = crate::space::SamplerConfig::new(3, 20, -4.0, 4.0).unwrap();
        for k in 0..20u64 {
            let x = s.sample_position(&cfg, k);
            let g = grid_induced(&a, &x, (-10.0, 10.0), 1e-4).unwrap();
            assert!((g - var.eval(&x).unwrap()).abs() <= 1e-4 + 1e-9);
        }
    }

    #[test]
    fn grid_induced_errors_when_nothing_accepted() {
        let s = ProbSpace::new(vec![0.5, 0.5]).unwrap();
        let a = orthant_at(s.clone(), s.constant(100.0)).unwrap();
        assert!(grid_induced(&a, &s.zero(), (-5.0, 5.0), 0.1).is_err());
    }

    #[test]
    fn hull_brute_cases() {
        assert!(hull_member_brute(&[2.0, 0.0], &[0.0, 2.0], &[1.0, 1.0], 1e-3).unwrap());
        assert!(!hull_member_brute(&[2.0, 0.0], &[0.0, 2.0], &[0.9, 0.9], 1e-3).unwrap());
        // dominating both corners is accepted at t = 0 already
        assert!(hull_member_brute(&[2.0, 0.0], &[0.0, 2.0], &[2.5, 2.5], 1e-3).unwrap());
    }

    #[test]
    fn ternary_matches_breakpoints() {
        let z = [2.0, 0.0];
        let y = [0.0, 2.0];
        let x = [0.0, 0.0];
        let t = hull_induced_ternary(&z, &y, &x, 200).unwrap();
        assert!((t - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn lattice_finds_var_convexity_witness() {
        let m = RiskFunctional::var(uniform4(), 0.25).unwrap();
        let w = lattice_counterexample(&m, Property::Convexity, -3.0, 3.0, 1.0)
            .unwrap()
            .expect("var convexity violation exists on the lattice");
        let margin =
            crate::axioms::violation_margin(&m, Property::Convexity, &w.positions, &w.scalars)
                .unwrap();
        assert!(margin > LATTICE_MARGIN_GUARD);
        assert!((margin - w.margin).abs() <= 1e-12);
    }

    #[test]
    fn lattice_clears_es_convexity() {
        // smaller box keeps the exhaustive pass quick; coherence means no
        // violation exists at any size
        let m = RiskFunctional::es(uniform4(), 0.5).unwrap();
        let w = lattice_counterexample(&m, Property::Convexity, -2.0, 2.0, 1.0).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn lattice_clears_neg_expectation_monotonicity() {
        let m = RiskFunctional::neg_expectation(uniform4());
        let w = lattice_counterexample(&m, Property::Monotonicity, -2.0, 2.0, 1.0).unwrap();
        assert!(w.is_none());
    }
}
