//! Sampled falsification of the defining risk-measure properties.
//!
//! [`check`] evaluates one property's defining inequality on deterministic
//! counter-based samples and reports the first violation by sample index.
//! Equalities (cash invariance, normalization, positive homogeneity) are
//! tested as two inequalities at the given tolerance. Failed witnesses are
//! greedily shrunk toward integer and zero entries while the violation
//! persists, and every stored witness re-verifies through
//! [`violation_margin`] independently of the sampler.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::RiskFunctional;
use crate::rng;
use crate::space::{Position, SamplerConfig};

/// The six properties a functional may satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Monotonicity,
    CashInvariance,
    Normalization,
    Convexity,
    PositiveHomogeneity,
    StarShapedness,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Monotonicity,
        Property::CashInvariance,
        Property::Normalization,
        Property::Convexity,
        Property::PositiveHomogeneity,
        Property::StarShapedness,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Monotonicity => "monotonicity",
            Property::CashInvariance => "cash_invariance",
            Property::Normalization => "normalization",
            Property::Convexity => "convexity",
            Property::PositiveHomogeneity => "positive_homogeneity",
            Property::StarShapedness => "star_shapedness",
        }
    }
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Structured counterexample: the payoff vectors and scalars that violate a
/// property's defining inequality, with the violation magnitude.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub positions: Vec<Vec<f64>>,
    pub scalars: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: Property,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Audit of all six properties plus the derived classification flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditSummary {
    pub measure: String,
    pub reports: Vec<PropertyReport>,
    /// monotone and cash invariant
    pub monetary: bool,
    /// monetary and convex
    pub convex_risk_measure: bool,
    /// convex risk measure and positively homogeneous
    pub coherent: bool,
    /// monetary and star-shaped
    pub star_shaped_class: bool,
    pub normalized: bool,
}

impl AuditSummary {
    pub fn report(&self, p: Property) -> &PropertyReport {
        self.reports
            .iter()
            .find(|r| r.property == p)
            .expect("full audit carries all six properties")
    }
}

// stream roles for counter-based draws
const ROLE_PRIMARY: u64 = 0;
const ROLE_PARTNER: u64 = 1;
const ROLE_SCALAR: u64 = 2;

const PARTNER_INDEX_OFFSET: u64 = 1 << 32;
const RANDOM_WEIGHTS_PER_SAMPLE: usize = 4;

fn scalar_stream(property: Property) -> u64 {
    0x100 + (property as u64) * 8 + ROLE_SCALAR
}

/// Checks one property on `sampler.count` deterministic samples.
pub fn check(
    m: &RiskFunctional,
    property: Property,
    sampler: &SamplerConfig,
    tol: f64,
) -> Result<PropertyReport> {
    if !(tol > 0.0) {
        return Err(Error::config(format!("tolerance must be > 0, got {tol}")));
    }
    let space = m.space().clone();
    let sample = |role: u64, k: u64| {
        space.sample_position(sampler, k.wrapping_add(role * PARTNER_INDEX_OFFSET))
    };

    let mut witness: Option<Witness> = None;
    let mut samples = 0usize;

    match property {
        Property::Normalization => {
            samples = 1;
            let v = m.value_at_zero()?;
            if v.abs() > tol {
                witness = Some(Witness {
                    positions: vec![space.zero().values().to_vec()],
                    scalars: vec![],
                    margin: v.abs(),
                });
            }
        }
        Property::Monotonicity => {
            'outer: for k in 0..sampler.count as u64 {
                samples += 1;
                let x = sample(ROLE_PRIMARY, k);
                let hi = x.add(&sample(ROLE_PARTNER, k).abs())?;
                let margin = m.eval(&hi)? - m.eval(&x)?;
                if margin > tol {
                    witness = Some(Witness {
                        positions: vec![x.values().to_vec(), hi.values().to_vec()],
                        scalars: vec![],
                        margin,
                    });
                    break 'outer;
                }
            }
        }
        Property::CashInvariance => {
            'outer: for k in 0..sampler.count as u64 {
                samples += 1;
                let x = sample(ROLE_PRIMARY, k);
                let c = rng::range(
                    sampler.seed,
                    scalar_stream(property),
                    k,
                    sampler.lo,
                    sampler.hi,
                );
                let margin = (m.eval(&x.shift(c))? - (m.eval(&x)? - c)).abs();
                if margin > tol {
                    witness = Some(Witness {
                        positions: vec![x.values().to_vec()],
                        scalars: vec![c],
                        margin,
                    });
                    break 'outer;
                }
            }
        }
        Property::Convexity => {
            'outer: for k in 0..sampler.count as u64 {
                samples += 1;
                let x = sample(ROLE_PRIMARY, k);
                let y = sample(ROLE_PARTNER, k);
                let vx = m.eval(&x)?;
                let vy = m.eval(&y)?;
                for w in convexity_weights(sampler, property, k) {
                    let margin = m.eval(&x.combine(w, &y)?)? - (w * vx + (1.0 - w) * vy);
                    if margin > tol {
                        witness = Some(Witness {
                            positions: vec![x.values().to_vec(), y.values().to_vec()],
                            scalars: vec![w],
                            margin,
                        });
                        break 'outer;
                    }
                }
            }
        }
        Property::PositiveHomogeneity => {
            'outer: for k in 0..sampler.count as u64 {
                samples += 1;
                let x = sample(ROLE_PRIMARY, k);
                let vx = m.eval(&x)?;
                // lambda = 0 pins normalization as the degenerate scaling
                for l in std::iter::once(0.0).chain(sampler.scaling_grid.iter().copied()) {
                    let margin = (m.eval(&x.scale(l))? - l * vx).abs();
                    if margin > tol {
                        witness = Some(Witness {
                            positions: vec![x.values().to_vec()],
                            scalars: vec![l],
                            margin,
                        });
                        break 'outer;
                    }
                }
            }
        }
        Property::StarShapedness => {
            'outer: for k in 0..sampler.count as u64 {
                samples += 1;
                let x = sample(ROLE_PRIMARY, k);
                let vx = m.eval(&x)?;
                for l in sampler.scaling_grid.iter().copied() {
                    let margin = l * vx - m.eval(&x.scale(l))?;
                    if margin > tol {
                        witness = Some(Witness {
                            positions: vec![x.values().to_vec()],
                            scalars: vec![l],
                            margin,
                        });
                        break 'outer;
                    }
                }
            }
        }
    }

    let verdict = if witness.is_some() {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let witness = match witness {
        Some(w) => Some(shrink_witness(m, property, w, tol)?),
        None => None,
    };
    Ok(PropertyReport {
        property,
        verdict,
        witness,
        samples,
        tol,
        seed: sampler.seed,
    })
}

fn convexity_weights(sampler: &SamplerConfig, property: Property, k: u64) -> Vec<f64> {
    let mut ws = sampler.weight_grid.clone();
    for i in 0..RANDOM_WEIGHTS_PER_SAMPLE {
        ws.push(rng::unit(
            sampler.seed,
            scalar_stream(property),
            k * RANDOM_WEIGHTS_PER_SAMPLE as u64 + i as u64,
        ));
    }
    ws
}

/// Recomputes a witness's violation margin from its stored payload alone.
pub fn violation_margin(
    m: &RiskFunctional,
    property: Property,
    positions: &[Vec<f64>],
    scalars: &[f64],
) -> Result<f64> {
    let pos = |i: usize| -> Result<Position> {
        let values = positions
            .get(i)
            .ok_or_else(|| Error::config(format!("witness is missing position {i}")))?;
        m.space().position(values.clone())
    };
    let scalar = |i: usize| -> Result<f64> {
        scalars
            .get(i)
            .copied()
            .ok_or_else(|| Error::config(format!("witness is missing scalar {i}")))
    };
    match property {
        Property::Monotonicity => {
            let lo = pos(0)?;
            let hi = pos(1)?;
            if !lo.le(&hi) {
                return Err(Error::config("monotonicity witness pair is not ordered"));
            }
            Ok(m.eval(&hi)? - m.eval(&lo)?)
        }
        Property::CashInvariance => {
            let x = pos(0)?;
            let c = scalar(0)?;
            Ok((m.eval(&x.shift(c))? - (m.eval(&x)? - c)).abs())
        }
        Property::Normalization => Ok(m.value_at_zero()?.abs()),
        Property::Convexity => {
            let x = pos(0)?;
            let y = pos(1)?;
            let w = scalar(0)?;
            Ok(m.eval(&x.combine(w, &y)?)? - (w * m.eval(&x)? + (1.0 - w) * m.eval(&y)?))
        }
        Property::PositiveHomogeneity => {
            let x = pos(0)?;
            let l = scalar(0)?;
            Ok((m.eval(&x.scale(l))? - l * m.eval(&x)?).abs())
        }
        Property::StarShapedness => {
            let x = pos(0)?;
            let l = scalar(0)?;
            Ok(l * m.eval(&x)? - m.eval(&x.scale(l))?)
        }
    }
}

/// Greedy witness simplification: entries move toward zero or the nearest
/// integer as long as the recomputed margin stays above `tol`.
fn shrink_witness(
    m: &RiskFunctional,
    property: Property,
    mut w: Witness,
    tol: f64,
) -> Result<Witness> {
    for _pass in 0..2 {
        for pi in 0..w.positions.len() {
            for ei in 0..w.positions[pi].len() {
                let original = w.positions[pi][ei];
                for candidate in [0.0, original.round()] {
                    if candidate == original {
                        continue;
                    }
                    // monotone pairs must stay ordered; skip edits that break it
                    w.positions[pi][ei] = candidate;
                    match violation_margin(m, property, &w.positions, &w.scalars) {
                        Ok(margin) if margin > tol => {
                            w.margin = margin;
                            break;
                        }
                        _ => w.positions[pi][ei] = original,
                    }
                }
            }
        }
    }
    w.margin = violation_margin(m, property, &w.positions, &w.scalars)?;
    Ok(w)
}

/// Runs all six checks and derives the classification flags.
pub fn full_audit(m: &RiskFunctional, sampler: &SamplerConfig, tol: f64) -> Result<AuditSummary> {
    let reports = Property::ALL
        .iter()
        .map(|&p| check(m, p, sampler, tol))
        .collect::<Result<Vec<_>>>()?;
    let passed = |p: Property| {
        reports
            .iter()
            .find(|r| r.property == p)
            .map(|r| r.verdict == Verdict::Pass)
            .unwrap_or(false)
    };
    let monetary = passed(Property::Monotonicity) && passed(Property::CashInvariance);
    let convex_risk_measure = monetary && passed(Property::Convexity);
    let coherent = convex_risk_measure && passed(Property::PositiveHomogeneity);
    let star_shaped_class = monetary && passed(Property::StarShapedness);
    let normalized = passed(Property::Normalization);
    Ok(AuditSummary {
        measure: m.label().to_string(),
        reports,
        monetary,
        convex_risk_measure,
        coherent,
        star_shaped_class,
        normalized,
    })
}

/// Star-shapedness forces acceptance of zero: if `rho(0) > tol` the scaling
/// inequality already fails at the zero position, and the report carries that
/// forced witness (X = 0, lambda = 2, margin = rho(0)).
pub fn star_implies_zero_check(m: &RiskFunctional, tol: f64) -> Result<PropertyReport> {
    let v = m.value_at_zero()?;
    let witness = if v > tol {
        Some(Witness {
            positions: vec![m.space().zero().values().to_vec()],
            scalars: vec![2.0],
            margin: v,
        })
    } else {
        None
    };
    Ok(PropertyReport {
        property: Property::StarShapedness,
        verdict: if witness.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        witness,
        samples: 1,
        tol,
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::RiskFunctional;
    use crate::space::ProbSpace;

    fn sampler(count: usize) -> SamplerConfig {
        SamplerConfig::new(42, count, -5.0, 5.0).unwrap()
    }

    fn uniform4() -> ProbSpace {
        ProbSpace::uniform(4).unwrap()
    }

    #[test]
    fn es_convexity_passes() {
        let m = RiskFunctional::es(uniform4(), 0.5).unwrap();
        let r = check(&m, Property::Convexity, &sampler(10_000), 1e-7).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.samples, 10_000);
    }

    #[test]
    fn var_convexity_fails_with_reverifying_witness() {
        let m = RiskFunctional::var(uniform4(), 0.25).unwrap();
        let r = check(&m, Property::Convexity, &sampler(10_000), 1e-7).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.expect("fail carries a witness");
        let margin = violation_margin(&m, Property::Convexity, &w.positions, &w.scalars).unwrap();
        assert!(margin > 1e-7);
        assert!((margin - w.margin).abs() <= 1e-12 * (1.0 + margin.abs()));
    }

    #[test]
    fn translated_measure_star_shapedness_fails() {
        let s = ProbSpace::new(vec![0.5, 0.5]).unwrap();
        let m = RiskFunctional::neg_expectation(s.clone()).translate(1.0);
        let r = check(&m, Property::StarShapedness, &sampler(100), 1e-7).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        // margin is lambda - 1 regardless of the position
        let w = r.witness.unwrap();
        assert!((w.margin - (w.scalars[0] - 1.0)).abs() <= 1e-12);
        // the forced pinned witness: X = 1 constant, lambda = 2, margin 1
        let margin = violation_margin(
            &m,
            Property::StarShapedness,
            &[s.constant(1.0).values().to_vec()],
            &[2.0],
        )
        .unwrap();
        assert!((margin - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn full_audit_scenario_max_all_pass() {
        let s = ProbSpace::new(vec![0.5, 0.5]).unwrap();
        let m = RiskFunctional::scenario_max(s, vec![vec![0.5, 0.5], vec![1.0 / 3.0, 2.0 / 3.0]])
            .unwrap();
        let audit = full_audit(&m, &sampler(2_000), 1e-7).unwrap();
        assert!(audit.reports.iter().all(|r| r.verdict == Verdict::Pass));
        assert!(audit.coherent && audit.monetary && audit.star_shaped_class);
    }

    #[test]
    fn full_audit_entropic_fails_only_positive_homogeneity() {
        let m = RiskFunctional::entropic(uniform4(), 1.0).unwrap();
        let audit = full_audit(&m, &sampler(2_000), 1e-7).unwrap();
        assert_eq!(
            audit.report(Property::PositiveHomogeneity).verdict,
            Verdict::Fail
        );
        assert_eq!(
            audit.report(Property::StarShapedness).verdict,
            Verdict::Pass
        );
        assert_eq!(audit.report(Property::Convexity).verdict, Verdict::Pass);
        assert!(audit.convex_risk_measure && !audit.coherent);
        let w = audit
            .report(Property::PositiveHomogeneity)
            .witness
            .clone()
            .unwrap();
        let margin =
            violation_margin(&m, Property::PositiveHomogeneity, &w.positions, &w.scalars).unwrap();
        assert!(margin > 1e-7);
    }

    #[test]
    fn full_audit_floor_compose_fails_cash_invariance() {
        let s = ProbSpace::new(vec![0.5, 0.5]).unwrap();
        let m = RiskFunctional::neg_expectation(s.clone()).floor_compose();
        let audit = full_audit(&m, &sampler(2_000), 1e-7).unwrap();
        assert_eq!(audit.report(Property::Monotonicity).verdict, Verdict::Pass);
        assert_eq!(
            audit.report(Property::CashInvariance).verdict,
            Verdict::Fail
        );
        assert!(!audit.monetary);
        // pinned witness: integer vector shifted by one half
        let margin =
            violation_margin(&m, Property::CashInvariance, &[vec![1.0, -3.0]], &[0.5]).unwrap();
        assert!((margin - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn star_zero_check_cases() {
        let m = RiskFunctional::var(uniform4(), 0.25).unwrap();
        assert_eq!(
            star_implies_zero_check(&m, 1e-9).unwrap().verdict,
            Verdict::Pass
        );

        let up = m.translate(0.2);
        let r = star_implies_zero_check(&up, 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert!((w.margin - 0.2).abs() <= 1e-12);
        assert_eq!(w.scalars, vec![2.0]);
        // stored witness re-verifies as a star-shapedness violation
        let margin =
            violation_margin(&up, Property::StarShapedness, &w.positions, &w.scalars).unwrap();
        assert!((margin - 0.2).abs() <= 1e-12);

        let down = m.translate(-0.2);
        assert_eq!(
            star_implies_zero_check(&down, 1e-9).unwrap().verdict,
            Verdict::Pass
        );
    }

    #[test]
    fn audits_are_deterministic() {
        let m = RiskFunctional::var(uniform4(), 0.25).unwrap();
        let a = check(&m, Property::Convexity, &sampler(500), 1e-7).unwrap();
        let b = check(&m, Property::Convexity, &sampler(500), 1e-7).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn positive_homogeneity_pass_implies_normalization_pass() {
        for m in [
            RiskFunctional::neg_expectation(uniform4()),
            RiskFunctional::worst_case(uniform4()),
            RiskFunctional::var(uniform4(), 0.25).unwrap(),
            RiskFunctional::es(uniform4(), 0.5).unwrap(),
        ] {
            let audit = full_audit(&m, &sampler(500), 1e-7).unwrap();
            if audit.report(Property::PositiveHomogeneity).passed() {
                assert!(audit.report(Property::Normalization).passed());
            }
        }
    }
}
