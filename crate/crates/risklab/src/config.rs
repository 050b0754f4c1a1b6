//! Structured run configuration.
//!
//! One TOML document declares all mathematical content — the space, measure
//! expression trees, families, and acceptance sets — while command-line flags
//! cover run mechanics only (sample count, seed, tolerance, paths). Reports
//! echo the full document so they remain self-contained evidence.
//!
//! Measure nodes:
//!
//! ```toml
//! [space]
//! probs = [0.25, 0.25, 0.25, 0.25]
//!
//! [measures.var25]
//! kind = "var"
//! alpha = 0.25
//!
//! [measures.shifted]
//! kind = "translate"
//! by = 0.3
//! inner = { kind = "neg_expectation" }
//!
//! [families.pair]
//! members = ["var25", "shifted"]
//!
//! [families.pen]
//! penalized = { base = "shifted", epsilon = 1.0, grid = [0.5, 1.0, 2.0, 10.0] }
//!
//! [sets.accept_var]
//! kind = "from_measure"
//! measure = "var25"
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::acceptance::{self, AcceptanceSet};
use crate::error::{Error, Result};
use crate::measures::{min_of, penalized_family, MeasureFamily, PenaltySpec, RiskFunctional};
use crate::space::{Position, ProbSpace};

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_RANGE: [f64; 2] = [-5.0, 5.0];
pub const DEFAULT_SCENARIOS: [[f64; 2]; 2] = [[0.5, 0.5], [1.0 / 3.0, 2.0 / 3.0]];

/// Environment variable overriding the default sample count (integration-test
/// speedup); explicit `--samples` flags and config values win over it.
pub const SAMPLES_ENV_VAR: &str = "RISKLAB_SAMPLES";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDoc {
    pub space: SpaceDecl,
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureNode>,
    #[serde(default)]
    pub families: BTreeMap<String, FamilyDecl>,
    #[serde(default)]
    pub sets: BTreeMap<String, SetNode>,
    #[serde(default)]
    pub run: RunDefaults,
    #[serde(default)]
    pub examples: ExamplesDecl,
    #[serde(default)]
    pub star_hull: Option<StarHullDecl>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDecl {
    pub probs: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDefaults {
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub range: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExamplesDecl {
    /// Base measure name; defaults to a bare negated expectation.
    pub base: Option<String>,
    pub epsilon: f64,
    pub ks: Vec<f64>,
    pub cs: Vec<f64>,
    pub depth: u32,
}

impl Default for ExamplesDecl {
    fn default() -> Self {
        ExamplesDecl {
            base: None,
            epsilon: 1.0,
            ks: vec![1.5, 2.0, 4.0],
            cs: (-10..=10).map(|c| c as f64).collect(),
            depth: crate::counterexamples::DEFAULT_SWEEP_DEPTH,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarHullDecl {
    pub measure: String,
    pub y: Option<Vec<f64>>,
    pub zs: Option<Vec<Vec<f64>>>,
    /// Number of sampled acceptable corners when `zs` is absent.
    pub sampled_zs: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureNode {
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
    Translate {
        by: f64,
        inner: Box<MeasureNode>,
    },
    MinOf {
        members: Vec<MeasureNode>,
    },
    Penalized {
        epsilon: f64,
        grid: Vec<f64>,
        base: Box<MeasureNode>,
    },
    FloorCompose {
        inner: Box<MeasureNode>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDecl {
    #[serde(default)]
    pub members: Vec<String>,
    #[serde(default)]
    pub penalized: Option<PenalizedDecl>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenalizedDecl {
    pub base: String,
    pub epsilon: f64,
    pub grid: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetNode {
    FromMeasure { measure: String },
    Orthant { z: Vec<f64> },
    Hull { z: Vec<f64>, y: Vec<f64> },
    Union { members: Vec<String> },
    Intersection { members: Vec<String> },
}

/// A parsed and resolved configuration.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub doc: ConfigDoc,
    pub text: String,
    pub space: ProbSpace,
}

impl ResolvedConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: ConfigDoc =
            toml::from_str(text).map_err(|e| Error::config(format!("config document: {e}")))?;
        let space = ProbSpace::new(doc.space.probs.clone())
            .map_err(|e| Error::config(format!("space: {e}")))?;
        Ok(ResolvedConfig {
            doc,
            text: text.to_string(),
            space,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Built-in configuration used when no document is supplied.
    pub fn builtin_default() -> Self {
        let text = include_str!("../configs/default.toml");
        Self::parse(text).expect("the bundled default config parses")
    }

    pub fn measure(&self, name: &str) -> Result<RiskFunctional> {
        let node =
            self.doc.measures.get(name).ok_or_else(|| {
                Error::config(format!("measures.{name}: no such measure declared"))
            })?;
        Ok(self
            .build_measure(node, &format!("measures.{name}"))?
            .with_label(name.to_string()))
    }

    pub fn measure_names(&self) -> Vec<String> {
        self.doc.measures.keys().cloned().collect()
    }

    pub fn family(&self, name: &str) -> Result<MeasureFamily> {
        let decl =
            self.doc.families.get(name).ok_or_else(|| {
                Error::config(format!("families.{name}: no such family declared"))
            })?;
        match (&decl.penalized, decl.members.is_empty()) {
            (Some(p), true) => {
                let base = self.measure(&p.base)?;
                penalized_family(
                    &base,
                    &PenaltySpec {
                        epsilon: p.epsilon,
                        grid: p.grid.clone(),
                    },
                )
                .map_err(|e| Error::config(format!("families.{name}: {e}")))
            }
            (None, false) => {
                let members = decl
                    .members
                    .iter()
                    .map(|m| self.measure(m))
                    .collect::<Result<Vec<_>>>()?;
                MeasureFamily::new(members)
                    .map_err(|e| Error::config(format!("families.{name}: {e}")))
            }
            _ => Err(Error::config(format!(
                "families.{name}: declare exactly one of `members` or `penalized`"
            ))),
        }
    }

    pub fn set(&self, name: &str) -> Result<AcceptanceSet> {
        self.set_inner(name, &mut Vec::new())
    }

    fn set_inner(&self, name: &str, stack: &mut Vec<String>) -> Result<AcceptanceSet> {
        if stack.iter().any(|s| s == name) {
            return Err(Error::config(format!(
                "sets.{name}: cyclic set reference through {stack:?}"
            )));
        }
        let node = self
            .doc
            .sets
            .get(name)
            .ok_or_else(|| Error::config(format!("sets.{name}: no such set declared")))?;
        stack.push(name.to_string());
        let built = match node {
            SetNode::FromMeasure { measure } => {
                Ok(acceptance::from_measure(self.measure(measure)?))
            }
            SetNode::Orthant { z } => {
                acceptance::orthant_at(self.space.clone(), self.position(z, name)?)
            }
            SetNode::Hull { z, y } => acceptance::hull_of_orthants(
                self.space.clone(),
                self.position(z, name)?,
                self.position(y, name)?,
            ),
            SetNode::Union { members } => {
                let sets = members
                    .iter()
                    .map(|m| self.set_inner(m, stack))
                    .collect::<Result<Vec<_>>>()?;
                acceptance::union(sets)
            }
            SetNode::Intersection { members } => {
                let sets = members
                    .iter()
                    .map(|m| self.set_inner(m, stack))
                    .collect::<Result<Vec<_>>>()?;
                acceptance::intersection(sets)
            }
        };
        stack.pop();
        built.map_err(|e| Error::config(format!("sets.{name}: {e}")))
    }

    /// The examples base measure (declared name or a bare negated expectation).
    pub fn examples_base(&self) -> Result<RiskFunctional> {
        match &self.doc.examples.base {
            Some(name) => self.measure(name),
            None => Ok(RiskFunctional::neg_expectation(self.space.clone())),
        }
    }

    /// The figure functional: the named measure must be a scenario maximum;
    /// without a name, the bundled default scenarios are used.
    pub fn figure_measure(&self, name: Option<&str>) -> Result<RiskFunctional> {
        match name {
            Some(n) => self.measure(n),
            None => {
                let space = if self.space.len() == 2 {
                    self.space.clone()
                } else {
                    ProbSpace::uniform(2).expect("two outcomes")
                };
                RiskFunctional::scenario_max(
                    space,
                    DEFAULT_SCENARIOS.iter().map(|q| q.to_vec()).collect(),
                )
            }
        }
    }

    fn position(&self, values: &[f64], node: &str) -> Result<Position> {
        self.space
            .position(values.to_vec())
            .map_err(|e| Error::config(format!("sets.{node}: {e}")))
    }

    fn build_measure(&self, node: &MeasureNode, path: &str) -> Result<RiskFunctional> {
        let wrap = |e: Error| Error::config(format!("{path}: {e}"));
        match node {
            MeasureNode::NegExpectation => Ok(RiskFunctional::neg_expectation(self.space.clone())),
            MeasureNode::WorstCase => Ok(RiskFunctional::worst_case(self.space.clone())),
            MeasureNode::Var { alpha } => {
                RiskFunctional::var(self.space.clone(), *alpha).map_err(wrap)
            }
            MeasureNode::Es { alpha } => {
                RiskFunctional::es(self.space.clone(), *alpha).map_err(wrap)
            }
            MeasureNode::Entropic { theta } => {
                RiskFunctional::entropic(self.space.clone(), *theta).map_err(wrap)
            }
            MeasureNode::ScenarioMax { scenarios } => {
                RiskFunctional::scenario_max(self.space.clone(), scenarios.clone()).map_err(wrap)
            }
            MeasureNode::Translate { by, inner } => {
                if !by.is_finite() {
                    return Err(Error::config(format!(
                        "{path}: translate.by must be finite"
                    )));
                }
                Ok(self.build_measure(inner, path)?.translate(*by))
            }
            MeasureNode::MinOf { members } => {
                if members.is_empty() {
                    return Err(Error::config(format!("{path}: min_of needs members")));
                }
                let built = members
                    .iter()
                    .map(|m| self.build_measure(m, path))
                    .collect::<Result<Vec<_>>>()?;
                min_of(&MeasureFamily::new(built).map_err(wrap)?).map_err(wrap)
            }
            MeasureNode::Penalized {
                epsilon,
                grid,
                base,
            } => {
                let base = self.build_measure(base, path)?;
                let fam = penalized_family(
                    &base,
                    &PenaltySpec {
                        epsilon: *epsilon,
                        grid: grid.clone(),
                    },
                )
                .map_err(wrap)?;
                min_of(&fam).map_err(wrap)
            }
            MeasureNode::FloorCompose { inner } => {
                Ok(self.build_measure(inner, path)?.floor_compose())
            }
        }
    }
}

/// Effective run parameters after flag > environment > config > default
/// precedence is applied to the sample count and flag > config > default to
/// the rest.
#[derive(Clone, Copy, Debug)]
pub struct RunParams {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RunParams {
    pub fn resolve(
        cfg: &ResolvedConfig,
        samples_flag: Option<usize>,
        seed_flag: Option<u64>,
        tol_flag: Option<f64>,
    ) -> Result<Self> {
        let env_samples = std::env::var(SAMPLES_ENV_VAR)
            .ok()
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    Error::config(format!(
                        "{SAMPLES_ENV_VAR} must be a positive integer, got {v}"
                    ))
                })
            })
            .transpose()?;
        let samples = samples_flag
            .or(env_samples)
            .or(cfg.doc.run.samples)
            .unwrap_or(DEFAULT_SAMPLES);
        if samples == 0 {
            return Err(Error::config("sample count must be >= 1"));
        }
        let tol = tol_flag.or(cfg.doc.run.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(Error::config(format!("tolerance must be > 0, got {tol}")));
        }
        let range = cfg.doc.run.range.unwrap_or(DEFAULT_RANGE);
        if range[0] > range[1] {
            return Err(Error::config(format!(
                "run.range is empty: [{}, {}]",
                range[0], range[1]
            )));
        }
        Ok(RunParams {
            samples,
            seed: seed_flag.or(cfg.doc.run.seed).unwrap_or(DEFAULT_SEED),
            tol,
            lo: range[0],
            hi: range[1],
        })
    }

    pub fn sampler(&self) -> crate::space::SamplerConfig {
        crate::space::SamplerConfig::new(self.seed, self.samples, self.lo, self.hi)
            .expect("validated run parameters")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[space]
probs = [0.25, 0.25, 0.25, 0.25]

[run]
samples = 500
seed = 7
tol = 1e-7

[measures.ne]
kind = "neg_expectation"

[measures.var25]
kind = "var"
alpha = 0.25

[measures.shifted]
kind = "translate"
by = 0.3
inner = { kind = "neg_expectation" }

[measures.pen_min]
kind = "penalized"
epsilon = 1.0
grid = [0.5, 1.0, 2.0, 10.0]
base = { kind = "neg_expectation" }

[families.pair]
members = ["ne", "shifted"]

[families.pen]
penalized = { base = "ne", epsilon = 1.0, grid = [0.5, 1.0, 2.0, 10.0] }

[sets.a_var]
kind = "from_measure"
measure = "var25"

[sets.orth]
kind = "orthant"
z = [0.0, 0.0, 0.0, 0.0]

[sets.both]
kind = "union"
members = ["a_var", "orth"]
"#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ResolvedConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.space.len(), 4);
        let var = cfg.measure("var25").unwrap();
        let x = cfg.space.position(vec![-4.0, -1.0, 2.0, 5.0]).unwrap();
        assert_eq!(var.eval(&x).unwrap(), 1.0);

        let shifted = cfg.measure("shifted").unwrap();
        assert_eq!(shifted.value_at_zero().unwrap(), 0.3);

        let pen_min = cfg.measure("pen_min").unwrap();
        assert_eq!(pen_min.value_at_zero().unwrap(), 1.0);

        let fam = cfg.family("pair").unwrap();
        assert_eq!(fam.len(), 2);
        let pen = cfg.family("pen").unwrap();
        assert_eq!(pen.len(), 4);
        assert!(pen.generator().is_some());

        let set = cfg.set("both").unwrap();
        assert!(set.member(&cfg.space.zero()).unwrap());
    }

    #[test]
    fn diagnostics_name_the_offending_node() {
        let cfg = ResolvedConfig::parse(SAMPLE).unwrap();
        let err = cfg.measure("nope").unwrap_err().to_string();
        assert!(err.contains("measures.nope"), "{err}");
        let err = cfg.family("nope").unwrap_err().to_string();
        assert!(err.contains("families.nope"), "{err}");
        let err = cfg.set("nope").unwrap_err().to_string();
        assert!(err.contains("sets.nope"), "{err}");
    }

    #[test]
    fn rejects_invalid_space() {
        let bad = "[space]\nprobs = [0.5, 0.6]\n";
        assert!(ResolvedConfig::parse(bad).is_err());
    }

    #[test]
    fn rejects_cyclic_sets() {
        let text = r#"
[space]
probs = [0.5, 0.5]

[sets.a]
kind = "union"
members = ["b"]

[sets.b]
kind = "union"
members = ["a"]
"#;
        let cfg = ResolvedConfig::parse(text).unwrap();
        let err = cfg.set("a").unwrap_err().to_string();
        assert!(err.contains("cyclic"), "{err}");
    }

    #[test]
    fn run_params_precedence() {
        let cfg = ResolvedConfig::parse(SAMPLE).unwrap();
        let p = RunParams::resolve(&cfg, None, None, None).unwrap();
        assert_eq!(p.samples, 500);
        assert_eq!(p.seed, 7);
        let p = RunParams::resolve(&cfg, Some(9), Some(1), Some(1e-6)).unwrap();
        assert_eq!(p.samples, 9);
        assert_eq!(p.seed, 1);
        assert_eq!(p.tol, 1e-6);
    }

    #[test]
    fn builtin_default_config_is_valid() {
        let cfg = ResolvedConfig::builtin_default();
        assert!(!cfg.measure_names().is_empty());
        for name in cfg.measure_names() {
            cfg.measure(&name).unwrap();
        }
    }
}
