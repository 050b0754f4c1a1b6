//! Machine-readable run reports.
//!
//! A report is one JSON document carrying the tool version, the full config
//! echo, seeds, tolerances, verdicts, and witnesses with full payoff vectors.
//! Serialization is deterministic — ordered containers only, no wall-clock
//! content — so identical runs produce byte-identical files. Timing is
//! printed to standard output instead of being embedded.

use serde::{Deserialize, Serialize};

use crate::axioms::{AuditSummary, PropertyReport};
use crate::counterexamples::{Example1Report, Example2Report, FigureReport};
use crate::error::Result;
use crate::representation::{RepresentationReport, StarMemberReport, TranslationBound};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Section {
    Audit {
        measure: String,
        summary: AuditSummary,
        star_zero: PropertyReport,
    },
    Representation {
        subject: String,
        report: RepresentationReport,
    },
    StarMember {
        family: String,
        report: StarMemberReport,
    },
    Translate {
        family: String,
        c_requested: String,
        c_used: f64,
        bound: TranslationBound,
        report: RepresentationReport,
    },
    Example1 {
        report: Example1Report,
    },
    Example2 {
        report: Example2Report,
    },
    Figure {
        report: FigureReport,
        svg_path: Option<String>,
    },
}

impl Section {
    /// Every verdict in the section, for the exit-code rule.
    pub fn all_pass(&self) -> bool {
        use crate::axioms::Verdict;
        match self {
            Section::Audit {
                summary, star_zero, ..
            } => {
                summary.reports.iter().all(|r| r.verdict == Verdict::Pass)
                    && star_zero.verdict == Verdict::Pass
            }
            Section::Representation { report, .. } => report.passed(),
            Section::StarMember { report, .. } => report.verdict == Verdict::Pass,
            Section::Translate { report, .. } => report.passed(),
            Section::Example1 { .. } => true,
            Section::Example2 { report } => report.all_found,
            Section::Figure { .. } => true,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDoc {
    pub tool: ToolInfo,
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    /// Verbatim configuration document driving the run.
    pub config_echo: String,
    pub sections: Vec<Section>,
    pub all_pass: bool,
}

impl ReportDoc {
    pub fn new(command: &str, seed: u64, samples: usize, tol: f64, config_echo: &str) -> Self {
        ReportDoc {
            tool: ToolInfo::default(),
            command: command.to_string(),
            seed,
            samples,
            tol,
            config_echo: config_echo.to_string(),
            sections: Vec::new(),
            all_pass: true,
        }
    }

    pub fn push(&mut self, section: Section) {
        self.all_pass &= section.all_pass();
        self.sections.push(section);
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| crate::error::Error::numerical(format!("report serialization: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| crate::error::Error::config(format!("report document: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{full_audit, star_implies_zero_check};
    use crate::measures::RiskFunctional;
    use crate::space::{ProbSpace, SamplerConfig};

    #[test]
    fn report_serialization_round_trips_and_is_stable() {
        let s = ProbSpace::uniform(4).unwrap();
        let m = RiskFunctional::es(s, 0.5).unwrap();
        let sampler = SamplerConfig::new(42, 200, -5.0, 5.0).unwrap();
        let summary = full_audit(&m, &sampler, 1e-7).unwrap();
        let star_zero = star_implies_zero_check(&m, 1e-7).unwrap();

        let mut doc = ReportDoc::new("audit", 42, 200, 1e-7, "[space]\nprobs=[1.0]\n");
        doc.push(Section::Audit {
            measure: "es50".to_string(),
            summary,
            star_zero,
        });
        assert!(doc.all_pass);

        let a = doc.to_json().unwrap();
        let b = doc.to_json().unwrap();
        assert_eq!(a, b);

        let parsed: ReportDoc = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed.to_json().unwrap(), a);
        assert_eq!(parsed.sections.len(), 1);
    }

    #[test]
    fn failed_sections_clear_the_pass_flag() {
        let s = ProbSpace::uniform(4).unwrap();
        let m = RiskFunctional::var(s, 0.25).unwrap();
        let sampler = SamplerConfig::new(42, 2000, -5.0, 5.0).unwrap();
        let summary = full_audit(&m, &sampler, 1e-7).unwrap();
        let star_zero = star_implies_zero_check(&m, 1e-7).unwrap();
        let mut doc = ReportDoc::new("audit", 42, 2000, 1e-7, "");
        doc.push(Section::Audit {
            measure: "var25".to_string(),
            summary,
            star_zero,
        });
        assert!(!doc.all_pass); // convexity fails for var
    }
}
