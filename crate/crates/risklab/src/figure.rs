//! Standalone SVG emission for the cone/staircase figure.
//!
//! The drawing carries exactly two translucent closed regions (the red cone
//! and the blue staircase), their two boundary polylines, the axes, and an
//! origin marker, over the fixed window of the figure data. Output is
//! deterministic text.

use crate::counterexamples::FigureReport;
use crate::error::Result;

const SCALE: f64 = 80.0;
const RED: &str = "#b22222";
const BLUE: &str = "#1f3fb2";

/// Renders the figure report as an SVG 1.1 document.
pub fn svg_string(fig: &FigureReport) -> String {
    let ((x_min, x_max), (y_min, y_max)) = fig.window;
    let width = (x_max - x_min) * SCALE;
    let height = (y_max - y_min) * SCALE;
    let px = |x: f64| (x - x_min) * SCALE;
    let py = |y: f64| (y_max - y) * SCALE;
    let fmt_points = |pts: &[[f64; 2]]| -> String {
        pts.iter()
            .map(|p| format!("{},{}", trim(px(p[0])), trim(py(p[1]))))
            .collect::<Vec<_>>()
            .join(" ")
    };

    // close each region along the top edge of the window
    let mut cone_region = fig.cone.clone();
    cone_region.push([x_max, y_max]);
    cone_region.push([x_min, y_max]);
    let mut stair_region = fig.staircase.clone();
    stair_region.push([x_max, y_max]);
    stair_region.push([x_min, y_max]);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        trim(width), trim(height), trim(width), trim(height)
    ));
    out.push_str(&format!(
        "  <defs><clipPath id=\"window\"><rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\"/></clipPath></defs>\n",
        trim(width), trim(height)
    ));
    out.push_str("  <g clip-path=\"url(#window)\">\n");
    out.push_str(&format!(
        "    <polygon points=\"{}\" fill=\"{RED}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n",
        fmt_points(&cone_region)
    ));
    out.push_str(&format!(
        "    <polygon points=\"{}\" fill=\"{BLUE}\" fill-opacity=\"0.35\" stroke=\"none\"/>\n",
        fmt_points(&stair_region)
    ));
    // axes
    out.push_str(&format!(
        "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\" stroke-width=\"1\"/>\n",
        trim(px(x_min)),
        trim(py(0.0)),
        trim(px(x_max)),
        trim(py(0.0))
    ));
    out.push_str(&format!(
        "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\" stroke-width=\"1\"/>\n",
        trim(px(0.0)),
        trim(py(y_min)),
        trim(px(0.0)),
        trim(py(y_max))
    ));
    out.push_str(&format!(
        "    <polyline points=\"{}\" fill=\"none\" stroke=\"{RED}\" stroke-width=\"3\"/>\n",
        fmt_points(&fig.cone)
    ));
    out.push_str(&format!(
        "    <polyline points=\"{}\" fill=\"none\" stroke=\"{BLUE}\" stroke-width=\"3\"/>\n",
        fmt_points(&fig.staircase)
    ));
    out.push_str(&format!(
        "    <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#000\"/>\n",
        trim(px(0.0)),
        trim(py(0.0))
    ));
    out.push_str(&format!(
        "    <text x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"#000\">0</text>\n",
        trim(px(0.0) + 6.0),
        trim(py(0.0) + 16.0)
    ));
    out.push_str("  </g>\n</svg>\n");
    out
}

/// Writes the figure to `path`.
pub fn emit_figure(fig: &FigureReport, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, svg_string(fig))?;
    Ok(())
}

fn trim(v: f64) -> String {
    if v == v.trunc() {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexamples::figure_data;
    use crate::measures::RiskFunctional;
    use crate::space::ProbSpace;

    fn default_figure() -> FigureReport {
        let s = ProbSpace::new(vec![0.5, 0.5]).unwrap();
        let m = RiskFunctional::scenario_max(s, vec![vec![0.5, 0.5], vec![1.0 / 3.0, 2.0 / 3.0]])
            .unwrap();
        figure_data(&m).unwrap()
    }

    #[test]
    fn svg_structure() {
        let svg = svg_string(&default_figure());
        assert!(svg.starts_with("<?xml"));
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
        // balanced document
        assert!(svg.trim_end().ends_with("</svg>"));
        // cone boundary passes through the origin: window point (4, 4) * 80
        assert!(svg.contains("320,320"));
    }

    #[test]
    fn svg_is_deterministic() {
        let a = svg_string(&default_figure());
        let b = svg_string(&default_figure());
        assert_eq!(a, b);
    }

    #[test]
    fn staircase_vertices_present() {
        let svg = svg_string(&default_figure());
        // (0,1) -> (0,0) -> (2,0) -> (2,-1) in pixels: x = (v+4)*80, y = (4-v)*80
        assert!(svg.contains("320,240 320,320 480,320 480,400"));
    }
}
