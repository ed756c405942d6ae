//! SVG chord diagrams of lamination classes on the unit circle.
//!
//! Angles sit at `e^{2πit}`; classes with two or more members are drawn as
//! the chord polygon of their convex hull, so disjoint hulls of distinct
//! classes render as non-crossing chords.

use std::fmt::Write as _;

use crate::lamination::{ClassRole, LaminationClass};

/// One class prepared for drawing: member angles in turns.
#[derive(Clone, Debug)]
pub struct ChordClass {
    pub label: String,
    pub role: ClassRole,
    pub angles: Vec<f64>,
}

/// A full diagram: classes plus optional cut-point markers.
#[derive(Clone, Debug, Default)]
pub struct ChordDiagram {
    pub classes: Vec<ChordClass>,
    pub cut_points: Vec<f64>,
}

fn role_color(role: ClassRole) -> &'static str {
    match role {
        ClassRole::Characteristic => "#d62728",
        ClassRole::Critical => "#1f77b4",
        ClassRole::ForwardImage(_) => "#7f7f7f",
        ClassRole::Generic => "#2ca02c",
    }
}

fn role_label(role: ClassRole) -> String {
    match role {
        ClassRole::Characteristic => "characteristic".into(),
        ClassRole::Critical => "critical".into(),
        ClassRole::ForwardImage(k) => format!("image-{k}"),
        ClassRole::Generic => "class".into(),
    }
}

impl ChordDiagram {
    /// Builds a diagram from computed classes, using cluster midpoints as
    /// the member angles.
    pub fn from_classes(classes: &[LaminationClass]) -> Self {
        let chord_classes = classes
            .iter()
            .map(|c| ChordClass {
                label: role_label(c.role),
                role: c.role,
                angles: c
                    .clusters
                    .iter()
                    .map(|cl| super::rational_turns(&cl.midpoint()))
                    .collect(),
            })
            .collect();
        ChordDiagram {
            classes: chord_classes,
            cut_points: Vec::new(),
        }
    }
}

fn point(t: f64) -> (f64, f64) {
    let a = core::f64::consts::TAU * t;
    // SVG y grows downward; flip for the usual orientation.
    (a.cos(), -a.sin())
}

/// Renders the diagram as a standalone SVG document. Output bytes are a
/// deterministic function of the input.
pub fn render_chords(diagram: &ChordDiagram) -> String {
    let mut svg = String::new();
    svg.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.15 -1.15 2.30 2.30\" \
         width=\"640\" height=\"640\">\n",
    );
    svg.push_str(
        "  <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#222222\" \
         stroke-width=\"0.008\"/>\n",
    );
    for t in &diagram.cut_points {
        let (x, y) = point(*t);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"#bbbbbb\" stroke-width=\"0.006\"/>",
            0.97 * x,
            0.97 * y,
            1.03 * x,
            1.03 * y
        );
    }
    for class in &diagram.classes {
        let color = role_color(class.role);
        let mut angles = class.angles.clone();
        angles.sort_by(f64::total_cmp);
        // Hull boundary: chords between cyclically consecutive members.
        if angles.len() >= 2 {
            let edges = if angles.len() == 2 { 1 } else { angles.len() };
            for i in 0..edges {
                let (x1, y1) = point(angles[i]);
                let (x2, y2) = point(angles[(i + 1) % angles.len()]);
                let _ = writeln!(
                    svg,
                    "  <line x1=\"{x1:.6}\" y1=\"{y1:.6}\" x2=\"{x2:.6}\" y2=\"{y2:.6}\" \
                     stroke=\"{color}\" stroke-width=\"0.010\"/>"
                );
            }
        }
        for t in &angles {
            let (x, y) = point(*t);
            let _ = writeln!(
                svg,
                "  <circle cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"0.018\" fill=\"{color}\">\
                 <title>{} t={t:.6}</title></circle>",
                class.label
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
