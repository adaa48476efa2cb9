//! SVG rendering of the two principal line families around the umbilic.
//!
//! The drawing uses `viewBox="-w -w 2w 2w"` on an 800×800 canvas, with the
//! chart's y axis pointing up. Curves are `<polyline>` elements with class
//! `family-1` or `family-2`; the umbilic is the `<circle class="umbilic">`; the
//! caption `<text class="caption">` carries `T` and the index.

use std::f64::consts::PI;
use std::fmt::Write;

use umbilic_core::cubic_forms::{index_form, umbilic_index, DEFAULT_TRANSVERSALITY_TOL};
use umbilic_core::principal_field::{field_polyline, Family};
use umbilic_core::MongeSurface;

use crate::error::CliError;
use crate::report::RunConfig;

pub const CANVAS: u32 = 800;

/// Integration steps across the half-width of the window.
const STEPS_PER_WINDOW: f64 = 200.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// One curve through `seed`, traced both ways.
fn trace_through(
    surface: &MongeSurface,
    seed: [f64; 2],
    family: Family,
    step: f64,
    window: f64,
) -> Result<Vec<[f64; 2]>, CliError> {
    let max_points = (8.0 * STEPS_PER_WINDOW) as usize;
    let backward = field_polyline(surface, seed, family, -step, max_points, window)?;
    let forward = field_polyline(surface, seed, family, step, max_points, window)?;
    let mut curve: Vec<[f64; 2]> = backward.into_iter().rev().collect();
    curve.extend(forward.into_iter().skip(1));
    Ok(curve)
}

pub fn render_foliation(
    surface: &MongeSurface,
    window: f64,
    density: usize,
    config: &RunConfig,
) -> Result<String, CliError> {
    let index = umbilic_index(&surface.cubic, DEFAULT_TRANSVERSALITY_TOL)?;
    let t = index_form(&surface.cubic);
    let step = window / STEPS_PER_WINDOW;
    let ring = 0.5 * window;

    let mut svg = String::new();
    let w = window;
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        -w, -w, 2.0 * w, 2.0 * w
    )
    .unwrap();
    writeln!(svg, "  <title>Principal lines near an umbilic</title>").unwrap();
    let config_json = serde_json::to_string(config).expect("config serializes");
    writeln!(svg, "  <desc>{}</desc>", escape(&config_json)).unwrap();
    writeln!(
        svg,
        "  <style>.family-1{{stroke:#1f77b4}} .family-2{{stroke:#d62728}} polyline{{fill:none;stroke-width:{:.6}}} .umbilic{{fill:black}} .caption{{font-family:sans-serif;font-size:{:.6}px}}</style>",
        w / 400.0,
        w / 16.0
    )
    .unwrap();
    writeln!(svg, r#"  <g transform="scale(1,-1)">"#).unwrap();
    for i in 0..density {
        let phi = 2.0 * PI * (i as f64 + 0.5) / density as f64;
        let seed = [ring * phi.cos(), ring * phi.sin()];
        for (family, class) in [(Family::First, "family-1"), (Family::Second, "family-2")] {
            let curve = trace_through(surface, seed, family, step, window)?;
            let mut points = String::new();
            for (j, p) in curve.iter().enumerate() {
                if j > 0 {
                    points.push(' ');
                }
                write!(points, "{:.6},{:.6}", p[0], p[1]).unwrap();
            }
            writeln!(svg, r#"    <polyline class="{class}" points="{points}"/>"#).unwrap();
        }
    }
    writeln!(
        svg,
        r#"    <circle class="umbilic" cx="0" cy="0" r="{:.6}"/>"#,
        w / 80.0
    )
    .unwrap();
    writeln!(svg, "  </g>").unwrap();
    writeln!(
        svg,
        r#"  <text class="caption" x="{:.6}" y="{:.6}">T = {}, index = {}</text>"#,
        -0.95 * w,
        -0.85 * w,
        t,
        index
    )
    .unwrap();
    svg.push_str("</svg>\n");
    Ok(svg)
}
