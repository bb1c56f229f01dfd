//! Deterministic SVG rendering of a substrate, a stencil overlay, and the
//! placed nodes. Text output only, so renders diff cleanly in tests.

use friction_core::geometry::{Circuit, Role};
use friction_core::stencil::Stencil;

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

pub fn render(circuit: &Circuit, stencil: Option<&Stencil>) -> String {
    let side = circuit.substrate().side() as f64;
    let margin = side * 0.05 + 1.0;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        fmt(-margin),
        fmt(-margin),
        fmt(side + 2.0 * margin),
        fmt(side + 2.0 * margin)
    ));
    out.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{w}\" fill=\"#fcfcf7\" stroke=\"#333333\" stroke-width=\"{sw}\"/>\n",
        w = fmt(side),
        sw = fmt(side / 400.0)
    ));

    if let Some(stencil) = stencil {
        let a = stencil.outer_side();
        let s = stencil.inner_side();
        let origin = stencil.origin();
        let thin = fmt(side / 800.0);
        // Outer-square grid lines across the substrate.
        let mut x = (origin.x - a / 2.0).rem_euclid(a) - a;
        while x <= side + a {
            out.push_str(&format!(
                "  <line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"#7a9e7e\" stroke-width=\"{thin}\"/>\n",
                x = fmt(x),
                y0 = fmt(0.0),
                y1 = fmt(side)
            ));
            x += a;
        }
        let mut y = (origin.y - a / 2.0).rem_euclid(a) - a;
        while y <= side + a {
            out.push_str(&format!(
                "  <line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#7a9e7e\" stroke-width=\"{thin}\"/>\n",
                y = fmt(y),
                x0 = fmt(0.0),
                x1 = fmt(side)
            ));
            y += a;
        }
        // Inner squares of every cell overlapping the substrate.
        let cells = (side / a).ceil() as i64 + 2;
        for i in -cells..=cells {
            for j in -cells..=cells {
                let cx = origin.x + i as f64 * a;
                let cy = origin.y + j as f64 * a;
                if cx + s / 2.0 < 0.0
                    || cx - s / 2.0 > side
                    || cy + s / 2.0 < 0.0
                    || cy - s / 2.0 > side
                {
                    continue;
                }
                out.push_str(&format!(
                    "  <rect x=\"{x}\" y=\"{y}\" width=\"{w}\" height=\"{w}\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"{thin}\"/>\n",
                    x = fmt(cx - s / 2.0),
                    y = fmt(cy - s / 2.0),
                    w = fmt(s)
                ));
            }
        }
    }

    let r = fmt((side / 120.0).max(0.15));
    for node in circuit.nodes() {
        let fill = match node.role {
            Role::Input => "#1f77b4",
            Role::Output => "#d62728",
            Role::Helper => "#7f7f7f",
        };
        let covered = stencil.is_some_and(|s| s.covers(node.pos));
        let stroke = if covered { "#000000" } else { "none" };
        out.push_str(&format!(
            "  <circle cx=\"{x}\" cy=\"{y}\" r=\"{r}\" fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"{sw}\"/>\n",
            x = fmt(node.pos.x as f64),
            y = fmt(node.pos.y as f64),
            sw = fmt(side / 600.0)
        ));
    }
    out.push_str("</svg>\n");
    out
}
