//! Minimal deterministic SVG rendering for ROC curves: fixed layout,
//! fixed palette, two-decimal coordinates, and no external assets.

use std::fmt::Write as _;
use std::path::Path;

use concroc::error::{Error, Result};

const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Plot area: x in [60, 460], y in [20, 420], 400 px per unit axis.
fn px(t: f64) -> f64 {
    60.0 + t * 400.0
}

fn py(r: f64) -> f64 {
    420.0 - r * 400.0
}

/// Write an SVG with one polyline per named curve over the shared grid `ts`.
pub fn emit_svg(ts: &[f64], curves: &[(String, Vec<f64>)], path: &Path) -> Result<()> {
    for (_, ys) in curves {
        if ys.len() != ts.len() {
            return Err(Error::LengthMismatch {
                left: ts.len(),
                right: ys.len(),
            });
        }
    }

    let mut out = String::new();
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 500 460\" \
         font-family=\"sans-serif\" font-size=\"12\">\n",
    );
    out.push_str("<rect width=\"500\" height=\"460\" fill=\"white\"/>\n");
    out.push_str(
        "<rect x=\"60\" y=\"20\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"#888\"/>\n",
    );
    out.push_str(
        "<line x1=\"60\" y1=\"420\" x2=\"460\" y2=\"20\" stroke=\"#bbb\" \
         stroke-dasharray=\"6,4\"/>\n",
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (x, y) = (px(f), py(f));
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"436\" text-anchor=\"middle\">{f:.2}</text>"
        );
        let _ = writeln!(
            out,
            "<text x=\"52\" y=\"{:.2}\" text-anchor=\"end\">{f:.2}</text>",
            y + 4.0
        );
    }
    out.push_str(
        "<text x=\"260\" y=\"456\" text-anchor=\"middle\">false positive rate t</text>\n",
    );
    for (i, (name, ys)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        out.push_str("<polyline fill=\"none\" stroke=\"");
        out.push_str(color);
        out.push_str("\" stroke-width=\"1.5\" points=\"");
        for (j, (&t, &r)) in ts.iter().zip(ys).enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.2},{:.2}", px(t), py(r));
        }
        out.push_str("\"/>\n");
        let ly = 400.0 - 16.0 * (curves.len() - 1 - i) as f64;
        let _ = writeln!(
            out,
            "<line x1=\"330\" y1=\"{ly:.2}\" x2=\"354\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"1.5\"/>"
        );
        let _ = writeln!(
            out,
            "<text x=\"360\" y=\"{:.2}\">{name}</text>",
            ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out)?;
    Ok(())
}
