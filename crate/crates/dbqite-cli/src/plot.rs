//! Static SVG charts for trace CSVs: energy and fidelity per step, and
//! fidelity against (log-scale) gate counts.

use anyhow::bail;

use dbqite::trace::TraceRow;

const WIDTH: f64 = 680.0;
const HEIGHT: f64 = 460.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Energy,
    Fidelity,
    GatesVsFidelity,
}

impl std::str::FromStr for PlotKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "energy" => Ok(PlotKind::Energy),
            "fidelity" => Ok(PlotKind::Fidelity),
            "gates-vs-fidelity" => Ok(PlotKind::GatesVsFidelity),
            other => Err(format!(
                "unknown plot kind {other:?} (want energy|fidelity|gates-vs-fidelity)"
            )),
        }
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

/// Renders one chart from labelled row sets.
pub fn render(kind: PlotKind, inputs: &[(String, Vec<TraceRow>)]) -> anyhow::Result<String> {
    if inputs.is_empty() {
        bail!("no input CSVs given");
    }
    let log_x = kind == PlotKind::GatesVsFidelity;
    let mut series = Vec::new();
    for (label, rows) in inputs {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|r| match kind {
                PlotKind::Energy => Some((r.k as f64, r.energy)),
                PlotKind::Fidelity => Some((r.k as f64, r.fidelity)),
                PlotKind::GatesVsFidelity => {
                    // zero-gate rows (initializations) have no place on a log axis
                    if r.cz == 0 {
                        None
                    } else {
                        Some(((r.cz as f64).log10(), r.fidelity))
                    }
                }
            })
            .collect();
        if points.is_empty() {
            bail!("input {label:?} holds no plottable rows for this chart kind");
        }
        series.push(Series { label: label.clone(), points });
    }

    let (mut x_lo, mut x_hi) = (f64::MAX, f64::MIN);
    let (mut y_lo, mut y_hi) = (f64::MAX, f64::MIN);
    for s in &series {
        for &(x, y) in &s.points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if x_hi - x_lo < 1e-12 {
        x_hi = x_lo + 1.0;
    }
    if y_hi - y_lo < 1e-12 {
        y_hi = y_lo + 1.0;
    }
    let pad = 0.04 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |y: f64| HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    // axes
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MARGIN_L, MARGIN_T, MARGIN_L, HEIGHT - MARGIN_B
    ));

    // ticks
    for i in 0..=5 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let fy = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let tx = px(fx);
        let ty = py(fy);
        svg.push_str(&format!(
            "<line x1=\"{tx:.1}\" y1=\"{:.1}\" x2=\"{tx:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        let x_label = if log_x { format!("1e{fx:.1}") } else { format!("{fx:.2}") };
        svg.push_str(&format!(
            "<text x=\"{tx:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{x_label}</text>\n",
            HEIGHT - MARGIN_B + 18.0
        ));
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{ty:.1}\" x2=\"{:.1}\" y2=\"{ty:.1}\" stroke=\"black\"/>\n",
            MARGIN_L - 5.0,
            MARGIN_L
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{fy:.3}</text>\n",
            MARGIN_L - 8.0,
            ty + 4.0
        ));
    }

    let (x_title, y_title) = match kind {
        PlotKind::Energy => ("step k", "energy"),
        PlotKind::Fidelity => ("step k", "ground-state fidelity"),
        PlotKind::GatesVsFidelity => ("CZ gates (log scale)", "ground-state fidelity"),
    };
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{x_title}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" transform=\"rotate(-90 16 {:.1})\" text-anchor=\"middle\">{y_title}</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    ));

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &s.points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                px(x),
                py(y)
            ));
        }
        let ly = MARGIN_T + 16.0 * i as f64 + 10.0;
        svg.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
            WIDTH - MARGIN_R + 12.0,
            ly - 9.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{ly:.1}\">{}</text>\n",
            WIDTH - MARGIN_R + 28.0,
            xml_escape(&s.label)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize, e: f64, f: f64, cz: u64) -> TraceRow {
        TraceRow {
            engine: "dbqite".into(),
            k,
            s: 0.0,
            t_h: 0.0,
            t_omega: 0.0,
            energy: e,
            variance: 0.0,
            fidelity: f,
            cz,
            u3: 0,
            t: 0,
            depth: 0,
        }
    }

    #[test]
    fn energy_plot_has_one_polyline_per_series() {
        let rows = vec![row(0, -1.0, 0.5, 0), row(1, -2.0, 0.8, 100), row(2, -2.5, 0.9, 400)];
        let svg = render(PlotKind::Energy, &[("run".into(), rows)]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(render(PlotKind::Energy, &[]).is_err());
    }

    #[test]
    fn gates_plot_skips_zero_cost_rows() {
        let rows = vec![row(0, -1.0, 0.5, 0), row(1, -2.0, 0.8, 100)];
        let svg = render(PlotKind::GatesVsFidelity, &[("run".into(), rows)]).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
    }
}
