//! Hand-rolled SVG line plots. Output is deterministic: fixed canvas, fixed
//! palette, coordinates formatted to two decimals.

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const PLOT_X0: f64 = 70.0;
const PLOT_X1: f64 = 530.0;
const PLOT_Y0: f64 = 40.0;
const PLOT_Y1: f64 = 390.0;
const TICKS: usize = 5;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub struct LinePlot {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<(String, Vec<(f64, f64)>)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".into()
    } else {
        s.into()
    }
}

impl LinePlot {
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
    ) -> Self {
        LinePlot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn add_series(&mut self, name: impl Into<String>, points: Vec<(f64, f64)>) {
        let finite: Vec<(f64, f64)> = points
            .into_iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        self.series.push((name.into(), finite));
    }

    pub fn render(&self) -> String {
        let points = self.series.iter().flat_map(|(_, p)| p.iter());
        let mut xr = (f64::INFINITY, f64::NEG_INFINITY);
        let mut yr = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            xr = (xr.0.min(x), xr.1.max(x));
            yr = (yr.0.min(y), yr.1.max(y));
        }
        let (x_min, x_max) = pad_range(xr);
        let (y_min, y_max) = pad_range(yr);
        let px = |x: f64| PLOT_X0 + (x - x_min) / (x_max - x_min) * (PLOT_X1 - PLOT_X0);
        let py = |y: f64| PLOT_Y1 - (y - y_min) / (y_max - y_min) * (PLOT_Y1 - PLOT_Y0);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        out.push_str(&format!(
            "<rect x=\"{PLOT_X0}\" y=\"{PLOT_Y0}\" width=\"{}\" height=\"{}\" fill=\"none\" \
             stroke=\"#333333\"/>\n",
            PLOT_X1 - PLOT_X0,
            PLOT_Y1 - PLOT_Y0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
            (PLOT_X0 + PLOT_X1) / 2.0,
            esc(&self.title)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            (PLOT_X0 + PLOT_X1) / 2.0,
            HEIGHT - 10.0,
            esc(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}\
             </text>\n",
            (PLOT_Y0 + PLOT_Y1) / 2.0,
            (PLOT_Y0 + PLOT_Y1) / 2.0,
            esc(&self.y_label)
        ));

        for i in 0..TICKS {
            let f = i as f64 / (TICKS - 1) as f64;
            let xv = x_min + f * (x_max - x_min);
            let yv = y_min + f * (y_max - y_min);
            let (tx, ty) = (px(xv), py(yv));
            out.push_str(&format!(
                "<line x1=\"{tx:.2}\" y1=\"{PLOT_Y1}\" x2=\"{tx:.2}\" y2=\"{}\" \
                 stroke=\"#333333\"/>\n",
                PLOT_Y1 + 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{tx:.2}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                PLOT_Y1 + 20.0,
                tick_label(xv)
            ));
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{ty:.2}\" x2=\"{PLOT_X0}\" y2=\"{ty:.2}\" \
                 stroke=\"#333333\"/>\n",
                PLOT_X0 - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
                PLOT_X0 - 9.0,
                ty + 4.0,
                tick_label(yv)
            ));
        }

        for (i, (name, pts)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            if !pts.is_empty() {
                let coords: Vec<String> = pts
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                out.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                     stroke-width=\"2\"/>\n",
                    coords.join(" ")
                ));
                for &(x, y) in pts {
                    out.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                        px(x),
                        py(y)
                    ));
                }
            }
            let ly = PLOT_Y0 + 16.0 * i as f64 + 8.0;
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" \
                 stroke-width=\"2\"/>\n",
                PLOT_X1 + 12.0,
                PLOT_X1 + 36.0
            ));
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\">{}</text>\n",
                PLOT_X1 + 42.0,
                ly + 4.0,
                esc(name)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Finite, nonempty span for an axis; degenerate or empty data maps to a
/// unit span so coordinates stay finite.
fn pad_range((lo, hi): (f64, f64)) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}
