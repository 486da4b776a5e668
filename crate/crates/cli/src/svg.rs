//! Minimal standalone SVG rendering for the plot-data CSVs: polylines,
//! scatter points, and bars in a fixed-size frame. Numbers are written with
//! three decimals so output is deterministic.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub enum Mark {
    Line,
    Points,
    Bars,
}

pub struct Layer<'a> {
    pub name: &'a str,
    pub mark: Mark,
    pub points: Vec<(f64, f64)>,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn over(layers: &[Layer<'_>]) -> Self {
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for layer in layers {
            for &(x, y) in &layer.points {
                f.x_min = f.x_min.min(x);
                f.x_max = f.x_max.max(x);
                f.y_min = f.y_min.min(y);
                f.y_max = f.y_max.max(y);
            }
        }
        if !f.x_min.is_finite() || f.x_min == f.x_max {
            f.x_min -= 1.0;
            f.x_max = f.x_min + 2.0;
        }
        if !f.y_min.is_finite() || f.y_min == f.y_max {
            f.y_min -= 1.0;
            f.y_max = f.y_min + 2.0;
        }
        f
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Render layers into one chart with a title and a frame box.
pub fn chart(title: &str, layers: &[Layer<'_>]) -> String {
    let frame = Frame::over(layers);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{:.3}\" height=\"{:.3}\" \
         fill=\"none\" stroke=\"#444\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    ));
    out.push_str(&format!(
        "<text x=\"{MARGIN}\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\">{}</text>\n",
        escape(title)
    ));

    for (i, layer) in layers.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match layer.mark {
            Mark::Line => {
                if layer.points.len() < 2 {
                    continue;
                }
                let path: Vec<String> = layer
                    .points
                    .iter()
                    .map(|&(x, y)| format!("{:.3},{:.3}", frame.px(x), frame.py(y)))
                    .collect();
                out.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                    path.join(" ")
                ));
            }
            Mark::Points => {
                for &(x, y) in &layer.points {
                    out.push_str(&format!(
                        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"{color}\"/>\n",
                        frame.px(x),
                        frame.py(y)
                    ));
                }
            }
            Mark::Bars => {
                // Consecutive points give bar edges; y is the bar height.
                for pair in layer.points.windows(2) {
                    let (x0, y) = pair[0];
                    let (x1, _) = pair[1];
                    let top = frame.py(y);
                    let base = frame.py(frame.y_min.max(0.0));
                    out.push_str(&format!(
                        "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" \
                         fill=\"{color}\" fill-opacity=\"0.6\" stroke=\"{color}\"/>\n",
                        frame.px(x0),
                        top,
                        (frame.px(x1) - frame.px(x0)).max(0.5),
                        (base - top).max(0.0),
                    ));
                }
            }
        }
        // Legend entry.
        let ly = 30.0 + 18.0 * (i + 1) as f64;
        out.push_str(&format!(
            "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{:.3}\" y=\"{:.3}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            WIDTH - 200.0,
            ly - 10.0,
            WIDTH - 182.0,
            ly,
            escape(layer.name)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
