//! Hand-rolled SVG plots: polylines, markers, polygons, axes with ticks,
//! and a legend on a fixed 800x600 canvas. The x axis can be logarithmic
//! (sample-size sweeps); coordinates must be finite.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

#[derive(Clone, Debug)]
pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    x_range: (f64, f64),
    y_range: (f64, f64),
    log_x: bool,
    body: String,
    legend: Vec<(String, String)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn new(
        title: &str,
        x_label: &str,
        y_label: &str,
        x_range: (f64, f64),
        y_range: (f64, f64),
        log_x: bool,
    ) -> Plot {
        assert!(x_range.0 < x_range.1 && y_range.0 < y_range.1, "degenerate plot range");
        assert!(!log_x || x_range.0 > 0.0, "log axis needs positive range");
        Plot {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            x_range,
            y_range,
            log_x,
            body: String::new(),
            legend: Vec::new(),
        }
    }

    /// Symmetric ranges with 5% padding around a point cloud.
    pub fn fit_ranges(points: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for &(px, py) in points {
            x.0 = x.0.min(px);
            x.1 = x.1.max(px);
            y.0 = y.0.min(py);
            y.1 = y.1.max(py);
        }
        let pad = |r: (f64, f64)| {
            let w = (r.1 - r.0).max(1e-9);
            (r.0 - 0.05 * w, r.1 + 0.05 * w)
        };
        (pad(x), pad(y))
    }

    fn tx(&self, x: f64) -> f64 {
        assert!(x.is_finite(), "non-finite x coordinate");
        let (a, b) = self.x_range;
        let f = if self.log_x {
            (x.max(a).ln() - a.ln()) / (b.ln() - a.ln())
        } else {
            (x - a) / (b - a)
        };
        MARGIN_L + f * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn ty(&self, y: f64) -> f64 {
        assert!(y.is_finite(), "non-finite y coordinate");
        let (a, b) = self.y_range;
        HEIGHT - MARGIN_B - (y - a) / (b - a) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> =
            pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.tx(x), self.ty(y))).collect();
        self.body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], fill: &str, stroke: &str) {
        let coords: Vec<String> =
            pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.tx(x), self.ty(y))).collect();
        self.body.push_str(&format!(
            "<polygon fill=\"{fill}\" stroke=\"{stroke}\" stroke-width=\"1\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
    }

    pub fn scatter(&mut self, pts: &[(f64, f64)], color: &str, radius: f64) {
        for &(x, y) in pts {
            self.body.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius}\" fill=\"{color}\"/>\n",
                self.tx(x),
                self.ty(y)
            ));
        }
    }

    pub fn segment(&mut self, a: (f64, f64), b: (f64, f64), color: &str, width: f64) {
        self.body.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n",
            self.tx(a.0), self.ty(a.1), self.tx(b.0), self.ty(b.1)
        ));
    }

    pub fn label(&mut self, at: (f64, f64), text: &str, color: &str) {
        self.body.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            self.tx(at.0),
            self.ty(at.1),
            esc(text)
        ));
    }

    pub fn legend_entry(&mut self, label: &str, color: &str) {
        self.legend.push((label.to_string(), color.to_string()));
    }

    fn x_ticks(&self) -> Vec<f64> {
        if self.log_x {
            let lo = self.x_range.0.log10().floor() as i32;
            let hi = self.x_range.1.log10().ceil() as i32;
            (lo..=hi)
                .map(|k| 10f64.powi(k))
                .filter(|&v| v >= self.x_range.0 * 0.999 && v <= self.x_range.1 * 1.001)
                .collect()
        } else {
            (0..=5)
                .map(|k| self.x_range.0 + (self.x_range.1 - self.x_range.0) * k as f64 / 5.0)
                .collect()
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        // Frame
        out.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#444\"/>\n",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        ));
        // Ticks
        for x in self.x_ticks() {
            let sx = self.tx(x);
            out.push_str(&format!(
                "<line x1=\"{sx:.2}\" y1=\"{:.2}\" x2=\"{sx:.2}\" y2=\"{:.2}\" stroke=\"#444\"/>\n",
                HEIGHT - MARGIN_B,
                HEIGHT - MARGIN_B + 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{sx:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                HEIGHT - MARGIN_B + 18.0,
                format_tick(x)
            ));
        }
        for k in 0..=5 {
            let y = self.y_range.0 + (self.y_range.1 - self.y_range.0) * k as f64 / 5.0;
            let sy = self.ty(y);
            out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{sy:.2}\" x2=\"{MARGIN_L}\" y2=\"{sy:.2}\" stroke=\"#444\"/>\n",
                MARGIN_L - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                MARGIN_L - 8.0,
                sy + 4.0,
                format_tick(y)
            ));
        }
        // Labels and title
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\" font-weight=\"bold\">{}</text>\n",
            WIDTH / 2.0,
            esc(&self.title)
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            HEIGHT - 12.0,
            esc(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            esc(&self.y_label)
        ));
        out.push_str(&self.body);
        // Legend
        for (i, (label, color)) in self.legend.iter().enumerate() {
            let y = MARGIN_T + 16.0 + 18.0 * i as f64;
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"14\" height=\"4\" fill=\"{color}\"/>\n",
                MARGIN_L + 10.0,
                y - 4.0
            ));
            out.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{y:.2}\" font-size=\"12\">{}</text>\n",
                MARGIN_L + 30.0,
                esc(label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (0.01..10_000.0).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}
