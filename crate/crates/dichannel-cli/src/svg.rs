//! Minimal hand-rolled SVG figures: a fixed 600x600 viewport showing the
//! correlation square with axes p(1|1) (horizontal) and p(1|2)
//! (vertical), both in [0, 1].

const SIZE: f64 = 600.0;
const MARGIN: f64 = 60.0;
const PLOT: f64 = SIZE - 2.0 * MARGIN;

/// A boundary polyline with a stroke style.
pub struct Curve {
    pub points: Vec<[f64; 2]>,
    pub color: &'static str,
    pub width: f64,
    pub dashed: bool,
    pub label: String,
}

/// A scatter group with a fill style.
pub struct Scatter {
    pub points: Vec<[f64; 2]>,
    pub color: &'static str,
    pub radius: f64,
    pub label: String,
}

fn px(x: f64) -> f64 {
    MARGIN + PLOT * x
}

fn py(y: f64) -> f64 {
    SIZE - MARGIN - PLOT * y
}

/// Renders curves and scatter groups over the correlation square.
pub fn figure(curves: &[Curve], scatters: &[Scatter]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" \
         viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    s.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"
    ));
    s.push_str(&format!(
        "  <rect x=\"{}\" y=\"{}\" width=\"{PLOT}\" height=\"{PLOT}\" fill=\"none\" \
         stroke=\"black\" stroke-width=\"1\"/>\n",
        px(0.0),
        py(1.0)
    ));
    // ticks and labels every 0.25
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        s.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            px(v),
            py(0.0),
            px(v),
            py(0.0) + 6.0
        ));
        s.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">{v}</text>\n",
            px(v),
            py(0.0) + 24.0
        ));
        s.push_str(&format!(
            "  <line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            px(0.0) - 6.0,
            py(v),
            px(0.0),
            py(v)
        ));
        s.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"end\">{v}</text>\n",
            px(0.0) - 10.0,
            py(v) + 5.0
        ));
    }
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"16\" text-anchor=\"middle\">p(1|1)</text>\n",
        px(0.5),
        SIZE - 12.0
    ));
    s.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"16\" text-anchor=\"middle\" \
         transform=\"rotate(-90 {:.1} {:.1})\">p(1|2)</text>\n",
        16.0,
        py(0.5),
        16.0,
        py(0.5)
    ));
    for c in curves {
        if c.points.is_empty() {
            continue;
        }
        let mut d = String::new();
        for (i, p) in c.points.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{:.2},{:.2} ", px(p[0]), py(p[1])));
        }
        d.push('Z');
        let dash = if c.dashed {
            " stroke-dasharray=\"8,5\""
        } else {
            ""
        };
        s.push_str(&format!(
            "  <path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{dash}>\
             <title>{}</title></path>\n",
            c.color, c.width, c.label
        ));
    }
    for g in scatters {
        for p in &g.points {
            s.push_str(&format!(
                "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{}\" fill=\"{}\">\
                 <title>{}</title></circle>\n",
                px(p[0]),
                py(p[1]),
                g.radius,
                g.color,
                g.label
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}
