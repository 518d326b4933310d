//! Report, CSV and SVG emission.

use std::fmt::{Display, Write as _};

use awr_core::complex::DisplayComplex;
use awr_core::{Complex, ExtendedComplex};

/// Line-oriented `key = value` report.
#[derive(Debug, Default, Clone)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push((key.to_string(), value.to_string()));
        self
    }

    pub fn complex(&mut self, key: &str, z: Complex) -> &mut Self {
        self.put(key, DisplayComplex(z))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            writeln!(s, "{k} = {v}").unwrap();
        }
        s
    }
}

/// Minimal CSV table of already-formatted cells.
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip text; exponent form for very small or large values.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:?}")
    }
}

/// `re, im, is_inf` cells for an extended value; `∞` writes empty parts.
pub fn extended_cells(w: ExtendedComplex) -> [String; 3] {
    match w {
        ExtendedComplex::Finite(w) => [num(w.re), num(w.im), "0".into()],
        ExtendedComplex::Infinity => [String::new(), String::new(), "1".into()],
    }
}

pub const BOUNDARY_COLOR: &str = "black";
pub const W_COLOR: &str = "blue";
pub const R_COLOR: &str = "red";
pub const SEGMENT_COLOR: &str = "gray";
pub const MEDIATRIX_COLOR: &str = "black";

#[derive(Debug, Clone)]
enum Item {
    Polyline(Vec<Complex>),
    Point {
        at: Complex,
        color: &'static str,
        title: Option<String>,
    },
    Segment(Complex, Complex),
    /// Infinite line through a point with a direction.
    Line {
        through: Complex,
        dir: Complex,
    },
}

/// Plane figure with the fixed palette: boundary black, `w` blue, `R_w`
/// red, segments gray, mediatrices dashed.
#[derive(Debug, Clone, Default)]
pub struct Figure {
    items: Vec<Item>,
    focus: Vec<Complex>,
}

impl Figure {
    pub fn new() -> Self {
        Self::default()
    }

    /// A boundary curve, split wherever a point is missing.
    pub fn boundary(&mut self, pts: &[Option<Complex>]) {
        let mut run = Vec::new();
        for p in pts {
            match p {
                Some(p) => run.push(*p),
                None => {
                    if run.len() > 1 {
                        self.items.push(Item::Polyline(std::mem::take(&mut run)));
                    }
                    run.clear();
                }
            }
        }
        if run.len() > 1 {
            self.items.push(Item::Polyline(run));
        }
    }

    pub fn w(&mut self, at: Complex, title: Option<String>) {
        self.focus.push(at);
        self.items.push(Item::Point {
            at,
            color: W_COLOR,
            title,
        });
    }

    pub fn r(&mut self, at: Complex, title: Option<String>) {
        self.focus.push(at);
        self.items.push(Item::Point {
            at,
            color: R_COLOR,
            title,
        });
    }

    pub fn segment(&mut self, a: Complex, b: Complex) {
        self.items.push(Item::Segment(a, b));
    }

    pub fn mediatrix(&mut self, through: Complex, normal: Complex) {
        self.focus.push(through);
        self.items.push(Item::Line {
            through,
            dir: normal * Complex::new(0.0, 1.0),
        });
    }

    /// Extra points the view should contain.
    pub fn include(&mut self, p: Complex) {
        self.focus.push(p);
    }

    fn view(&self) -> (f64, f64, f64, f64) {
        let pts: Vec<Complex> = if self.focus.is_empty() {
            self.items
                .iter()
                .flat_map(|i| match i {
                    Item::Polyline(p) => p.clone(),
                    _ => Vec::new(),
                })
                .collect()
        } else {
            self.focus.clone()
        };
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in pts.iter().filter(|p| p.re.is_finite() && p.im.is_finite()) {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        if !x0.is_finite() {
            return (-1.0, -1.0, 2.0, 2.0);
        }
        let size = (x1 - x0).max(y1 - y0).max(1e-3) * 1.5;
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        (cx - size / 2.0, cy - size / 2.0, size, size)
    }

    pub fn render(&self) -> String {
        let (x, y, w, h) = self.view();
        let stroke = w / 400.0;
        let radius = w / 150.0;
        // the y axis is flipped so the picture reads in complex-plane orientation
        let p = |z: Complex| format!("{},{}", num(z.re), num(-z.im));
        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="800" height="800">"#,
            num(x),
            num(-(y + h)),
            num(w),
            num(h)
        )
        .unwrap();
        for item in &self.items {
            match item {
                Item::Polyline(pts) => {
                    let coords: Vec<String> = pts.iter().map(|&z| p(z)).collect();
                    writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{BOUNDARY_COLOR}" stroke-width="{}"/>"#,
                        coords.join(" "),
                        num(stroke)
                    )
                    .unwrap();
                }
                Item::Segment(a, b) => {
                    writeln!(
                        s,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{SEGMENT_COLOR}" stroke-width="{}"/>"#,
                        num(a.re),
                        num(-a.im),
                        num(b.re),
                        num(-b.im),
                        num(stroke)
                    )
                    .unwrap();
                }
                Item::Line { through, dir } => {
                    let reach = 2.0 * (w + h);
                    let (a, b) = (*through - *dir * reach, *through + *dir * reach);
                    writeln!(
                        s,
                        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{MEDIATRIX_COLOR}" stroke-width="{}" stroke-dasharray="{} {}"/>"#,
                        num(a.re),
                        num(-a.im),
                        num(b.re),
                        num(-b.im),
                        num(stroke),
                        num(4.0 * stroke),
                        num(3.0 * stroke)
                    )
                    .unwrap();
                }
                Item::Point { at, color, title } => {
                    match title {
                        Some(t) => writeln!(
                            s,
                            r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"><title>{t}</title></circle>"#,
                            num(at.re),
                            num(-at.im),
                            num(radius)
                        ),
                        None => writeln!(
                            s,
                            r#"<circle cx="{}" cy="{}" r="{}" fill="{color}"/>"#,
                            num(at.re),
                            num(-at.im),
                            num(radius)
                        ),
                    }
                    .unwrap();
                }
            }
        }
        s.push_str("</svg>\n");
        s
    }
}
