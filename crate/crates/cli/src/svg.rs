//! SVG rendering of a surface: triangles developed along a spanning tree,
//! unmatched sides numbered by gluing pair, singularities as dots, and when
//! a vertical cylinder decomposition exists, a second panel of cylinders.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use ayrel::cylinders::CylinderDecomposition;
use ayrel::{HalfEdge, Label, NfElem, Surface};

/// Coordinates are written with this many decimals.
const DIGITS: usize = 12;

struct Sheet {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
}

impl Sheet {
    fn new() -> Self {
        Sheet { body: String::new(), min: (f64::MAX, f64::MAX), max: (f64::MIN, f64::MIN) }
    }

    fn see(&mut self, p: (f64, f64)) {
        self.min = (self.min.0.min(p.0), self.min.1.min(p.1));
        self.max = (self.max.0.max(p.0), self.max.1.max(p.1));
    }
}

fn pt(p: (f64, f64), scale: f64) -> String {
    // y grows downward in SVG.
    format!("{:.*},{:.*}", DIGITS, p.0 * scale, DIGITS, -p.1 * scale)
}

/// Developed positions of every triangle's vertex 0, breadth first.
fn develop(s: &Surface<NfElem>) -> (Vec<(f64, f64)>, Vec<Vec<bool>>) {
    let n = s.num_triangles();
    let mut origin = vec![None; n];
    let mut tree = vec![vec![false; 3]; n];
    origin[0] = Some((0.0, 0.0));
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        let pos = s.positions(t);
        let o = origin[t].expect("placed");
        for e in 0..3 {
            let p = s.partner(HalfEdge::new(t, e));
            if origin[p.t].is_some() {
                continue;
            }
            // The partner starts where this half-edge ends.
            let end = &pos[(e + 1) % 3];
            let q = s.positions(p.t);
            let start = (o.0 + end.x.to_f64() - q[p.e].x.to_f64(), o.1 + end.y.to_f64() - q[p.e].y.to_f64());
            origin[p.t] = Some(start);
            tree[t][e] = true;
            tree[p.t][p.e] = true;
            queue.push_back(p.t);
        }
    }
    (origin.into_iter().map(|o| o.unwrap_or((0.0, 0.0))).collect(), tree)
}

fn surface_panel(s: &Surface<NfElem>, scale: f64, sheet: &mut Sheet) {
    let (origin, tree) = develop(s);
    let mut pair: BTreeMap<u32, usize> = BTreeMap::new();
    for h in s.half_edges() {
        if !tree[h.t][h.e] {
            let n = pair.len();
            pair.entry(s.edge_ref(h).id).or_insert(n + 1);
        }
    }
    let corners = |t: usize| -> Vec<(f64, f64)> {
        let o = origin[t];
        s.positions(t).iter().map(|p| (o.0 + p.x.to_f64(), o.1 + p.y.to_f64())).collect()
    };
    for t in 0..s.num_triangles() {
        let c = corners(t);
        c.iter().for_each(|&p| sheet.see((p.0 * scale, -p.1 * scale)));
        let points: Vec<String> = c.iter().map(|&p| pt(p, scale)).collect();
        let _ = writeln!(sheet.body, r##"<polygon points="{}" fill="#eef3fb" stroke="#c5cfdc" stroke-width="0.5"/>"##, points.join(" "));
        for e in 0..3 {
            if tree[t][e] {
                continue;
            }
            let (a, b) = (c[e], c[(e + 1) % 3]);
            let _ = writeln!(sheet.body, r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#203050" stroke-width="1.2"/>"##,
                fmt(a.0 * scale), fmt(-a.1 * scale), fmt(b.0 * scale), fmt(-b.1 * scale));
            let m = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            let label = pair[&s.edge_ref(HalfEdge::new(t, e)).id];
            let _ = writeln!(sheet.body, r##"<text x="{}" y="{}" font-size="9" fill="#203050">{label}</text>"##, fmt(m.0 * scale), fmt(-m.1 * scale));
        }
        for e in 0..3 {
            let fill = match s.corner_label(HalfEdge::new(t, e)) {
                Label::Black => "#000000",
                Label::White => "#ffffff",
                Label::Regular => continue,
            };
            let p = c[e];
            let _ = writeln!(sheet.body, r##"<circle cx="{}" cy="{}" r="3" fill="{fill}" stroke="#000000"/>"##, fmt(p.0 * scale), fmt(-p.1 * scale));
        }
    }
}

fn cylinder_panel(d: &CylinderDecomposition<NfElem>, scale: f64, left: f64, sheet: &mut Sheet) {
    let mut x = left;
    for (i, c) in d.cylinders.iter().enumerate() {
        let (w, h) = (c.width.to_f64() * scale, c.circumference.to_f64() * scale);
        sheet.see((x, 0.0));
        sheet.see((x + w, -h));
        let _ = writeln!(
            sheet.body,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#f6efe2" stroke="#604020"/>"##,
            fmt(x), fmt(-h), fmt(w), fmt(h)
        );
        let _ = writeln!(
            sheet.body,
            r##"<text x="{}" y="{}" font-size="9" fill="#604020">C{i} {}</text>"##,
            fmt(x + 2.0), fmt(12.0), c.kind.name()
        );
        x += w + 0.1 * scale;
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.DIGITS$}")
}

/// Render `s`, and `d` beside it when given.
pub fn render(s: &Surface<NfElem>, d: Option<&CylinderDecomposition<NfElem>>, scale: f64) -> String {
    let mut sheet = Sheet::new();
    surface_panel(s, scale, &mut sheet);
    if let Some(d) = d {
        let left = sheet.max.0 + 0.5 * scale;
        cylinder_panel(d, scale, left, &mut sheet);
    }
    let pad = 20.0;
    let (x0, y0) = (sheet.min.0 - pad, sheet.min.1 - pad);
    let (w, h) = (sheet.max.0 - sheet.min.0 + 2.0 * pad, sheet.max.1 - sheet.min.1 + 2.0 * pad);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n{}</svg>\n",
        fmt(x0), fmt(y0), fmt(w), fmt(h), sheet.body
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use ayrel::ay::build_x0;

    #[test]
    fn x0_renders_both_singularities() {
        let x = build_x0().unwrap();
        let svg = render(&x.surface, None, 100.0);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r##"fill="#000000""##) && svg.contains(r##"fill="#ffffff""##));
        assert_eq!(svg, render(&x.surface, None, 100.0));
    }
}
