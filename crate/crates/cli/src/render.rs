//! Deterministic SVG for bodies in the plane.

use std::fmt::Write;

use num_traits::ToPrimitive;
use oklab::exactgeom::rational::format;
use oklab::exactgeom::{Polytope, QVector};
use oklab::{Error, Result};

const SCALE: f64 = 80.0;
const MARGIN: f64 = 40.0;

fn label(v: &QVector) -> String {
    format!("({}, {})", format(&v[0]), format(&v[1]))
}

/// Vertices in counterclockwise order around the centroid.
fn cyclic(p: &Polytope) -> Vec<(QVector, f64, f64)> {
    let mut pts: Vec<(QVector, f64, f64)> = p
        .vertices()
        .iter()
        .map(|v| (v.clone(), v[0].to_f64().unwrap_or(0.0), v[1].to_f64().unwrap_or(0.0)))
        .collect();
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.2).sum::<f64>() / n;
    pts.sort_by(|a, b| {
        let ta = (a.2 - cy).atan2(a.1 - cx);
        let tb = (b.2 - cy).atan2(b.1 - cx);
        ta.total_cmp(&tb).then_with(|| a.0.cmp(&b.0))
    });
    pts
}

pub fn render(p: &Polytope) -> Result<String> {
    if p.ambient_dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "can only render planar bodies, got dimension {}",
            p.ambient_dim()
        )));
    }
    if p.is_empty() {
        return Err(Error::InvalidInput("cannot render an empty body".into()));
    }
    let pts = cyclic(p);
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (_, x, y) in &pts {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    let width = (x1 - x0) * SCALE + 2.0 * MARGIN;
    let height = (y1 - y0) * SCALE + 2.0 * MARGIN;
    // y grows downward in SVG
    let sx = |x: f64| (x - x0) * SCALE + MARGIN;
    let sy = |y: f64| (y1 - y) * SCALE + MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width:.1} {height:.1}" width="{width:.1}" height="{height:.1}">"#
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#bbb" stroke-width="1"/>"##,
        sx(x0),
        sy(0.0),
        sx(x1),
        sy(0.0)
    );
    let _ = writeln!(
        out,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#bbb" stroke-width="1"/>"##,
        sx(0.0),
        sy(y0),
        sx(0.0),
        sy(y1)
    );
    match pts.len() {
        1 => {
            let (_, x, y) = &pts[0];
            let _ = writeln!(
                out,
                r##"<circle cx="{:.1}" cy="{:.1}" r="4" fill="#1f4e8c"/>"##,
                sx(*x),
                sy(*y)
            );
        }
        2 => {
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#1f4e8c" stroke-width="3"/>"##,
                sx(pts[0].1),
                sy(pts[0].2),
                sx(pts[1].1),
                sy(pts[1].2)
            );
        }
        _ => {
            let mut d = String::new();
            for (i, (_, x, y)) in pts.iter().enumerate() {
                let _ = write!(d, "{}{:.1} {:.1} ", if i == 0 { "M" } else { "L" }, sx(*x), sy(*y));
            }
            d.push('Z');
            let _ = writeln!(
                out,
                r##"<path d="{d}" fill="#9ec3e6" fill-opacity="0.6" stroke="#1f4e8c" stroke-width="2"/>"##
            );
        }
    }
    for (v, x, y) in &pts {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="12">{}</text>"#,
            sx(*x) + 5.0,
            sy(*y) - 5.0,
            label(v)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use oklab::exactgeom::rational::qvec;

    #[test]
    fn triangle_is_a_path() {
        let p = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]);
        let svg = render(&p).unwrap();
        assert!(svg.contains("<path d=\"M"));
        assert!(svg.contains("(0, 1)"));
        assert_eq!(svg, render(&p).unwrap());
    }

    #[test]
    fn segment_and_point() {
        let seg = render(&Polytope::hull(&[qvec(&[0, 0]), qvec(&[0, 2])])).unwrap();
        assert!(seg.contains("stroke-width=\"3\"") && seg.contains("(0, 2)"));
        let dot = render(&Polytope::hull(&[qvec(&[1, 0])])).unwrap();
        assert!(dot.contains("<circle") && dot.contains("(1, 0)"));
    }

    #[test]
    fn rejects_other_dimensions() {
        assert!(render(&Polytope::hull(&[qvec(&[0, 0, 1])])).is_err());
    }
}
