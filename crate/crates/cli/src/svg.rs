//! SVG 1.1 rendering. Coordinates are 12-digit decimal approximations of
//! the exact data and are for display only.

use std::fmt::Write;

use accessarc::geometry::{Disk, Rect};
use accessarc::{Point, Poly, Rational, Scalar};

fn num(r: &Rational) -> String {
    format!("{:.12}", r.to_f64_lossy())
}

pub struct Svg {
    body: String,
    timestamp: bool,
}

impl Svg {
    pub fn new(reproducible: bool) -> Self {
        Svg {
            body: String::new(),
            timestamp: !reproducible,
        }
    }

    pub fn group(&mut self, id: &str) {
        let _ = writeln!(self.body, "<g id=\"{id}\">");
    }

    pub fn end_group(&mut self) {
        self.body.push_str("</g>\n");
    }

    pub fn disk(&mut self, d: &Disk<Rational>, style: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {style}/>",
            num(&d.center.x),
            num(&d.center.y),
            num(&d.radius)
        );
    }

    pub fn rect(&mut self, r: &Rect<Rational>, style: &str) {
        let _ = writeln!(
            self.body,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {style}/>",
            num(&r.xmin),
            num(&r.ymin),
            num(&r.width()),
            num(&r.height())
        );
    }

    pub fn poly(&mut self, p: &Poly, style: &str) {
        let pts: Vec<String> = p.vertices().iter().map(|v| format!("{},{}", num(&v.x), num(&v.y))).collect();
        let _ = writeln!(self.body, "<polyline points=\"{}\" fill=\"none\" {style}/>", pts.join(" "));
    }

    pub fn point(&mut self, p: &Point, style: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"0.012\" {style}/>",
            num(&p.x),
            num(&p.y)
        );
    }

    pub fn finish(self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"800\" viewBox=\"-1.25 -1.25 2.5 2.5\">\n",
        );
        out.push_str("<desc>Coordinates are decimal approximations for display; exact data is in the JSON output.</desc>\n");
        if self.timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(out, "<metadata>generated at unix time {secs}</metadata>");
        }
        out.push_str("<g transform=\"scale(1,-1)\" stroke-width=\"0.006\">\n");
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}
