use std::fmt::Write;

use num_complex::Complex64;

use crate::{BBox, LevelCurve};

/// Static SVG 1.1 figure with point clouds and polylines in the complex plane.
pub struct Figure {
    bbox: BBox,
    width: f64,
    height: f64,
    body: String,
}

impl Figure {
    pub fn new(bbox: BBox, width_px: f64) -> Self {
        let height = width_px * (bbox.y1 - bbox.y0) / (bbox.x1 - bbox.x0);
        Self { bbox, width: width_px, height, body: String::new() }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let x = (z.re - self.bbox.x0) / (self.bbox.x1 - self.bbox.x0) * self.width;
        let y = (self.bbox.y1 - z.im) / (self.bbox.y1 - self.bbox.y0) * self.height;
        (x, y)
    }

    pub fn points(&mut self, pts: &[Complex64], radius: f64, colour: &str) -> &mut Self {
        for &z in pts {
            let (x, y) = self.map(z);
            let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius}" fill="{colour}"/>"#);
        }
        self
    }

    pub fn polyline(&mut self, pts: &[Complex64], closed: bool, colour: &str) -> &mut Self {
        let mut d = String::new();
        for (k, &z) in pts.iter().enumerate() {
            let (x, y) = self.map(z);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if k == 0 { "M" } else { "L" });
        }
        if closed {
            d.push('Z');
        }
        let _ = writeln!(self.body, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1"/>"#, d.trim_end());
        self
    }

    pub fn curve(&mut self, c: &LevelCurve, colour: &str) -> &mut Self {
        for p in &c.polylines {
            self.polyline(&p.points, p.closed, colour);
        }
        self
    }

    pub fn render(&self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.body
        )
    }
}
