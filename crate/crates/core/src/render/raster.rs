//! Escape-time raster rendering of the parameter and dynamical planes with
//! ray-trace overlays.

use num_complex::Complex64;
use rayon::prelude::*;

/// Which plane a raster shows.
#[derive(Clone, Copy, Debug)]
pub enum Plane {
    /// Parameter plane: each pixel is a value of `c`, iterated from 0.
    Parameter,
    /// Dynamical plane of `f_c`: each pixel is a starting point `z`.
    Dynamical(Complex64),
}

#[derive(Clone, Copy, Debug)]
pub struct Viewport {
    pub center: Complex64,
    /// Real-axis width of the view; height follows the pixel aspect.
    pub width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Palette {
    Classic,
    Grayscale,
}

impl Palette {
    pub fn parse(name: &str) -> Option<Palette> {
        match name {
            "classic" => Some(Palette::Classic),
            "grayscale" | "gray" => Some(Palette::Grayscale),
            _ => None,
        }
    }

    fn shade(self, t: f64) -> [u8; 3] {
        let t = t.clamp(0.0, 1.0);
        match self {
            Palette::Grayscale => {
                let v = (t * 255.0) as u8;
                [v, v, v]
            }
            Palette::Classic => {
                // Smooth dark-blue to gold ramp.
                let r = (9.0 * (1.0 - t) * t * t * t * 255.0) as u8;
                let g = (15.0 * (1.0 - t) * (1.0 - t) * t * t * 255.0) as u8;
                let b = (8.5 * (1.0 - t) * (1.0 - t) * (1.0 - t) * t * 255.0) as u8;
                [r, g, b]
            }
        }
    }
}

/// A polyline or point set drawn over the raster, in plane coordinates.
#[derive(Clone, Debug)]
pub struct Overlay {
    pub points: Vec<Complex64>,
    pub color: [u8; 3],
    /// Marker radius in pixels (0 = single pixel).
    pub radius: i64,
}

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub plane: Plane,
    pub viewport: Viewport,
    pub px_width: usize,
    pub px_height: usize,
    pub max_iter: usize,
    pub escape_radius: f64,
    pub palette: Palette,
    pub overlays: Vec<Overlay>,
}

impl RenderSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.px_width == 0 || self.px_height == 0 {
            return Err("resolution must be positive".into());
        }
        if !(self.viewport.width > 0.0) {
            return Err("viewport width must be positive".into());
        }
        Ok(())
    }
}

/// Row-major RGB8 image.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Raster {
    /// Binary PPM (P6) encoding; identical input yields identical bytes.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

fn escape_count(z0: Complex64, c: Complex64, max_iter: usize, radius: f64) -> Option<usize> {
    let r2 = radius * radius;
    let mut z = z0;
    for k in 0..max_iter {
        if z.norm_sqr() > r2 {
            return Some(k);
        }
        z = z * z + c;
        if !z.is_finite() {
            return Some(k + 1);
        }
    }
    None
}

/// Escape-time classification of one plane point.
pub fn classify_point(plane: Plane, p: Complex64, max_iter: usize, radius: f64) -> Option<usize> {
    match plane {
        Plane::Parameter => escape_count(Complex64::new(0.0, 0.0), p, max_iter, radius),
        Plane::Dynamical(c) => escape_count(p, c, max_iter, radius),
    }
}

/// Renders the escape-time raster and draws the overlays. Rows render
/// concurrently; assembly order is fixed, so output is deterministic.
pub fn render_plane(spec: &RenderSpec) -> Result<Raster, String> {
    spec.validate()?;
    let w = spec.px_width;
    let h = spec.px_height;
    let scale = spec.viewport.width / w as f64;
    let origin = spec.viewport.center
        - Complex64::new(
            spec.viewport.width / 2.0,
            -(h as f64) * scale / 2.0,
        );
    // pixel (x, y) -> center + ((x+0.5) dx, flipped y)
    let rows: Vec<Vec<u8>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut row = Vec::with_capacity(w * 3);
            let im = origin.im - (y as f64 + 0.5) * scale;
            for x in 0..w {
                let re = origin.re + (x as f64 + 0.5) * scale;
                let p = Complex64::new(re, im);
                let px = match classify_point(spec.plane, p, spec.max_iter, spec.escape_radius) {
                    None => [0u8, 0, 0],
                    Some(k) => spec.palette.shade(k as f64 / spec.max_iter as f64),
                };
                row.extend_from_slice(&px);
            }
            row
        })
        .collect();
    let mut pixels = Vec::with_capacity(w * h * 3);
    for row in rows {
        pixels.extend_from_slice(&row);
    }
    let mut raster = Raster {
        width: w,
        height: h,
        pixels,
    };
    for overlay in &spec.overlays {
        draw_overlay(&mut raster, spec, overlay);
    }
    Ok(raster)
}

fn draw_overlay(raster: &mut Raster, spec: &RenderSpec, overlay: &Overlay) {
    let w = raster.width as i64;
    let h = raster.height as i64;
    let scale = spec.viewport.width / raster.width as f64;
    for p in &overlay.points {
        let dx = (p.re - spec.viewport.center.re) / scale;
        let dy = (spec.viewport.center.im - p.im) / scale;
        let cx = (dx + raster.width as f64 / 2.0).floor() as i64;
        let cy = (dy + raster.height as f64 / 2.0).floor() as i64;
        for oy in -overlay.radius..=overlay.radius {
            for ox in -overlay.radius..=overlay.radius {
                let (x, y) = (cx + ox, cy + oy);
                // Points outside the viewport are silently clipped.
                if x < 0 || y < 0 || x >= w || y >= h {
                    continue;
                }
                let at = 3 * (y as usize * raster.width + x as usize);
                raster.pixels[at..at + 3].copy_from_slice(&overlay.color);
            }
        }
    }
}
