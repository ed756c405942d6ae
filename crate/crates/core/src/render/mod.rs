//! Figure emission: escape-time rasters and chord-diagram SVGs.

mod chords;
mod raster;

pub use chords::{render_chords, ChordClass, ChordDiagram};
pub use raster::{
    classify_point, render_plane, Overlay, Palette, Plane, Raster, RenderSpec, Viewport,
};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive};

/// Angle value in turns as f64, safe for huge exact denominators.
pub(crate) fn rational_turns(r: &BigRational) -> f64 {
    let scale = BigInt::one() << 53;
    let scaled = (r * BigRational::from(scale)).floor().to_integer();
    scaled.to_f64().unwrap_or(f64::NAN) / (1u64 << 53) as f64
}
