//! Deterministic raster primitives: color conversion, filtering, edges,
//! components and morphology. Everything else in the crate builds on these.
//!
//! All operations are pure functions of their inputs and accumulate in
//! fixed raster order, so results do not depend on thread count.

mod canny;
mod filter;
mod raster;
mod regions;

pub use canny::{canny, CannyParams, CannyThresholds};
pub use filter::{
    gaussian_smooth, gradient_magnitude, normalize_to_u8, otsu_threshold, resize_area,
    rgb_to_coc, rgb_to_coc_with, sobel_gradients, to_grayscale, COC_BASIS,
};
pub use raster::{BinaryMask, CocImage, Frame, LabelMap, Plane};
pub use regions::{connected_components, fill_holes, morph_close, Connectivity};
