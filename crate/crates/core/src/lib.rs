//! Scoring, key-frame selection, depth-map evaluation and depth-driven
//! polyp localization for endoscopic video sequences.

pub mod depth;
pub mod error;
pub mod features;
pub mod imgproc;
pub mod keyframes;

pub use error::{Error, Result};
