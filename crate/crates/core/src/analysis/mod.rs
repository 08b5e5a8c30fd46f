//! Point-distribution metrics and blue-noise spectral statistics.

mod scores;
mod spectral;

pub use scores::{distance_score, distance_score_filtered, increment_report, Scores, ScoreReport};
pub use spectral::{periodogram, radial_stats, Periodogram, SpectralStats, ANISOTROPY_FLOOR_DB};
