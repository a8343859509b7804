//! Free-boundary machinery on solved pairs: the two-phase transform
//! `v = c − u`, contour extraction and point classification on `{u = c}`,
//! the Weiss energy and its monotone surrogate, circle amplitudes, and
//! blow-up rescalings with degree-2 fits.

mod blowup;
mod contour;
mod twophase;
mod weiss;

pub use blowup::{
    blowup, fit_degree2, unit_ball_mask, BlowupLevel, BlowupSequence, Degree2Fit, RegimeLabel,
    DEFAULT_UNIT_BALL_NODES,
};
pub use contour::{classify_points, extract_contour, Classified, Contour, ContourVertex, Polyline};
pub use twophase::{
    synthetic_two_phase, to_two_phase, to_two_phase_with, Provenance, TwoPhaseField,
    DEFAULT_BAND_CELLS,
};
pub use weiss::{
    error_term, sphere_average, weiss_energy, weiss_profile, DMode, WeissEvaluator, WeissMode,
    WeissProfile, WeissSample, DEFAULT_GAMMA, DEFAULT_TOL_W,
};
