//! Eye-tracking assessment pipeline for head-mounted displays: session
//! recording format, gaze geometry, protocol analysis, a synthetic gazer,
//! questionnaire scoring and HTML reporting.

pub mod canonical;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod pathsys;
pub mod protocols;
pub mod questionnaire;
pub mod report;
pub mod script;
pub mod session;
pub mod simulator;

pub use error::{Error, Result};
