//! Downlink user scheduling for extremely large antenna arrays whose users sit
//! in the radiative near field.
//!
//! The crate models a uniform linear array with spherical-wavefront (and,
//! for comparison, planar-wavefront) channels, computes zero-forcing and
//! matched-filter precoders with waterfilled powers, and schedules users by
//! their interference-inflated equivalent distance. A Monte-Carlo harness
//! compares the schedulers over SNR and array size.

pub mod array;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod nearfield;
pub mod power;
pub mod precoding;
pub mod scheduling;

pub use array::{ArrayConfig, ChannelMatrix, ChannelModel, UserPosition};
pub use error::{Error, Result};
pub use scheduling::{schedule, Method, ScheduleInput, ScheduleResult, StoppingRule};
