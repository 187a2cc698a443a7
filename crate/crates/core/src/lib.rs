//! Behavioral memristor model and high-order associative learning circuits.
//!
//! * [`device`]: VTEAM state dynamics, resistance map, Euler integration.
//! * [`fit`]: parameter extraction from I-V traces with projected BFGS.
//! * [`circuit`]: truth-table modulation, synaptic stages, N-order chains.
//! * [`vision`]: 20x20 memristor array for image association.
//! * [`config`]: the declarative experiment file format.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod config;
pub mod device;
mod error;
pub mod fit;
pub mod vision;

pub use circuit::{run_chain, ChainConfig, SimTrace, StageConfig, StimulusSchedule};
pub use config::{parse_config, ExperimentConfig};
pub use device::{DeviceParams, DeviceState, Memristor};
pub use error::{Error, Result};
pub use fit::{FitConfig, FitResult, IvTrace};
