//! Hyperdimensional classification of acute mountain sickness from tabular
//! physiological measurements.
//!
//! The pipeline: load and impute the dataset, score features by k-nearest
//! neighbor mutual information, encode selected features into hypervectors
//! (bipolar projection or binary thermometer/position binding), accumulate
//! one class vector per label in a single pass, and classify queries by
//! similarity.

pub mod classifier;
pub mod data;
pub mod encoder;
pub mod error;
pub mod experiment;
pub mod hv;
pub mod randomness;

pub use classifier::{EvalReport, Model, Prediction};
pub use data::{Dataset, LabelScheme, MiScores, NormStats, SelectionPolicy, SplitMode, SplitSpec};
pub use encoder::{EncoderConfig, EncoderVariant};
pub use error::{Error, ErrorClass, Result};
pub use experiment::{ExperimentConfig, Prepared};
pub use hv::{bundle, AnyHv, BinaryHV, BipolarHV, ScalarAccumulator};
pub use randomness::{generate_position_hvs, SourceKind};
