//! Deterministic randomness: pseudo-random (LFSR), quasi-random (Sobol), and
//! structured (Hadamard) sources, the MISR position generator, and
//! orthogonality diagnostics.

pub mod hadamard;
pub mod lfsr;
pub mod misr;
pub mod ortho;
pub mod sobol;
pub mod source;

pub use hadamard::{hadamard_row, sylvester_matrix};
pub use lfsr::{LfsrState, LfsrUniform};
pub use misr::{MisrGenerator, SeedProvenance};
pub use ortho::{orthogonality_histogram, pairwise_hamming, OrthogonalityHistogram};
pub use sobol::{sobol_point, SobolSource, SobolTable};
pub use source::{generate_position_hvs, source_stream, SourceKind, StreamRole};
