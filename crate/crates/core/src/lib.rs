//! Auxiliary sentences for implicit aspects in aspect-based sentiment
//! analysis.
//!
//! The crate turns review corpora into sentence pairs for a pair
//! classifier: topic-model seed words per aspect, skip-gram word vectors,
//! dependency-rule opinion modifiers and the assembled auxiliary sentence.
//! It also scores classifier output with the usual ABSA and TABSA metrics.

pub mod auxgen;
pub mod conllu;
pub mod corpus;
pub mod embeddings;
pub mod eval;
pub mod jsonl;
pub mod llda;
pub mod scalar;
pub mod syntax;
pub mod synth;

pub use auxgen::{AuxGenConfig, AuxiliarySentence, PairRecord};
pub use corpus::{AspectCategory, ClassificationUnit, Dataset, Review, SentimentLabel, Split, Task, UnitKey};
pub use eval::metrics::Prediction;
pub use eval::pipeline::{PipelineConfig, PipelineError};
pub use eval::report::MetricsReport;
pub use llda::{LldaConfig, LldaModel, SeedList};
pub use scalar::{Rational, Real, Scalar};

/// Word vectors as trained and stored by the tools.
pub type Embeddings = embeddings::EmbeddingMatrix<f32>;
/// Double-precision vectors for gradient checks and analysis.
pub type Embeddings64 = embeddings::EmbeddingMatrix<f64>;
/// Surrogate classifier at training precision.
pub type Surrogate = eval::surrogate::SurrogateModel<f64>;
