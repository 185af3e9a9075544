//! Data engineering and evaluation toolkit for adapting LLMs to low-resource
//! machine translation.
//!
//! The crate covers the full offline pipeline:
//!
//! * [`corpus`]: monolingual / parallel record types, ingestion, statistics and validation.
//! * [`tokenize`]: pluggable token counters, a reference BPE counter and fertility.
//! * [`sampling`]: temperature-based language balancing with exact apportionment.
//! * [`cpt`]: continued-pretraining corpora (all-mono, concat, separate) with parallel-ratio control.
//! * [`sft`]: Alpaca-format instruction datasets, template sampling, mixtures and epochs.
//! * [`xqa`]: synthetic cross-lingual QA generated through an external endpoint.
//! * [`eval`]: chrF++ and multilingual bootstrap confidence intervals.
//! * [`cli`]: the batch front end used by the `lowres-mt` binary.
//!
//! Every builder is deterministic given its inputs, configuration and seed.

pub mod cli;
pub mod corpus;
pub mod eval;
pub mod io;
pub mod manifest;
pub mod sampling;
pub mod seed;
pub mod cpt;
pub mod sft;
pub mod tokenize;
pub mod xqa;

pub use corpus::{CorpusStats, LanguageRegistry, LanguageTag, MonoRecord, ParallelRecord};
pub use cpt::{CptSequence, MixStrategy, MixerConfig};
pub use eval::{ChrfParams, EvalReport, EvalSet};
pub use manifest::DatasetManifest;
pub use sampling::{LanguageAllocation, SamplingConfig, SizeUnit};
pub use sft::{MixtureSpec, PromptTemplate, SftRecord, Task};
pub use tokenize::{BpeModel, TokenCounter, WhitespaceCounter};
pub use xqa::{GenerationClient, XqaRecord};
