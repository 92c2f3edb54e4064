//! Descriptor pre-training for directed message-passing networks on
//! molecular graphs, with the baselines, statistics and embedding tools used
//! to evaluate them.
//!
//! The pipeline runs SMILES through [`molgraph`] into [`descriptors`], which
//! supply regression targets for pre-training a [`dmpnn`] network with
//! [`train`]. The network is then fine-tuned on small labeled tasks and
//! compared with [`baselines`] under [`stats`]. [`embed`] sorts chemical
//! series and projects fingerprints with t-SNE. [`tensor`] is the
//! reverse-mode autodiff engine underneath, and [`synth`] generates seeded
//! toy corpora.

pub mod baselines;
pub mod cli;
pub mod descriptors;
pub mod dmpnn;
pub mod embed;
pub mod molgraph;
pub mod stats;
pub mod synth;
pub mod tensor;
pub mod train;
