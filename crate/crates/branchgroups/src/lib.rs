//! Computational tools for groups acting on rooted trees: automorphism
//! calculus, spinal and GGS constructions, word and conjugacy problems,
//! finite level quotients, Schreier graphs and their spectra, and
//! endomorphic presentations.

pub mod conjugacy;
pub mod decision;
pub mod group;
pub mod perm;
pub mod presentations;
pub mod quotients;
pub mod schreier;
pub mod tree;
pub mod words;
