//! Proof kernel, normalizer and metatheory auditor for intuitionistic
//! bipredicational natural deduction with qualified definiteness.

pub mod audit;
pub mod base;
pub mod build;
pub mod cli;
pub mod corpus;
pub mod defs;
pub mod derivation;
pub mod kernel;
pub mod normalize;
pub mod parse;
pub mod random;
pub mod script;
pub mod search;
pub mod syntax;
