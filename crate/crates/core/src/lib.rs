//! Exact toolkit for toric vector bundles given by Klyachko filtrations.

pub mod bundle;
pub mod error;
pub mod fan;
pub mod polyhedra;
pub mod sections;

pub use error::{Error, IncompatibilityWitness, Result};
