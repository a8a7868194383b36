//! Finite lattices, their completions and amalgams, and a staged builder for
//! the Fraïssé limits of finite lattices and finite {0,1}-lattices.

pub mod amalgamation;
pub mod bounded;
pub mod builder;
pub mod enumerate;
pub mod error;
pub mod funayama;
pub mod io;
pub mod lab;
pub mod lattice;
pub mod variety;

pub use error::{Error, Result};
pub use lattice::*;
