//! Instance sources: the BoxQCQP generator, a QPLIB-subset reader, and the
//! JSON interchange format.

mod generator;
mod json;
mod qplib;

pub use generator::{derive_seed, generate_boxqcqp, GeneratorConfig};
pub use json::{read_json, write_json};
pub use qplib::parse_qplib_subset;
