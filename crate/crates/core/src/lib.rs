//! p-adic continued fractions for vectors over number fields.

pub mod cfrac;
pub mod field;
pub mod hensel;
pub mod lab;
pub mod matrix;
pub mod preduce;
pub mod rational;
