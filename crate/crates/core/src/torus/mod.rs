//! The Teichmüller space of the once-punctured torus as the Markov trace
//! variety `x² + y² + z² = xyz`, `x, y, z > 2`.

mod point;
mod slope;
mod tree;

pub use point::*;
pub use slope::Slope;
pub use tree::*;
