pub mod numerics;
pub mod json;
pub mod polytope;
pub mod variety;
pub mod cones;
pub mod witness;
