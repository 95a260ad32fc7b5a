pub mod barrier;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod newton;
pub mod solver;
