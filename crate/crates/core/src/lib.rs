pub mod expr;
pub mod jet;
pub mod numerics;
pub mod problem;
pub mod reduction;
