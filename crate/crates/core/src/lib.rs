pub mod action;
pub mod auslander;
pub mod cli;
pub mod format;
pub mod linalg;
pub mod ncpoly;
pub mod rewrite;
pub mod sample;
pub mod scalars;
pub mod zoo;
