pub mod eval;
pub mod examples;
pub mod optimize;
pub mod regions;
pub mod simulate;
