pub mod plan;
pub mod experiment;
pub mod svg;
