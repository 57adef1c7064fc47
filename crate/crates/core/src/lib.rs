pub mod designs;
pub mod orientation;
pub mod tournament;
pub mod sampler;
pub mod counting;
pub mod bounds;
pub mod cli;
pub mod report;
