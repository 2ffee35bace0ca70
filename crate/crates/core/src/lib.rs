pub mod engine;
pub mod cheat_env;
pub mod length_analysis;
pub mod nn;
pub mod metrics;
pub mod rl;
pub mod cli;
