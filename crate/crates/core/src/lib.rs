//! Coupled heat-exchanger-network and operating-point optimisation.

pub mod area;
pub mod case;
pub mod cli;
pub mod encode;
pub mod evaluate;
pub mod hen;
pub mod objectives;
pub mod pareto;
pub mod problem;
pub mod pwl;
pub mod report;
