//! Core of the interactive robot programming workbench: a simulated
//! tabletop, keyframe demonstrations, action inference from before/after
//! observations, PDDL text, an FF-style planner and plan execution.

pub mod logic;
pub mod types;
pub mod world;
pub mod demo;
pub mod inference;
pub mod pddl;
pub mod domain;
pub mod planner;
pub mod execution;
