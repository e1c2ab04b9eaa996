//! Analytical twist model for a temperature-switched, fiber-reinforced
//! soft pneumatic actuator, and the motion-capture analyses used to
//! characterize it.

pub mod actuator;
pub mod config;
pub mod mocap;
pub mod numerics;
pub mod synthetic;
