pub mod batch;
pub mod cli;
pub mod comm;
pub mod config;
pub mod controllers;
pub mod geometry;
pub mod optim;
pub mod physics;
pub mod recorder;
pub mod runtime;
pub mod world;
