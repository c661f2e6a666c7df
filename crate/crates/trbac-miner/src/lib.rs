pub mod datagen;
pub mod metrics;
pub mod policy;
pub mod temporal;
