pub mod audio;
pub mod corpus;
pub mod features;
pub mod network;
pub mod parallel;
pub mod rng;
