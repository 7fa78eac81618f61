pub mod bits;
pub mod circuit;
pub mod cli;
pub mod ftarch;
pub mod grid;
pub mod localize;
pub mod noise;
pub mod pauli;
pub mod rng;
pub mod routing;
pub mod stabsim;
