pub mod rng;
pub mod words;
pub mod tower;
pub mod cycles;
pub mod spectra;
pub mod dynamics;
pub mod limitfield;
pub mod harness;
