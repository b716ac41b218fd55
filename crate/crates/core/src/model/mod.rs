//! Uplink frame generation for media-modulated devices.

pub mod config;
pub mod frame;
pub mod modulation;

pub use config::{ConfigError, SystemConfig};
pub use frame::{
    complex_gaussian, complex_gaussian_matrix, generate_activity, generate_channel, generate_frame,
    ChannelMatrix, Frame, GroundTruth, Observation, SlotSymbol, StructureError,
};
pub use modulation::{
    bits_to_word, demodulate, demodulate_word, modulate, modulate_word, split_word, word_to_bits,
    Constellation, ModulationError,
};
