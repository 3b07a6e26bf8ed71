//! Volume of diagonal slices by lattice dilation and by Monte Carlo.

mod chart;
mod lattice;
mod mc;

pub use chart::{FreeCoordinateChart, SymmetricMatrix};
pub use lattice::{
    extrapolate, lattice_volume, lattice_volume_sequence, DilationSchedule, Extrapolated, Extrapolation,
    LatticeVolume, VolumeEntry, VolumeSequence,
};
pub use mc::{
    mc_volume, mc_volume_ratio, MCConfig, McEstimate, McRatio, LATTICE_NORMALIZATION,
    STREAM_SAMPLES,
};
