//! Quaternion Fourier and quaternion boostlet transforms of space-time
//! fields, plus the uncertainty checks and experiment harness built on them.

pub mod boostlet;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod field;
pub mod io;
pub mod qbt;
pub mod qfourier;
pub mod quat;
pub mod signals;
pub mod sparsity;
pub mod uncertainty;

pub use boostlet::{BoostletSystem, Cone, SystemConfig};
pub use error::{QbtError, Result};
pub use field::{field_inner, field_norm_sq, Grid, QField2D};
pub use qbt::{forward_qbt, inverse_qbt, plancherel_ratio, transform_energy, QbtCoefficients, QbtEngine};
pub use qfourier::{qft_forward, qft_inverse, QSpectrum2D};
pub use quat::Quaternion;
pub use signals::{make_gaussian_packet, make_two_packet_signal, PacketSpec, TwoPacketConfig};
pub use uncertainty::InequalityReport;
