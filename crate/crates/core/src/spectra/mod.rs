//! Spectral radii, reduced C*-norm estimates, Neumann inversion and the
//! ratio sequences behind the equality `ν(φ) = ‖φ‖`.

mod cstar;
mod derivation;
mod neumann;
mod pytlik;
mod radius;

pub use cstar::{
    cstar_compression, cstar_compression_with, cstar_fourier, cstar_upper_bound, BallOperator,
    CompressionOptions, CstarEstimate, CstarMethod,
};
pub use derivation::{derivation_check, DerivationReport};
pub use neumann::{
    neumann_inverse, split_unit, InversionCertificate, NeumannOptions, TailRatio, DECAY_THRESHOLD,
};
pub use pytlik::{
    pytlik_ratio, pytlik_ratio_exact, pytlik_split_bound, PytlikReport, SplitBound,
    SELF_ADJOINT_TOL,
};
pub use radius::{spectral_radius, spectral_radius_exact, Schedule, SpectralReport};

#[cfg(test)]
mod tests;
