//! Error types, one enum per module plus a crate-wide wrapper.
//!
//! Every variant has a stable machine-readable name (`name()`), used by the
//! CLI when it reports failures.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaurentError {
    #[error("series centers differ: {left} vs {right}")]
    CenterMismatch {
        left: num_complex::Complex64,
        right: num_complex::Complex64,
    },
    #[error("invalid degree window [{min}, {max}]")]
    InvalidWindow { min: i32, max: i32 },
}

impl LaurentError {
    pub fn name(&self) -> &'static str {
        match self {
            LaurentError::CenterMismatch { .. } => "CenterMismatch",
            LaurentError::InvalidWindow { .. } => "InvalidWindow",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LocalError {
    #[error("potential has a pole of order {order} > 2 at the center")]
    PoleTooStrong { order: i32 },
    #[error("claimed r = {r} but the y^-2 coefficient is {found}")]
    ClaimedRMismatch { r: u32, found: num_complex::Complex64 },
    #[error("indicial exponents are not of the form r+1, -r (y^-2 coefficient {c_minus2})")]
    NonIntegerExponents { c_minus2: num_complex::Complex64 },
    #[error("potential has a first-order pole (y^-1 coefficient {value})")]
    FirstOrderPolePresent { value: num_complex::Complex64 },
    #[error("truncation too short: need degree {needed}, have {available}")]
    TruncationTooShort { needed: i32, available: i32 },
    #[error("operator order {order} is not supported (only order 2)")]
    UnsupportedOrder { order: u32 },
}

impl LocalError {
    pub fn name(&self) -> &'static str {
        match self {
            LocalError::PoleTooStrong { .. } => "PoleTooStrong",
            LocalError::ClaimedRMismatch { .. } => "ClaimedRMismatch",
            LocalError::NonIntegerExponents { .. } => "NonIntegerExponents",
            LocalError::FirstOrderPolePresent { .. } => "FirstOrderPolePresent",
            LocalError::TruncationTooShort { .. } => "TruncationTooShort",
            LocalError::UnsupportedOrder { .. } => "UnsupportedOrder",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("invalid potential: {0}")]
    InvalidPotential(&'static str),
    #[error("evaluation point {x} is within {distance:e} of a pole")]
    PoleProximity { x: num_complex::Complex64, distance: f64 },
    #[error("{center} is not a pole of the potential")]
    NotAPole { center: num_complex::Complex64 },
    #[error("another pole lies within the sampling circle around {center}")]
    RadiusCollision { center: num_complex::Complex64 },
    #[error("grid too coarse near x = {x}: suspected missed zero of tau")]
    GridTooCoarse { x: f64 },
    #[error("pole trajectory lost near t = {t}, x = {x}; refine the time grid")]
    TrackingLost { t: f64, x: f64 },
    #[error("operation requires a soliton (tau function) potential")]
    NotSoliton,
    #[error(transparent)]
    Weierstrass(#[from] WeierstrassError),
    #[error(transparent)]
    Local(#[from] LocalError),
}

impl PotentialError {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialError::InvalidPotential(_) => "InvalidPotential",
            PotentialError::PoleProximity { .. } => "PoleProximity",
            PotentialError::NotAPole { .. } => "NotAPole",
            PotentialError::RadiusCollision { .. } => "RadiusCollision",
            PotentialError::GridTooCoarse { .. } => "GridTooCoarse",
            PotentialError::TrackingLost { .. } => "TrackingLost",
            PotentialError::NotSoliton => "NotSoliton",
            PotentialError::Weierstrass(e) => e.name(),
            PotentialError::Local(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("invalid space: {0}")]
    InvalidSpace(&'static str),
    #[error("element has local data for {found} poles, space has {expected}")]
    MissingLocalData { expected: usize, found: usize },
    #[error("element is not a member of the space: {0}")]
    MembershipViolation(alloc::string::String),
    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    QuadratureFailure { tol: f64, estimate: f64 },
    #[error("potential is not s-meromorphic at pole {pole_index}")]
    NonSMeromorphicPotential { pole_index: usize },
    #[error("potential and space disagree at x = {position}: {reason}")]
    PotentialSpaceMismatch { position: f64, reason: &'static str },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

impl SpaceError {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceError::InvalidSpace(_) => "InvalidSpace",
            SpaceError::MissingLocalData { .. } => "MissingLocalData",
            SpaceError::MembershipViolation(_) => "MembershipViolation",
            SpaceError::QuadratureFailure { .. } => "QuadratureFailure",
            SpaceError::NonSMeromorphicPotential { .. } => "NonSMeromorphicPotential",
            SpaceError::PotentialSpaceMismatch { .. } => "PotentialSpaceMismatch",
            SpaceError::Laurent(e) => e.name(),
            SpaceError::Potential(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierstrassError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(&'static str),
    #[error("{z} is a lattice point")]
    LatticePoint { z: num_complex::Complex64 },
}

impl WeierstrassError {
    pub fn name(&self) -> &'static str {
        match self {
            WeierstrassError::InvalidLattice(_) => "InvalidLattice",
            WeierstrassError::LatticePoint { .. } => "LatticePoint",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Genus1Error {
    #[error("no sign changes of Im p found; the quasimomentum convention is inconsistent")]
    DegenerateLevelSet,
    #[error("contour resolution {resolution} is below the minimum 64")]
    ResolutionTooLow { resolution: usize },
    #[error("quasimomentum convention check failed: e^(ipT) differs from the Bloch multiplier by {defect:e}")]
    ConventionMismatch { defect: f64 },
    #[error("|kappa| = {modulus} is not 1")]
    NotUnimodular { modulus: f64 },
    #[error("Bloch norm {value:e} at alpha = {alpha} is below the noise floor {floor:e}")]
    NormTooSmall {
        value: f64,
        alpha: num_complex::Complex64,
        floor: f64,
    },
    #[error(transparent)]
    Weierstrass(#[from] WeierstrassError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

impl Genus1Error {
    pub fn name(&self) -> &'static str {
        match self {
            Genus1Error::DegenerateLevelSet => "DegenerateLevelSet",
            Genus1Error::ResolutionTooLow { .. } => "ResolutionTooLow",
            Genus1Error::ConventionMismatch { .. } => "ConventionMismatch",
            Genus1Error::NotUnimodular { .. } => "NotUnimodular",
            Genus1Error::NormTooSmall { .. } => "NormTooSmall",
            Genus1Error::Weierstrass(e) => e.name(),
            Genus1Error::Space(e) => e.name(),
        }
    }
}

/// Crate-wide error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Weierstrass(#[from] WeierstrassError),
    #[error(transparent)]
    Genus1(#[from] Genus1Error),
}

impl Error {
    /// Machine-readable name of the innermost error.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Laurent(e) => e.name(),
            Error::Local(e) => e.name(),
            Error::Potential(e) => e.name(),
            Error::Space(e) => e.name(),
            Error::Weierstrass(e) => e.name(),
            Error::Genus1(e) => e.name(),
        }
    }
}
