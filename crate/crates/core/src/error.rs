use thiserror::Error;

/// Errors raised by the physics layer.
///
/// Kinematic failures are typed so that grid and rate code can tell a
/// point outside phase space apart from a point where the cross section
/// is merely small.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input for {what}: {detail}")]
    InvalidInput { what: &'static str, detail: String },

    #[error("omega1 = {omega1:e} exceeds the kinematic limit omega1_max = {omega1_max:e} (natural units)")]
    KinematicallyForbidden { omega1: f64, omega1_max: f64 },

    #[error("forbidden configuration: {0}")]
    ForbiddenConfiguration(String),

    #[error("inconsistent kinematics: {detail} (residual {residual:e})")]
    InconsistentKinematics { detail: &'static str, residual: f64 },

    #[error("infrared/collinear singularity: {0}")]
    InfraredSingularity(&'static str),

    #[error("photon energy {omega:e} below infrared cutoff {cutoff:e} (natural units)")]
    BelowInfraredCutoff { omega: f64, cutoff: f64 },

    #[error("approximation requires gamma >= {min_gamma}, got {gamma}")]
    ApproximationInvalid { gamma: f64, min_gamma: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("geometry is not collinear: {0}")]
    NotCollinear(String),

    #[error(
        "integration did not converge: estimate {estimate:e}, error bound {error:e} after {evaluations} evaluations"
    )]
    IntegrationFailure {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("detector acceptance outside phase space: {0}")]
    AcceptanceOutsidePhaseSpace(String),

    #[error(
        "envelope violation in cell {cell:?}: density {density:e} exceeds bound {bound:e}; \
         increase the envelope resolution or safety factor"
    )]
    EnvelopeViolation { cell: [usize; 5], density: f64, bound: f64 },

    #[error("sampling region carries no cross section")]
    EmptySamplingRegion,
}

impl Error {
    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidInput {
            what,
            detail: detail.into(),
        }
    }

    /// True for errors meaning "this point lies outside the physical region".
    pub fn is_outside_phase_space(&self) -> bool {
        matches!(
            self,
            Error::KinematicallyForbidden { .. }
                | Error::ForbiddenConfiguration(_)
                | Error::AcceptanceOutsidePhaseSpace(_)
        )
    }

    /// True for errors caused by the infrared structure of the cross section.
    pub fn is_infrared(&self) -> bool {
        matches!(self, Error::InfraredSingularity(_) | Error::BelowInfraredCutoff { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
