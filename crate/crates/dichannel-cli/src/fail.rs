//! Failure classification driving the process exit code: 2 for input
//! validation, 3 for infeasibility, 4 for numeric failure.

use dichannel::error::{
    ChannelError, EstimateError, FormatError, GeometryError, ProtocolError, SimError,
};

#[derive(Debug)]
pub enum Failure {
    /// Bad inputs or files (exit 2).
    Input(String),
    /// No hypothesis is compatible with the data (exit 3).
    Infeasible(String),
    /// Numeric breakdown (exit 4).
    Numeric(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Numeric(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Infeasible(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ChannelError> for Failure {
    fn from(e: ChannelError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::UnphysicalChannel | GeometryError::OutsideSquare { .. } => {
                Failure::Input(e.to_string())
            }
            GeometryError::UndefinedClass { .. } | GeometryError::EmptyRegion => {
                Failure::Numeric(e.to_string())
            }
        }
    }
}

impl From<EstimateError> for Failure {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::NoData => Failure::Input(e.to_string()),
            EstimateError::Infeasible(_)
            | EstimateError::AllRestartsInfeasible(_)
            | EstimateError::NotPsd(_) => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::NoData
            | ProtocolError::UnphysicalHypothesis
            | ProtocolError::NotValidated(_) => Failure::Input(e.to_string()),
            ProtocolError::InfeasibleData(_) => Failure::Infeasible(e.to_string()),
            ProtocolError::Geometry(g) => g.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}
