use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("not a rotation (orthogonality error {ortho_err:.3e}, det error {det_err:.3e})")]
    NotARotation { ortho_err: f64, det_err: f64 },
}

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("channel is not completely positive (Choi eigenvalue {0:.3e})")]
    NotCompletelyPositive(f64),
    #[error("not D2-covariant within tolerance {tol:.3e} (residual translation {residual:.3e})")]
    NotD2Covariant { tol: f64, residual: f64 },
    #[error("invalid effect: t = {t}, |s| = {s_norm}")]
    InvalidEffect { t: f64, s_norm: f64 },
    #[error("invalid Bloch vector: |v| = {0}")]
    InvalidBlochVector(f64),
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point ({x}, {y}) outside the correlation square")]
    OutsideSquare { x: f64, y: f64 },
    #[error("equivalence class undefined: zero denominator (c3 = {c3}, d3 = {d3})")]
    UndefinedClass { c3: f64, d3: f64 },
    #[error("channel is not physical")]
    UnphysicalChannel,
    #[error("empty region")]
    EmptyRegion,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("degenerate probe denominator at gamma = {0}")]
    DegenerateProbe(f64),
    #[error("probe weight omega = {0} outside [0, 1]")]
    ProbeWeightOutOfRange(f64),
    #[error("setting {setting}: probability {p} outside [0, 1]")]
    UnphysicalProbability { setting: usize, p: f64 },
    #[error("shots must be >= 1")]
    NoShots,
    #[error("grid needs at least 2 angles, got {0}")]
    GridTooSmall(usize),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("invalid data: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("infeasible problem: constraint violation {0:.3e} at best point")]
    Infeasible(f64),
    #[error("all {0} restarts were infeasible")]
    AllRestartsInfeasible(usize),
    #[error("no usable settings in the frequency table")]
    NoData,
    #[error("Choi operator not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),
}

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("no data points supplied")]
    NoData,
    #[error("hypothesis is not physical")]
    UnphysicalHypothesis,
    #[error("hypothesis not validated at k = {0}")]
    NotValidated(f64),
    #[error("no feasible channel contains all points; witnesses: {0:?}")]
    InfeasibleData(Vec<(f64, f64)>),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
