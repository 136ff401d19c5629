use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("argument {value} outside domain [{min}, {max}]")]
    OutOfDomain { value: f64, min: f64, max: f64 },
    #[error("sphere area must be positive, got {0}")]
    NonPositiveArea(f64),
    #[error("zero-length link between transmitter and receiver")]
    ZeroDistance,
}

#[derive(Debug, Error)]
pub enum TessellationError {
    #[error("cell scale {rho} infeasible on sphere of area {area}: {reason}")]
    InfeasibleRho {
        rho: f64,
        area: f64,
        reason: &'static str,
    },
    #[error("fewer than {min} generators fit at separation 2*rho = {sep} (got {got})")]
    TooFewGenerators { min: usize, sep: f64, got: usize },
    #[error("convex hull construction failed: {0}")]
    Hull(&'static str),
}

#[derive(Debug, Error)]
pub enum RoutingError {
    #[error("relay cell {cell} on route {src}->{dst} holds no nodes")]
    EmptyRelayCell { cell: usize, src: usize, dst: usize },
    #[error("source and destination must differ (node {0})")]
    SelfRoute(usize),
    #[error("random-walk route {src}->{dst} did not terminate within {limit} steps")]
    WalkDidNotTerminate { src: usize, dst: usize, limit: usize },
}

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("path loss exponent alpha must exceed 2, got {0}")]
    AlphaTooSmall(f64),
    #[error("node count {0} too small (need n >= 3)")]
    NTooSmall(f64),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("parameter {name} = {value} violates {constraint}")]
    Domain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Tessellation(#[from] TessellationError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("regression needs at least {need} grid points, got {got}")]
    DegenerateGrid { need: usize, got: usize },
}
