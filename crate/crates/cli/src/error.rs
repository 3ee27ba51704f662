use rcs_bounds::costmodel::CostError;
use rcs_bounds::fidmodel::FidError;
use rcs_bounds::frontier::FrontierError;
use rcs_bounds::sfa::SfaError;
use rcs_bounds::statevec::SimError;
use rcs_bounds::xeb::XebError;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Config,
    Resource,
    Numeric,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::Config => 2,
            Kind::Resource => 3,
            Kind::Numeric => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        CliError { kind: Kind::Config, error: error.into() }
    }

    pub fn resource(error: impl Into<anyhow::Error>) -> Self {
        CliError { kind: Kind::Resource, error: error.into() }
    }

    pub fn numeric(error: impl Into<anyhow::Error>) -> Self {
        CliError { kind: Kind::Numeric, error: error.into() }
    }

    pub fn context(self, what: impl std::fmt::Display + Send + Sync + 'static) -> Self {
        CliError { kind: self.kind, error: self.error.context(what) }
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::config(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::config(e)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::TooManyQubits { .. } => CliError::resource(e),
            _ => CliError::config(e),
        }
    }
}

impl From<SfaError> for CliError {
    fn from(e: SfaError) -> Self {
        match e {
            SfaError::TooManyPaths(_) => CliError::resource(e),
            SfaError::Sim(inner) => CliError::from(inner),
            SfaError::NonUnitary(_) => CliError::numeric(e),
            _ => CliError::config(e),
        }
    }
}

impl From<FidError> for CliError {
    fn from(e: FidError) -> Self {
        match e {
            FidError::RankDeficient | FidError::TooFewRecords { .. } | FidError::DegenerateYears => CliError::numeric(e),
            _ => CliError::config(e),
        }
    }
}

impl From<XebError> for CliError {
    fn from(e: XebError) -> Self {
        match e {
            XebError::Csv(_) | XebError::BadTargetFidelity(_) | XebError::BadMixture(_) | XebError::BadQubitCount(_) => {
                CliError::config(e)
            }
            _ => CliError::numeric(e),
        }
    }
}

impl From<CostError> for CliError {
    fn from(e: CostError) -> Self {
        match e {
            CostError::DegenerateQuantumCost(_) | CostError::NonPositiveLambda(_) => CliError::numeric(e),
            _ => CliError::config(e),
        }
    }
}

impl From<FrontierError> for CliError {
    fn from(e: FrontierError) -> Self {
        match e {
            FrontierError::NoCrossing { .. } => CliError::numeric(e),
            FrontierError::Cost(inner) => CliError::from(inner),
            FrontierError::Fid(inner) => CliError::from(inner),
            _ => CliError::config(e),
        }
    }
}
