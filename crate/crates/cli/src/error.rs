use thiserror::Error;

/// Pipeline stages, each with its own exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    GenSet,
    BuildWeight,
    Conditions,
    LowerBound,
    Modify,
    MinSigma,
    Certify,
    Submean,
    Identities,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::GenSet => "gen-set",
            Stage::BuildWeight => "build-weight",
            Stage::Conditions => "conditions",
            Stage::LowerBound => "lower-bound",
            Stage::Modify => "modify-weight",
            Stage::MinSigma => "min-sigma",
            Stage::Certify => "certify",
            Stage::Submean => "submean",
            Stage::Identities => "verify-identities",
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Stage::GenSet => 10,
            Stage::BuildWeight => 11,
            Stage::Conditions => 12,
            Stage::LowerBound => 13,
            Stage::Modify => 14,
            Stage::MinSigma => 15,
            Stage::Certify => 16,
            Stage::Submean => 17,
            Stage::Identities => 18,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("stale artifact {file}: recorded {recorded}, found {found}")]
    Stale { file: String, recorded: String, found: String },
    #[error("stage {}: {msg}", stage.name())]
    Stage { stage: Stage, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Stale { .. } => 3,
            CliError::Stage { stage, .. } => stage.exit_code(),
        }
    }

    pub fn stage(stage: Stage) -> impl Fn(lineporous::Error) -> CliError {
        move |e| CliError::Stage { stage, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
