use std::fmt;

use serde::Serialize;

use bayeslex::belief::BeliefError;
use bayeslex::corpus::CorpusError;
use bayeslex::kb::KbError;
use bayeslex::lexicon::LexiconError;
use bayeslex::narrative::NarrativeError;
use bayeslex::session::SessionError;

/// A domain failure, reported on stderr as `{error_code, message}`.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub error_code: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: &str, message: impl fmt::Display) -> Self {
        CliError {
            error_code: code.to_owned(),
            message: message.to_string(),
        }
    }

    pub fn envelope(&self) -> String {
        serde_json::to_string(self).expect("envelope serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.error_code, self.message)
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        CliError::new(e.code(), &e)
    }
}

impl From<KbError> for CliError {
    fn from(e: KbError) -> Self {
        match e {
            KbError::Io { .. } => CliError::new("file_not_found", e),
            e => SessionError::Kb(e).into(),
        }
    }
}

impl From<BeliefError> for CliError {
    fn from(e: BeliefError) -> Self {
        SessionError::Belief(e).into()
    }
}

impl From<NarrativeError> for CliError {
    fn from(e: NarrativeError) -> Self {
        CliError::new("narrative_error", e)
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        let code = match e {
            LexiconError::Io { .. } => "file_not_found",
            _ => "invalid_lexicon",
        };
        CliError::new(code, e)
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        let code = match e {
            CorpusError::Io { .. } => "file_not_found",
            _ => "invalid_corpus",
        };
        CliError::new(code, e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io_error", e)
    }
}
