//! JSON Lines persistence: one append-only file per session.
//!
//! The first line is a `created` record naming the class; every later line is
//! one event. A session is loaded by replaying its file.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Action, Consultant, Event, Session, SessionError, SessionId};
use crate::belief::Polarity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Created,
    Asserted,
    Undone,
}

/// One line of a session log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRecord {
    pub kind: RecordKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarity: Option<Polarity>,
    pub timestamp: String,
}

impl LogRecord {
    fn created(class_id: &str, timestamp: String) -> Self {
        LogRecord {
            kind: RecordKind::Created,
            class_id: Some(class_id.to_owned()),
            test_id: None,
            polarity: None,
            timestamp,
        }
    }

    fn from_event(event: &Event) -> Self {
        let (kind, test_id, polarity) = match &event.action {
            Action::Asserted { test_id, polarity } => (RecordKind::Asserted, Some(test_id.clone()), Some(*polarity)),
            Action::Undone => (RecordKind::Undone, None, None),
        };
        LogRecord {
            kind,
            class_id: None,
            test_id,
            polarity,
            timestamp: event.timestamp.clone(),
        }
    }

    fn into_event(self) -> Result<Event, String> {
        let action = match (self.kind, self.class_id, self.test_id, self.polarity) {
            (RecordKind::Asserted, None, Some(test_id), Some(polarity)) => Action::Asserted { test_id, polarity },
            (RecordKind::Undone, None, None, None) => Action::Undone,
            (RecordKind::Created, ..) => return Err("`created` may only appear on the first line".into()),
            (kind, ..) => return Err(format!("wrong fields for a `{kind:?}` record")),
        };
        Ok(Event {
            action,
            timestamp: self.timestamp,
        })
    }

    fn to_line(&self) -> String {
        serde_json::to_string(self).expect("log records serialize")
    }
}

/// Serializes a session to its log text.
pub fn render_log(session: &Session, created_at: &str) -> String {
    let mut out = LogRecord::created(session.class_id(), created_at.to_owned()).to_line();
    out.push('\n');
    for event in session.events() {
        out.push_str(&LogRecord::from_event(event).to_line());
        out.push('\n');
    }
    out
}

/// Parses log text into the class id and its events. Line indices in errors
/// count the header as line 0.
pub fn parse_log(text: &str) -> Result<(String, Vec<Event>), SessionError> {
    let malformed = |index, reason: String| SessionError::MalformedLog { index, reason };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (index, header) = lines.next().ok_or_else(|| malformed(0, "empty log".into()))?;
    let header: LogRecord = serde_json::from_str(header).map_err(|e| malformed(index, e.to_string()))?;
    let class_id = match header {
        LogRecord {
            kind: RecordKind::Created,
            class_id: Some(class_id),
            test_id: None,
            polarity: None,
            ..
        } => class_id,
        _ => return Err(malformed(index, "first line must be a `created` record".into())),
    };
    let events = lines
        .map(|(index, line)| {
            serde_json::from_str::<LogRecord>(line)
                .map_err(|e| e.to_string())
                .and_then(LogRecord::into_event)
                .map_err(|reason| malformed(index, reason))
        })
        .collect::<Result<_, _>>()?;
    Ok((class_id, events))
}

/// Directory of `<session id>.jsonl` files.
#[derive(Debug, Clone)]
pub struct FileStore {
    dir: PathBuf,
}

fn store_error(path: &Path, e: std::io::Error) -> SessionError {
    SessionError::Store(format!("{}: {e}", path.display()))
}

impl FileStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, SessionError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| store_error(&dir, e))?;
        Ok(FileStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, id: &SessionId) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    /// Writes the header of a new session. Fails if the file already exists.
    pub fn create(&self, session: &Session) -> Result<(), SessionError> {
        let path = self.path_of(session.id());
        let created_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| store_error(&path, e))?;
        file.write_all(render_log(session, &created_at).as_bytes())
            .map_err(|e| store_error(&path, e))
    }

    pub fn append(&self, id: &SessionId, event: &Event) -> Result<(), SessionError> {
        let path = self.path_of(id);
        let mut file = OpenOptions::new()
            .append(true)
            .open(&path)
            .map_err(|e| store_error(&path, e))?;
        let mut line = LogRecord::from_event(event).to_line();
        line.push('\n');
        file.write_all(line.as_bytes()).map_err(|e| store_error(&path, e))
    }

    pub fn load(&self, consultant: &Consultant<'_>, id: &SessionId) -> Result<Session, SessionError> {
        let path = self.path_of(id);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(SessionError::UnknownSession(id.to_string()))
            }
            Err(e) => return Err(store_error(&path, e)),
        };
        let (class_id, events) = parse_log(&text)?;
        consultant.replay(id.clone(), &class_id, &events)
    }

    /// Ids of all stored sessions, sorted.
    pub fn list(&self) -> Result<Vec<SessionId>, SessionError> {
        let entries = fs::read_dir(&self.dir).map_err(|e| store_error(&self.dir, e))?;
        let mut ids: Vec<SessionId> = entries
            .filter_map(Result::ok)
            .filter_map(|entry| {
                let name = entry.file_name().into_string().ok()?;
                SessionId::parse(name.strip_suffix(".jsonl")?).ok()
            })
            .collect();
        ids.sort();
        Ok(ids)
    }
}
