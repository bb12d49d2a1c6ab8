//! Sessions: a tree of problems grown by speedups and merges, stored as
//! an append-only JSON-lines event log.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use relim_core::engine::{merge_labels, speedup_with, EngineError, SpeedupOptions};
use relim_core::problem::{format_problem, LabelMap, ProblemJson};
use relim_core::{Problem, ProblemError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("session log: {0}")]
    Io(#[from] std::io::Error),
    #[error("replay: {0}")]
    Replay(String),
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum NodeOp {
    Root,
    Speedup,
    Merge { mapping: LabelMap },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub op: NodeOp,
    pub problem: Problem,
    pub hash: String,
}

/// One line of the log. Every event records the hash of the node it
/// creates, so replay can confirm it reproduces the same problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    Create { session: String, at_ms: u64, root: ProblemJson, hash: String },
    Speedup { parent: usize, at_ms: u64, hash: String },
    Merge { parent: usize, at_ms: u64, mapping: LabelMap, hash: String },
}

#[derive(Clone, Debug)]
pub struct Session {
    pub id: String,
    pub created_ms: u64,
    pub updated_ms: u64,
    pub nodes: Vec<Node>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NodeView {
    pub id: usize,
    pub parent: Option<usize>,
    #[serde(flatten)]
    pub op: NodeOp,
    pub problem: ProblemJson,
    pub text: String,
    pub hash: String,
    pub labels: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SessionView {
    pub id: String,
    pub created_ms: u64,
    pub updated_ms: u64,
    pub nodes: Vec<NodeView>,
}

impl Node {
    pub fn view(&self) -> NodeView {
        NodeView {
            id: self.id,
            parent: self.parent,
            op: self.op.clone(),
            problem: ProblemJson::from(&self.problem),
            text: format_problem(&self.problem),
            hash: self.hash.clone(),
            labels: self.problem.alphabet().len(),
        }
    }
}

/// The child problem an operation produces.
pub fn derive(parent: &Problem, op: &NodeOp, opts: &SpeedupOptions) -> Result<Problem, SessionError> {
    Ok(match op {
        NodeOp::Root => parent.clone(),
        NodeOp::Speedup => speedup_with(parent, opts)?.problem,
        NodeOp::Merge { mapping } => merge_labels(parent, mapping)?,
    })
}

impl Session {
    pub fn empty(id: &str) -> Self {
        Session { id: id.to_string(), created_ms: 0, updated_ms: 0, nodes: Vec::new() }
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            created_ms: self.created_ms,
            updated_ms: self.updated_ms,
            nodes: self.nodes.iter().map(Node::view).collect(),
        }
    }

    pub fn node(&self, id: usize) -> Result<&Node, SessionError> {
        self.nodes.get(id).ok_or(SessionError::UnknownNode(id))
    }

    /// Adds a node computed elsewhere and returns the event to log.
    pub fn push(&mut self, parent: Option<usize>, op: NodeOp, problem: Problem) -> Event {
        let at_ms = now_ms();
        let hash = problem.digest();
        let event = match (&op, parent) {
            (NodeOp::Speedup, Some(parent)) => Event::Speedup { parent, at_ms, hash: hash.clone() },
            (NodeOp::Merge { mapping }, Some(parent)) => {
                Event::Merge { parent, at_ms, mapping: mapping.clone(), hash: hash.clone() }
            }
            _ => {
                self.created_ms = at_ms;
                Event::Create { session: self.id.clone(), at_ms, root: ProblemJson::from(&problem), hash: hash.clone() }
            }
        };
        self.updated_ms = at_ms;
        self.nodes.push(Node { id: self.nodes.len(), parent, op, problem, hash });
        event
    }

    /// Re-applies a logged event, recomputing the node it describes.
    pub fn replay(&mut self, event: &Event, opts: &SpeedupOptions) -> Result<(), SessionError> {
        let (parent, op, problem, hash, at_ms) = match event {
            Event::Create { root, hash, at_ms, .. } => {
                if !self.nodes.is_empty() {
                    return Err(SessionError::Replay("second create event".into()));
                }
                self.created_ms = *at_ms;
                (None, NodeOp::Root, Problem::try_from(root.clone())?, hash, *at_ms)
            }
            Event::Speedup { parent, hash, at_ms } => {
                let p = derive(&self.node(*parent)?.problem, &NodeOp::Speedup, opts)?;
                (Some(*parent), NodeOp::Speedup, p, hash, *at_ms)
            }
            Event::Merge { parent, mapping, hash, at_ms } => {
                let op = NodeOp::Merge { mapping: mapping.clone() };
                let p = derive(&self.node(*parent)?.problem, &op, opts)?;
                (Some(*parent), op, p, hash, *at_ms)
            }
        };
        if &problem.digest() != hash {
            return Err(SessionError::Replay(format!("node {} does not reproduce hash {hash}", self.nodes.len())));
        }
        self.updated_ms = at_ms;
        self.nodes.push(Node { id: self.nodes.len(), parent, op, problem, hash: hash.clone() });
        Ok(())
    }
}

/// Result of reading a log back.
#[derive(Debug)]
pub struct Loaded {
    pub session: Session,
    pub events: usize,
    /// Bytes dropped from the end of the log.
    pub truncated: u64,
}

/// Replays a log file. The first line that fails to parse or replay, and
/// everything after it, is cut off so later appends extend a valid prefix.
pub fn load_log(path: &Path, id: &str, opts: &SpeedupOptions) -> Result<Loaded, SessionError> {
    let file = File::open(path)?;
    let total = file.metadata()?.len();
    let mut reader = BufReader::new(file);
    let mut session = Session::empty(id);
    let mut offset = 0u64;
    let mut events = 0;
    let mut line = Vec::new();
    loop {
        line.clear();
        let n = reader.read_until(b'\n', &mut line)?;
        if n == 0 {
            break;
        }
        let complete = line.ends_with(b"\n");
        let ok = complete
            && serde_json::from_slice::<Event>(&line)
                .map_err(|e| SessionError::Replay(e.to_string()))
                .and_then(|ev| session.replay(&ev, opts))
                .map_err(|e| tracing::warn!(session = id, offset, error = %e, "dropping log tail"))
                .is_ok();
        if !ok {
            break;
        }
        offset += n as u64;
        events += 1;
    }
    let truncated = total - offset;
    if truncated > 0 {
        tracing::warn!(session = id, bytes = truncated, "truncated corrupt session log tail");
        OpenOptions::new().write(true).open(path)?.set_len(offset)?;
    }
    Ok(Loaded { session, events, truncated })
}

pub fn append_event(path: &Path, event: &Event) -> Result<(), SessionError> {
    let mut line = serde_json::to_vec(event).map_err(|e| SessionError::Replay(e.to_string()))?;
    line.push(b'\n');
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(&line)?;
    f.sync_data()?;
    Ok(())
}

/// Sessions on disk with an in-memory cache. Each session has its own
/// lock, so mutations of one session are serialized while different
/// sessions proceed independently.
pub struct SessionStore {
    dir: PathBuf,
    opts: SpeedupOptions,
    open: Mutex<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
}

pub type SessionHandle = Arc<tokio::sync::Mutex<Session>>;

impl SessionStore {
    pub fn new(dir: impl Into<PathBuf>, opts: SpeedupOptions) -> Result<Self, SessionError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(SessionStore { dir, opts, open: Mutex::new(HashMap::new()) })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    fn valid_id(id: &str) -> bool {
        !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
    }

    pub fn create(&self, root: Problem) -> Result<SessionHandle, SessionError> {
        let id = uuid::Uuid::new_v4().to_string();
        let mut session = Session::empty(&id);
        let event = session.push(None, NodeOp::Root, root);
        append_event(&self.path(&id), &event)?;
        let handle = Arc::new(tokio::sync::Mutex::new(session));
        self.open.lock().expect("session map lock").insert(id, handle.clone());
        Ok(handle)
    }

    pub fn get(&self, id: &str) -> Result<SessionHandle, SessionError> {
        if !Self::valid_id(id) {
            return Err(SessionError::UnknownSession(id.to_string()));
        }
        if let Some(h) = self.open.lock().expect("session map lock").get(id) {
            return Ok(h.clone());
        }
        let path = self.path(id);
        if !path.exists() {
            return Err(SessionError::UnknownSession(id.to_string()));
        }
        let loaded = load_log(&path, id, &self.opts)?;
        let handle = Arc::new(tokio::sync::Mutex::new(loaded.session));
        let mut open = self.open.lock().expect("session map lock");
        Ok(open.entry(id.to_string()).or_insert(handle).clone())
    }

    /// Adds a node to a locked session and logs it.
    pub fn record(&self, session: &mut Session, parent: usize, op: NodeOp, problem: Problem) -> Result<usize, SessionError> {
        session.node(parent)?;
        let event = session.push(Some(parent), op, problem);
        if let Err(e) = append_event(&self.path(&session.id), &event) {
            session.nodes.pop();
            return Err(e);
        }
        Ok(session.nodes.len() - 1)
    }

    pub fn options(&self) -> &SpeedupOptions {
        &self.opts
    }

    pub fn log_path(&self, id: &str) -> PathBuf {
        self.path(id)
    }
}
