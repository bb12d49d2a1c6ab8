//! Background jobs for long engine calls, polled by id and cancellable.

use std::collections::HashMap;
use std::future::Future;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use serde_json::Value;
use tokio::sync::Semaphore;

use crate::error::ApiError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
    Cancelled,
}

#[derive(Clone, Debug, Serialize)]
pub struct JobStatus {
    pub id: String,
    pub kind: String,
    pub state: JobState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Entry {
    status: JobStatus,
    cancel: Arc<AtomicBool>,
}

pub struct Jobs {
    entries: Arc<Mutex<HashMap<String, Entry>>>,
    permits: Arc<Semaphore>,
}

impl Jobs {
    pub fn new(workers: usize) -> Self {
        Jobs { entries: Arc::new(Mutex::new(HashMap::new())), permits: Arc::new(Semaphore::new(workers.max(1))) }
    }

    /// Starts `make(cancel)` once a worker slot is free and returns the job
    /// id right away.
    pub fn spawn<F, Fut>(&self, kind: &str, make: F) -> String
    where
        F: FnOnce(Arc<AtomicBool>) -> Fut + Send + 'static,
        Fut: Future<Output = Result<Value, ApiError>> + Send + 'static,
    {
        let id = uuid::Uuid::new_v4().to_string();
        let cancel = Arc::new(AtomicBool::new(false));
        let status = JobStatus { id: id.clone(), kind: kind.into(), state: JobState::Queued, result: None, error: None };
        self.entries.lock().expect("job map lock").insert(id.clone(), Entry { status, cancel: cancel.clone() });
        let entries = self.entries.clone();
        let permits = self.permits.clone();
        let job_id = id.clone();
        tokio::spawn(async move {
            let _permit = permits.acquire_owned().await.expect("semaphore open");
            let set = |state: JobState, result: Option<Value>, error: Option<String>| {
                if let Some(e) = entries.lock().expect("job map lock").get_mut(&job_id) {
                    e.status.state = state;
                    e.status.result = result;
                    e.status.error = error;
                }
            };
            if cancel.load(Ordering::Relaxed) {
                set(JobState::Cancelled, None, None);
                return;
            }
            set(JobState::Running, None, None);
            let outcome = make(cancel.clone()).await;
            match outcome {
                Ok(v) => set(JobState::Done, Some(v), None),
                Err(_) if cancel.load(Ordering::Relaxed) => set(JobState::Cancelled, None, None),
                Err(e) => set(JobState::Failed, None, Some(e.to_string())),
            }
            tracing::debug!(job = %job_id, "job finished");
        });
        id
    }

    pub fn status(&self, id: &str) -> Option<JobStatus> {
        self.entries.lock().expect("job map lock").get(id).map(|e| e.status.clone())
    }

    /// Requests cancellation; the engine stops at its next check.
    pub fn cancel(&self, id: &str) -> Option<JobStatus> {
        let entries = self.entries.lock().expect("job map lock");
        let e = entries.get(id)?;
        e.cancel.store(true, Ordering::Relaxed);
        Some(e.status.clone())
    }
}
