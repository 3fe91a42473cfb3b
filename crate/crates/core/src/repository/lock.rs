//! Advisory single-writer lock (`annoglue.lock`).

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{RepoError, LOCK_FILE};
use crate::model::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LockInfo {
    pub pid: u32,
    pub acquired_at: Timestamp,
}

/// Held lock; the file is removed on drop.
#[derive(Debug)]
pub struct ProjectLock {
    path: PathBuf,
}

#[derive(Debug)]
pub struct Acquired {
    pub lock: ProjectLock,
    /// Set when a stale lock was taken over.
    pub warning: Option<String>,
}

impl ProjectLock {
    pub const DEFAULT_STALE_AFTER: Duration = Duration::from_secs(300);

    pub fn acquire(root: &Path, stale_after: Duration) -> Result<Acquired, RepoError> {
        Self::acquire_at(root, stale_after, Timestamp::now())
    }

    pub fn acquire_at(
        root: &Path,
        stale_after: Duration,
        now: Timestamp,
    ) -> Result<Acquired, RepoError> {
        let path = root.join(LOCK_FILE);
        let info = LockInfo {
            pid: std::process::id(),
            acquired_at: now,
        };
        let content = serde_json::to_string(&info).expect("lock info serializes");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                file.write_all(content.as_bytes())
                    .map_err(|e| RepoError::io(&path, e))?;
                Ok(Acquired {
                    lock: ProjectLock { path },
                    warning: None,
                })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => {
                let existing = fs::read_to_string(&path).unwrap_or_default();
                let holder = serde_json::from_str::<LockInfo>(&existing).ok();
                let age = holder
                    .as_ref()
                    .map(|h| now.unix() - h.acquired_at.unix())
                    .unwrap_or(i64::MAX);
                if age < 0 || (age as u64) < stale_after.as_secs() {
                    let who = holder
                        .map(|h| format!("pid {} since {}", h.pid, h.acquired_at))
                        .unwrap_or_else(|| "unknown holder".into());
                    return Err(RepoError::Locked(who));
                }
                super::storage::write_atomic(&path, content.as_bytes())
                    .map_err(|e| RepoError::io(&path, e))?;
                let warning = match holder {
                    Some(h) => format!(
                        "took over stale lock held by pid {} since {}",
                        h.pid, h.acquired_at
                    ),
                    None => "took over unreadable lock file".to_string(),
                };
                Ok(Acquired {
                    lock: ProjectLock { path },
                    warning: Some(warning),
                })
            }
            Err(e) => Err(RepoError::io(&path, e)),
        }
    }
}

impl Drop for ProjectLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
