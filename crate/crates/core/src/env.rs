//! Sources of time and fresh identifiers.
//!
//! Operations that stamp values take an [`Environment`] so that scripted
//! sessions can be replayed deterministically.

use crate::model::{AnnotationId, Timestamp};

pub trait Environment {
    fn now(&mut self) -> Timestamp;
    fn fresh_id(&mut self) -> AnnotationId;
}

/// Wall clock and random UUIDs.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemEnvironment;

impl Environment for SystemEnvironment {
    fn now(&mut self) -> Timestamp {
        Timestamp::now()
    }

    fn fresh_id(&mut self) -> AnnotationId {
        AnnotationId::generate()
    }
}

/// A clock that advances by a fixed step on every reading and ids of the form
/// `<prefix>-0001`, `<prefix>-0002`, ...
#[derive(Debug, Clone)]
pub struct SequentialEnvironment {
    next_secs: i64,
    step_secs: i64,
    prefix: String,
    counter: u64,
}

impl SequentialEnvironment {
    pub fn new(start_unix_secs: i64, step_secs: i64, prefix: impl Into<String>) -> Self {
        SequentialEnvironment {
            next_secs: start_unix_secs,
            step_secs,
            prefix: prefix.into(),
            counter: 0,
        }
    }
}

impl Environment for SequentialEnvironment {
    fn now(&mut self) -> Timestamp {
        let ts = Timestamp::from_unix(self.next_secs).expect("timestamp in range");
        self.next_secs += self.step_secs;
        ts
    }

    fn fresh_id(&mut self) -> AnnotationId {
        self.counter += 1;
        AnnotationId::new(format!("{}-{:04}", self.prefix, self.counter))
    }
}
