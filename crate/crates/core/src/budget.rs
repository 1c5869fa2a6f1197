//! Cooperative time limits shared by the engines.

use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("time limit exceeded")]
pub struct Timeout;

#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    at: Option<Instant>,
}

impl Deadline {
    pub fn never() -> Self {
        Deadline { at: None }
    }

    pub fn after(d: Duration) -> Self {
        Deadline { at: Instant::now().checked_add(d) }
    }

    pub fn from_secs(secs: Option<f64>) -> Self {
        match secs {
            Some(s) => Deadline::after(Duration::try_from_secs_f64(s.max(0.0)).unwrap_or(Duration::MAX)),
            None => Deadline::never(),
        }
    }

    pub fn expired(&self) -> bool {
        self.at.is_some_and(|t| Instant::now() >= t)
    }

    pub fn check(&self) -> Result<(), Timeout> {
        if self.expired() {
            Err(Timeout)
        } else {
            Ok(())
        }
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.at.map(|t| t.saturating_duration_since(Instant::now()))
    }
}

impl Default for Deadline {
    fn default() -> Self {
        Deadline::never()
    }
}
