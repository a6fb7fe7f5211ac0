use std::io::Write;
use std::time::{Duration, Instant};

use scenesearch_core::search::{SearchObserver, SearchStats};

/// Writes search statistics to stdout as one JSON object per line, at most
/// once per interval.
pub struct JsonProgress {
    interval: Duration,
    last: Option<Instant>,
    enabled: bool,
}

impl JsonProgress {
    pub fn new(enabled: bool) -> Self {
        Self {
            interval: Duration::from_millis(500),
            last: None,
            enabled,
        }
    }
}

impl SearchObserver for JsonProgress {
    fn on_progress(&mut self, stats: &SearchStats) {
        if !self.enabled || self.last.is_some_and(|t| t.elapsed() < self.interval) {
            return;
        }
        self.last = Some(Instant::now());
        emit(&serde_json::json!({
            "event": "progress",
            "expansions": stats.expansions,
            "generated": stats.generated,
            "best_cost": stats.best_cost,
            "min_key": stats.min_key,
            "open": stats.open,
            "elapsed_secs": stats.elapsed_secs,
        }));
    }
}

pub fn emit(record: &serde_json::Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{record}");
}
