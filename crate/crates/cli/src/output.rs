use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::args::Format;

/// Writes results to stdout in the selected format.
pub struct Out {
    pub format: Format,
    timestamps: bool,
}

impl Out {
    pub fn new(format: Format, timestamps: bool) -> Self {
        Out { format, timestamps }
    }

    fn now() -> u64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
    }

    pub fn json<T: Serialize>(&self, value: &T) {
        let text = if self.timestamps {
            let wrapped = serde_json::json!({ "timestamp": Self::now(), "result": value });
            serde_json::to_string_pretty(&wrapped)
        } else {
            serde_json::to_string_pretty(value)
        };
        emit([text.expect("serialisable output")]);
    }

    /// Text or CSV lines; a timestamp comment comes first when requested.
    pub fn lines(&self, lines: impl IntoIterator<Item = String>) {
        let stamp = self.timestamps.then(|| format!("# timestamp {}", Self::now()));
        emit(stamp.into_iter().chain(lines));
    }
}

fn emit(lines: impl IntoIterator<Item = String>) {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    for line in lines {
        // a closed pipe is not an error worth reporting
        if writeln!(lock, "{line}").is_err() {
            return;
        }
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
