//! run.log: the only output that carries wall-clock time.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::Path;

pub struct RunLog {
    file: Option<File>,
}

impl RunLog {
    /// Appends to `dir/run.log`; logging is dropped if the file cannot be opened.
    pub fn open(dir: &Path) -> Self {
        let file = fs::create_dir_all(dir).ok().and_then(|_| {
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(dir.join("run.log"))
                .ok()
        });
        Self { file }
    }

    pub fn line(&mut self, msg: &str) {
        if let Some(f) = &mut self.file {
            let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true);
            // a failed log write must not change the outcome of the run
            let _ = writeln!(f, "{now} {msg}");
        }
    }
}
