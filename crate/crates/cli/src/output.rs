use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

/// Files written by the current run; removed again if the run fails.
#[derive(Default)]
pub struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    /// Writes through a temporary file in the same directory and renames it
    /// into place, so a reader never sees a truncated file.
    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        let name = path.file_name().with_context(|| format!("{} is not a file path", path.display()))?;
        let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
        let res = (|| -> Result<()> {
            let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
            f.write_all(bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, path).with_context(|| format!("cannot move output into {}", path.display()))?;
            Ok(())
        })();
        if res.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        res?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, path: &Path, value: &T) -> Result<()> {
        self.write(path, json_text(value)?.as_bytes())
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn remove_all(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

/// Pretty JSON with object keys in sorted order and a trailing newline.
pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's default map is ordered by key, so going through Value
    // sorts every object, including those of derived structs.
    let v: Value = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row; fields are written with `Display`, so floats use
/// the shortest round-trip form and `.` as the decimal separator.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}
