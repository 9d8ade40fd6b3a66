macro_rules! say {
    ($($t:tt)*) => { $crate::outcome::say(&format!($($t)*)) };
}

macro_rules! sayln {
    ($($t:tt)*) => { $crate::outcome::say(&format!("{}\n", format!($($t)*))) };
}

use std::fmt;
use std::path::PathBuf;

use laminations::error::{AngleSystemError, DocumentError, DynamicsError, LaminationError, RenderError, SchemaError};
use serde_json::Value;

pub const SUCCESS: u8 = 0;
pub const VALIDATION: u8 = 1;
pub const USAGE: u8 = 2;
pub const NUMERICAL: u8 = 3;

/// A failure that already knows its exit code.
#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl Exit {
    pub fn usage(message: impl Into<String>) -> Exit {
        Exit { code: USAGE, message: message.into() }
    }
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

/// Exit code for an error raised anywhere below the dispatcher.
pub fn code_of(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Exit>() {
            return e.code;
        }
        if let Some(e) = cause.downcast_ref::<DynamicsError>() {
            return match e {
                DynamicsError::NonFinite => NUMERICAL,
                _ => USAGE,
            };
        }
        if let Some(e) = cause.downcast_ref::<RenderError>() {
            return match e {
                RenderError::Dynamics(DynamicsError::NonFinite) => NUMERICAL,
                _ => USAGE,
            };
        }
        if cause.is::<DocumentError>() || cause.is::<std::io::Error>() {
            return USAGE;
        }
        if cause.is::<AngleSystemError>() || cause.is::<LaminationError>() || cause.is::<SchemaError>() {
            return VALIDATION;
        }
    }
    USAGE
}

/// Where a command's report goes.
#[derive(Clone, Debug)]
pub struct Sink {
    pub json: bool,
    pub out: Option<PathBuf>,
}

impl Sink {
    /// Prints the human report, or the document under `--json`. With `--out`
    /// the document goes to the file and the human report to stdout.
    pub fn emit(&self, human: &str, doc: &Value) -> anyhow::Result<()> {
        self.emit_with(human, doc, doc)
    }

    /// Like [`Sink::emit`], with a separate document for `--out`.
    pub fn emit_with(&self, human: &str, report: &Value, document: &Value) -> anyhow::Result<()> {
        let text = pretty(report);
        match &self.out {
            Some(path) => {
                write_file(path, pretty(document).as_bytes())?;
                if self.json {
                    sayln!("{text}");
                } else {
                    say!("{human}");
                }
            }
            None if self.json => sayln!("{text}"),
            None => say!("{human}"),
        }
        Ok(())
    }
}

pub fn pretty(doc: &Value) -> String {
    serde_json::to_string_pretty(doc).expect("JSON values serialize")
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> anyhow::Result<()> {
    std::fs::write(path, bytes).map_err(|e| anyhow::Error::new(e).context(format!("writing {}", path.display())))
}

/// Writes to stdout; a closed pipe ends output quietly.
pub fn say(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}
