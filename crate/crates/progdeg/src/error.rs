use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] progdeg_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("no source images found in {}", .0.display())]
    EmptyInput(PathBuf),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("dangling reference: {0}")]
    DanglingReference(String),

    #[error("missing trajectory data: {}", .0.join(", "))]
    Coverage(Vec<String>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("external metric failed: {message}{}", fmt_output(.output))]
    External { message: String, output: String },

    #[error("external metric lookup: {0}")]
    Lookup(String),
}

fn fmt_output(output: &str) -> String {
    if output.is_empty() {
        String::new()
    } else {
        format!("\n{output}")
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for this error: 3 for external-metric failures,
    /// 2 for everything else (data and IO).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::External { .. } | Error::Lookup(_) => 3,
            Error::Core(e) if matches!(e.root(), progdeg_core::Error::External(_)) => 3,
            _ => 2,
        }
    }
}
