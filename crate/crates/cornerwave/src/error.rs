use thiserror::Error;

/// Crate-wide error type.
///
/// The three variants map onto the CLI exit codes: `InvalidConfig` → 2,
/// `Numerical` → 3, `CheckFailed` → 1 (anything else that can fail, e.g. I/O,
/// is wrapped into the closest of the three by the binary).
#[derive(Debug, Error)]
pub enum Error {
    /// Configuration rejected before any arithmetic ran.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// The evolution produced non-finite values or an ill-conditioned solve.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A mathematical check failed. `tag` keys into the message catalog
    /// (`harness::describe_check`), `detail` carries the measured numbers.
    #[error("check failed [{tag}]: {detail}")]
    CheckFailed { tag: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Assert `cond`, otherwise produce a `CheckFailed` carrying the catalog tag.
pub fn ensure(cond: bool, tag: &'static str, detail: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::CheckFailed { tag, detail })
    }
}
