//! One module per subcommand.

pub mod baseline;
pub mod bounds;
pub mod fit;
pub mod probe;
pub mod synth;

use crate::{input_error, CliError};

/// Sorts a library error into the input/computation exit classes by its
/// nature: malformed or inconsistent parameters, specs, and files are input
/// problems; numeric failures arising mid-run are computation problems.
pub fn classify(err: wmnmf::Error) -> CliError {
    use wmnmf::Error::*;
    match err {
        EmptyView { .. } | NoViews | EmptyMatrix { .. } | NonFiniteEntry { .. }
        | NegativeEntry { .. } | ObservationCountMismatch { .. } | LabelLengthMismatch { .. }
        | ZeroSumView { .. } | InvalidHyperParam { .. } | RankTooLarge { .. }
        | InsufficientObservations { .. } | TooFewPoints { .. } | InvalidSpec { .. }
        | NegativeLogArgument { .. } | InvalidConfidence { .. } | InvalidBoundParam { .. }
        | Io { .. } | Parse { .. } => CliError::Input(err.to_string()),
        DegenerateAlpha { .. } | NonFiniteObjective { .. } | EigenFailure { .. }
        | DimensionMismatch { .. } | LabelMismatch { .. } => CliError::Computation(err.to_string()),
    }
}

/// Parses a comma-separated list of numbers, e.g. `0,1e-3,1e-2`.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    let mut values = Vec::new();
    for part in text.split(',') {
        let trimmed = part.trim();
        if trimmed.is_empty() {
            continue;
        }
        values.push(
            trimmed
                .parse::<T>()
                .map_err(|e| input_error(format!("invalid {what} entry {trimmed:?}: {e}")))?,
        );
    }
    if values.is_empty() {
        return Err(input_error(format!("empty {what} list")));
    }
    Ok(values)
}

/// Creates the output directory (and parents) if it does not exist.
pub fn ensure_out_dir(dir: &std::path::Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))
}
