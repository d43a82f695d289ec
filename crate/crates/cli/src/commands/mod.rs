pub mod analyze;
pub mod dump_profile;
pub mod gen_game;
pub mod optimize;
pub mod tournament;

/// Shortest text that parses back to the same float.
pub(crate) fn num(v: f64) -> String {
    format!("{v}")
}
