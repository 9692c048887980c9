//! Shared numeric text formatting for output files.

/// 17 significant digits: lossless f64 round trip, and identical bytes for
/// identical bit patterns on every platform.
pub(crate) fn f64_text(x: f64) -> String {
    format!("{x:.16e}")
}
