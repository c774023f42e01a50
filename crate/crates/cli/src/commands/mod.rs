pub mod cox;
pub mod elicit;
pub mod fieller;
pub mod tables;

/// Spacing between top-level stream indices, leaving room for the per-row
/// offsets the library applies internally.
pub const STREAM_STRIDE: u64 = 4096;
