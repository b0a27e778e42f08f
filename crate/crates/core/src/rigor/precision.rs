//! Precision-cap plumbing for refinement loops.

use std::sync::OnceLock;

/// Environment variable overriding the default cap (in bits).
pub const PRECISION_CAP_ENV: &str = "LITTLEWOOD_PRECISION_CAP";

const DEFAULT_CAP_BITS: u32 = 256;

/// Cap on adaptive refinement: loops refuse to shrink enclosures below width
/// 2^-cap_bits and report an undecidable outcome instead of rounding silently.
#[derive(Clone, Copy, Debug)]
pub struct Precision {
    pub cap_bits: u32,
}

impl Precision {
    pub fn new(cap_bits: u32) -> Self {
        Precision { cap_bits }
    }

    /// Default cap, honoring `LITTLEWOOD_PRECISION_CAP` once per process.
    pub fn default_cap() -> Self {
        static CAP: OnceLock<u32> = OnceLock::new();
        let bits = *CAP.get_or_init(|| {
            std::env::var(PRECISION_CAP_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(DEFAULT_CAP_BITS)
        });
        Precision { cap_bits: bits }
    }

    pub fn min_width(&self) -> super::Rat {
        super::rat_pow2(-(self.cap_bits as i64))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::default_cap()
    }
}
