//! Formatting and hashing helpers shared by the text interfaces.

use sha2::{Digest, Sha256};

/// Decimal with 17 significant digits; round-trips any f64 exactly.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{:02x}", b));
    }
    s
}
