//! Stable 64-bit text hash.
//!
//! FNV-1a over UTF-8 bytes. Scripted agent fixtures key their entries by
//! `fnv1a64_hex(prompt)`, so this function is a wire-format contract: the
//! constants and byte order are frozen.

use alloc::string::String;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

pub fn fnv1a64(text: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for byte in text.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// The hash rendered as 16 lowercase hex digits, the form used as a fixture
/// key.
pub fn fnv1a64_hex(text: &str) -> String {
    use core::fmt::Write;
    let mut s = String::with_capacity(16);
    let _ = write!(s, "{:016x}", fnv1a64(text));
    s
}
