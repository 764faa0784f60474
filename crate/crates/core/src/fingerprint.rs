//! Content fingerprints tying artifacts to the exact data they were built from.
//!
//! A fingerprint is the first 16 hex characters of a SHA-256 over a canonical
//! byte stream, so it is stable across file rewrites, comment changes and
//! id-assignment order. `evaluate` refuses to pair a model with a fold whose
//! fingerprint differs from the one recorded at training time.

use sha2::{Digest, Sha256};

/// Incremental fingerprint builder over canonical bytes.
pub struct Fingerprint(Sha256);

impl Fingerprint {
    pub fn new() -> Self {
        Fingerprint(Sha256::new())
    }

    pub fn update(&mut self, bytes: &[u8]) {
        self.0.update(bytes);
    }

    pub fn finish(self) -> String {
        let digest = self.0.finalize();
        let mut out = String::with_capacity(16);
        for byte in &digest[..8] {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

impl Default for Fingerprint {
    fn default() -> Self {
        Self::new()
    }
}

/// Fingerprint of a free-standing byte string (configs, file payloads).
pub fn fingerprint_bytes(bytes: &[u8]) -> String {
    let mut fp = Fingerprint::new();
    fp.update(bytes);
    fp.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_and_input_sensitive() {
        let a = fingerprint_bytes(b"abc");
        assert_eq!(a.len(), 16);
        assert_eq!(a, fingerprint_bytes(b"abc"));
        assert_ne!(a, fingerprint_bytes(b"abd"));
    }
}
