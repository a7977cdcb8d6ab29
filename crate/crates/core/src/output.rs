//! Provenance headers and number formatting shared by every CSV writer.

use std::io::Write;

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `# patchdyn <version> config-sha256=<hex>`
pub fn provenance_line(config_text: &str) -> String {
    format!(
        "# patchdyn {} config-sha256={}",
        env!("CARGO_PKG_VERSION"),
        sha256_hex(config_text.as_bytes())
    )
}

/// Shortest round-trip decimal form, with `-0` written as `0`.
pub fn fmt_f64(x: f64) -> String {
    format!("{}", x + 0.0)
}

pub fn write_provenance<W: Write>(out: &mut W, provenance: &str) -> std::io::Result<()> {
    writeln!(out, "{provenance}")
}
