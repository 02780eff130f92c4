//! JSON serialization with 17-significant-digit floats.
//!
//! 17 significant decimal digits are enough to reproduce any f64 bit pattern
//! exactly on parse, so files written through this module round-trip
//! bit-for-bit while staying diffable text.

use serde::Serialize;
use std::io::{self, Write};

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{:.16e}", value)
    }
}

/// Serialize `value` as a single JSON line (no trailing newline).
pub fn to_string_17<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::with_capacity(256);
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut ser)?;
    // The formatter only writes ASCII.
    Ok(String::from_utf8(out).expect("serializer emits valid utf-8"))
}
