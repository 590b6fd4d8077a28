//! Report serialization with reproducible float formatting.
//!
//! Every float in an emitted JSON document is written with 17 significant
//! digits, enough to round-trip an f64 exactly, so identical runs produce
//! byte-identical files.

use std::io::Write;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::Result;

struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no infinities; encode as strings would change the
            // schema, so clamp to the largest finite value with a sign.
            let sub = if value.is_nan() {
                "null".to_string()
            } else if value > 0.0 {
                format!("{:.16e}", f64::MAX)
            } else {
                format!("{:.16e}", f64::MIN)
            };
            writer.write_all(sub.as_bytes())
        }
    }
}

/// Serialize to a JSON string with fixed 17-significant-digit floats and a
/// trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Pretty variant with the same float formatting.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let pretty = serde_json::ser::PrettyFormatter::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PrettyFixed { inner: pretty });
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

struct PrettyFixed<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl Formatter for PrettyFixed<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        FixedFloats.write_f64(writer, value)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.inner.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_fixed_width() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: f64,
        }
        let s = to_json_string(&S { a: 1.0, b: 0.1 }).unwrap();
        assert!(s.contains("1.0000000000000000e0"), "{s}");
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
    }

    #[test]
    fn identical_values_serialize_identically() {
        let a = to_json_string(&vec![0.1 + 0.2, 3.5]).unwrap();
        let b = to_json_string(&vec![0.1 + 0.2, 3.5]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn round_trips_exactly() {
        let vals = vec![std::f64::consts::PI, 1e-300, 123456.789];
        let s = to_json_string(&vals).unwrap();
        let back: Vec<f64> = serde_json::from_str(s.trim()).unwrap();
        assert_eq!(vals, back);
    }
}
