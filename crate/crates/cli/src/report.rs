//! JSON reports with a fixed top-level layout and 17 significant digits for floats.

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;
use std::io;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
}

impl Verdict {
    /// measured ≤ tolerance.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Verdict { name: name.into(), passed: measured <= tolerance, measured: Some(measured), tolerance: Some(tolerance) }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Verdict { name: name.into(), passed, measured: None, tolerance: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
    pub timings: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits::default());
        self.serialize(&mut ser).expect("writes to memory");
        out.push(b'\n');
        String::from_utf8(out).expect("utf-8")
    }
}

/// Pretty printer writing every float as d.dddddddddddddddde±x, and non-finite ones as null.
#[derive(Default)]
pub struct SigDigits {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits_and_order_is_fixed() {
        let r = Report {
            schema_version: SCHEMA_VERSION,
            command: "check".into(),
            inputs: json!({"mu": 0.1, "a": 1}),
            results: json!({"x": null, "y": 1.0 / 3.0}),
            verdicts: vec![Verdict::at_most("r", 2e-9, 1e-8), Verdict::at_most("n", f64::NAN, 1.0)],
            timings: json!({"total_s": 0.5}),
        };
        let s = r.to_json();
        assert!(s.contains("3.3333333333333331e-1"), "{s}");
        assert!(s.contains("\"measured\": null"));
        let keys = ["schema_version", "command", "inputs", "results", "verdicts", "timings"];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(s.find("\"a\"").unwrap() < s.find("\"mu\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["results"]["y"].as_f64().unwrap(), 1.0 / 3.0);
    }
}
