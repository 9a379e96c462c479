//! CSV and JSON-lines record writers.
//!
//! Floats are written with 17 significant digits in the style of C's `%.17g`,
//! which is enough for every value to parse back to the same binary double.

use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    #[value(name = "jsonl", alias = "json-lines")]
    JsonLines,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<u64> for Field {
    fn from(x: u64) -> Self {
        Field::Int(x)
    }
}

impl From<bool> for Field {
    fn from(x: bool) -> Self {
        Field::Bool(x)
    }
}

impl From<&str> for Field {
    fn from(x: &str) -> Self {
        Field::Text(x.to_owned())
    }
}

/// `%.17g`: fixed notation for decimal exponents in [-4, 17), scientific
/// otherwise, trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_fraction(&fixed).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(f: &Field) -> String {
    match f {
        Field::Num(x) => format_g17(*x),
        Field::Int(i) => i.to_string(),
        Field::Bool(b) => b.to_string(),
        Field::Text(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

fn json_field(f: &Field) -> String {
    match f {
        Field::Num(x) if x.is_finite() => format_g17(*x),
        Field::Num(_) => "null".into(),
        Field::Int(i) => i.to_string(),
        Field::Bool(b) => b.to_string(),
        Field::Text(s) => {
            let mut out = String::with_capacity(s.len() + 2);
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        }
    }
}

/// Writes records with a fixed set of column names.
pub struct RecordWriter<W: Write> {
    out: W,
    format: Format,
    columns: Vec<String>,
    started: bool,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, format: Format, columns: &[&str]) -> Self {
        Self {
            out,
            format,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            started: false,
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    /// CSV header line; JSON lines have none.
    fn start(&mut self) -> io::Result<()> {
        if !self.started {
            self.started = true;
            if self.format == Format::Csv {
                writeln!(self.out, "{}", self.columns.join(","))?;
            }
        }
        Ok(())
    }

    pub fn write(&mut self, fields: &[Field]) -> io::Result<()> {
        assert_eq!(fields.len(), self.columns.len(), "record width must match the header");
        self.start()?;
        match self.format {
            Format::Csv => {
                let line: Vec<String> = fields.iter().map(csv_field).collect();
                writeln!(self.out, "{}", line.join(","))
            }
            Format::JsonLines => {
                let members: Vec<String> = self
                    .columns
                    .iter()
                    .zip(fields)
                    .map(|(k, v)| format!("\"{}\":{}", k, json_field(v)))
                    .collect();
                writeln!(self.out, "{{{}}}", members.join(","))
            }
        }
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.start()?;
        self.out.flush()?;
        Ok(self.out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_examples() {
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e12), "1000000000000");
        assert_eq!(format_g17(1e17), "1e+17");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1.5e-4), "0.00014999999999999999");
        assert_eq!(format_g17(-2.0), "-2");
        assert_eq!(format_g17(-5e9), "-5000000000");
        assert_eq!(format_g17(0.0), "0");
        assert_eq!(format_g17(f64::NAN), "NaN");
        assert_eq!(format_g17(f64::NEG_INFINITY), "-inf");
    }

    proptest! {
        #[test]
        fn g17_round_trips(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = format_g17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn csv_and_jsonl_share_fields() {
        let cols = ["t", "method", "b10", "ok", "samples"];
        let row = [Field::from(2.0), Field::from("exact"), Field::from(f64::NAN), Field::from(true), Field::from(7u64)];

        let mut csv = RecordWriter::new(Vec::new(), Format::Csv, &cols);
        csv.write(&row).unwrap();
        let csv = String::from_utf8(csv.finish().unwrap()).unwrap();
        assert_eq!(csv, "t,method,b10,ok,samples\n2,exact,NaN,true,7\n");

        let mut js = RecordWriter::new(Vec::new(), Format::JsonLines, &cols);
        js.write(&row).unwrap();
        let js = String::from_utf8(js.finish().unwrap()).unwrap();
        assert_eq!(js, "{\"t\":2,\"method\":\"exact\",\"b10\":null,\"ok\":true,\"samples\":7}\n");
    }

    #[test]
    fn header_without_rows() {
        let w = RecordWriter::new(Vec::new(), Format::Csv, &["a", "b"]);
        assert_eq!(w.finish().unwrap(), b"a,b\n");
    }
}
