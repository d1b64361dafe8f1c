//! JSON and CSV rendering with 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{Map, Value};

/// `x` formatted like C's `%.17g`. Non-finite values map to `inf`, `-inf`
/// and `nan`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (16 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// JSON number for a finite `x`, or the strings `"inf"`, `"-inf"`, `"nan"`.
pub fn num(x: f64) -> Value {
    match serde_json::Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(g17(x)),
    }
}

/// Serializes through `serde_json`'s value model; maps are key-sorted.
/// Non-finite floats in `value` must be pre-converted with [`num`].
pub fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("result types serialize to JSON")
}

/// Inserts every entry of `extra` (an object) into `base` (an object).
pub fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn object(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

struct G17Formatter;

impl serde_json::ser::Formatter for G17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with 17-digit floats.
pub fn render(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter);
    value.serialize(&mut ser).expect("JSON rendering cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// The `{command, inputs, result, version, elapsed_ms}` envelope.
pub fn envelope(command: &str, inputs: Value, result: Value, elapsed_ms: f64) -> Value {
    object([
        ("command", Value::String(command.into())),
        ("inputs", inputs),
        ("result", result),
        ("version", Value::String(crate::VERSION.into())),
        ("elapsed_ms", num(elapsed_ms)),
    ])
}

/// One CSV record of floats at 17 significant digits.
pub fn csv_row(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| g17(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(g17(6.0), "6");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0 / 36.0), "0.027777777777777776");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(-2.5e-300), "-2.5e-300");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 6.02e23, -7.25] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rendering_sorts_keys() {
        let v = object([("b", num(1.5)), ("a", num(f64::INFINITY))]);
        assert_eq!(render(&v), r#"{"a":"inf","b":1.5}"#);
    }
}
