//! Number formatting and table output.

use std::io::Write;

use dessin_core::scalar::{fmt_f64, fmt_rational, Rational};
use num_complex::Complex64;
use serde_json::{json, Value};

pub fn exact(q: &Rational) -> Value {
    Value::String(fmt_rational(q))
}

pub fn real(x: f64) -> Value {
    Value::String(fmt_f64(x))
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": fmt_f64(z.re), "im": fmt_f64(z.im) })
}

pub fn opt_complex(z: Option<Complex64>) -> Value {
    z.map(complex).unwrap_or(Value::Null)
}

/// Pretty JSON on stdout; a closed pipe is not an error.
pub fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    let _ = writeln!(std::io::stdout().lock(), "{}", text);
}

pub fn print_csv(header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    match w.flush() {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}
