use std::fmt::Write;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Decimal with 17 significant digits, trailing zeros dropped; exponent
/// notation outside [1e-5, 1e17).
pub fn sig17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..17).contains(&exp) {
        let m = trim(&format!("{}.{}", &digits[..1], &digits[1..]));
        return format!("{sign}{m}e{exp}");
    }
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let point = exp as usize + 1;
        format!("{}.{}", &digits[..point], &digits[point..])
    };
    format!("{sign}{}", trim(&body))
}

fn trim(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Minimal CSV writer; fields containing separators are quoted.
#[derive(Debug, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut c = Csv::default();
        c.row(header.iter().map(|s| s.to_string()));
        c
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) {
        let mut first = true;
        for f in fields {
            if !first {
                self.out.push(',');
            }
            first = false;
            if f.contains([',', '"', '\n']) {
                let _ = write!(self.out, "\"{}\"", f.replace('"', "\"\""));
            } else {
                self.out.push_str(&f);
            }
        }
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn vector_field(v: &[f64]) -> String {
    v.iter().map(|x| sig17(*x)).collect::<Vec<_>>().join(" ")
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig17(11.0 / 49.0), "0.22448979591836735");
        assert_eq!(sig17(1.0), "1");
        assert_eq!(sig17(-2.5), "-2.5");
        assert_eq!(sig17(1e-9), "1.0000000000000001e-9");
        assert_eq!(sig17(2e-9), "2.0000000000000001e-9");
        assert_eq!(sig17(2f64.powi(-40)), "9.0949470177292824e-13");
        assert_eq!(sig17(123456.0), "123456");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(f64::INFINITY), "inf");
        for v in [std::f64::consts::PI, 1.0 / 3.0, 6.02e23, -7.5e-12, 0.000123] {
            assert_eq!(sig17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_quoting() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(["1,2".to_string(), "x".to_string()]);
        assert_eq!(c.finish(), "a,b\n\"1,2\",x\n");
    }
}
