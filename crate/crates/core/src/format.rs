//! Rendering of series as canonical text, LaTeX or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::ring::{self, GradedSeries, Monomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            _ => Err(ParseError::new(0, format!("unknown format `{s}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coef: String,
    q: u32,
    t: i32,
    a: u32,
}

#[derive(Serialize, Deserialize)]
struct JsonSeries {
    format: String,
    denom: u32,
    terms: Vec<JsonTerm>,
}

fn power(s: &mut String, var: &str, e: i64) {
    match e {
        0 => {}
        1 => s.push_str(var),
        _ => {
            let _ = write!(s, "{var}^{{{e}}}");
        }
    }
}

fn latex_numerator(x: &GradedSeries) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in x.numerator().terms().enumerate() {
        let neg = c.is_negative();
        if i > 0 {
            s.push_str(if neg { " - " } else { " + " });
        } else if neg {
            s.push('-');
        }
        let abs = c.abs();
        let unit = *m == Monomial::ONE;
        if !abs.is_one() || unit {
            let _ = write!(s, "{abs}");
        }
        power(&mut s, "q", m.q as i64);
        power(&mut s, "t", m.t as i64);
        power(&mut s, "a", m.a as i64);
    }
    s
}

pub fn format_series(x: &GradedSeries, format: Format) -> String {
    match format {
        Format::Text => x.to_canonical_text(),
        Format::Latex => {
            let num = latex_numerator(x);
            match x.denom_exp() {
                0 => format!("{num}\n"),
                1 => format!("\\frac{{{num}}}{{1-q}}\n"),
                e => format!("\\frac{{{num}}}{{(1-q)^{{{e}}}}}\n"),
            }
        }
        Format::Json => {
            let v = JsonSeries {
                format: "series v1".into(),
                denom: x.denom_exp(),
                terms: x
                    .numerator()
                    .terms()
                    .map(|(m, c)| JsonTerm {
                        coef: c.to_string(),
                        q: m.q,
                        t: m.t,
                        a: m.a,
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&v).expect("series serializes");
            s.push('\n');
            s
        }
    }
}

/// Inverse of [`format_series`] for the text and JSON forms.
pub fn parse_series(text: &str, format: Format) -> Result<GradedSeries, ParseError> {
    match format {
        Format::Text => GradedSeries::parse_canonical_text(text),
        Format::Json => {
            let v: JsonSeries = serde_json::from_str(text).map_err(|e| ParseError::new(e.line(), e.to_string()))?;
            if v.format != "series v1" {
                return Err(ParseError::new(0, format!("unknown format tag `{}`", v.format)));
            }
            let terms = v
                .terms
                .into_iter()
                .map(|t| {
                    let c: BigInt = t
                        .coef
                        .parse()
                        .map_err(|_| ParseError::new(0, format!("bad coefficient `{}`", t.coef)))?;
                    Ok((Monomial::new(t.q, t.t, t.a), c))
                })
                .collect::<Result<Vec<_>, ParseError>>()?;
            ring::build_checked(terms, v.denom)
        }
        Format::Latex => Err(ParseError::new(0, "LaTeX output is not parsed back")),
    }
}
