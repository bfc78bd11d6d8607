//! Success-probability time series and their serialized forms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::UnitarySpec;

/// Parameters a trace was produced with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub n: usize,
    pub w: usize,
    pub unitary: UnitarySpec,
    pub sites: Vec<usize>,
    pub p: f64,
    pub mu: f64,
}

/// A simulated success-probability series, starting at t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub meta: TraceMeta,
    /// `(t, P(t))` with t strictly increasing from 0.
    pub series: Vec<(usize, f64)>,
}

/// Format a float with 12 significant digits, the CSV schema's precision.
pub fn fmt_sig12(v: f64) -> String {
    format!("{v:.11e}")
}

impl SimulationTrace {
    pub fn new(meta: TraceMeta, series: Vec<(usize, f64)>) -> Result<Self> {
        if series.is_empty() || series[0].0 != 0 {
            return Err(Error::Parse("trace must start at t = 0".into()));
        }
        for pair in series.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Parse("trace times must strictly increase".into()));
            }
        }
        for &(t, p) in &series {
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::Consistency(format!(
                    "P({t}) = {p} outside [0, 1]"
                )));
            }
        }
        Ok(SimulationTrace { meta, series })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.series.iter().map(|&(_, p)| p).collect()
    }

    pub fn value_at(&self, t: usize) -> Option<f64> {
        self.series
            .iter()
            .find(|&&(time, _)| time == t)
            .map(|&(_, p)| p)
    }

    /// Largest pointwise difference to another trace over shared times.
    pub fn max_difference(&self, other: &SimulationTrace) -> Result<f64> {
        if self.series.len() != other.series.len() {
            return Err(Error::Shape {
                left: self.series.len(),
                right: other.series.len(),
            });
        }
        let mut max = 0.0f64;
        for (&(ta, pa), &(tb, pb)) in self.series.iter().zip(&other.series) {
            if ta != tb {
                return Err(Error::Parse("traces have different time grids".into()));
            }
            max = max.max((pa - pb).abs());
        }
        Ok(max)
    }

    /// Pointwise comparison within `tol`, same time grid required.
    pub fn approx_eq(&self, other: &SimulationTrace, tol: f64) -> bool {
        matches!(self.max_difference(other), Ok(d) if d <= tol)
    }

    /// CSV form: `#`-prefixed parameter header, then `t,P` rows with 12
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# groverns simulation trace\n");
        out.push_str(&format!("# n: {}\n", self.meta.n));
        out.push_str(&format!("# w: {}\n", self.meta.w));
        out.push_str(&format!("# unitary: {}\n", self.meta.unitary));
        out.push_str(&format!(
            "# sites: {}\n",
            self.meta
                .sites
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        ));
        out.push_str(&format!("# p: {}\n", self.meta.p));
        out.push_str(&format!("# mu: {}\n", self.meta.mu));
        out.push_str("t,P\n");
        for &(t, p) in &self.series {
            out.push_str(&format!("{t},{}\n", fmt_sig12(p)));
        }
        out
    }

    /// Parse the CSV form back. Values compare equal to the source trace
    /// within the emission precision (12 significant digits).
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut n = None;
        let mut w = None;
        let mut unitary: Option<UnitarySpec> = None;
        let mut sites: Vec<usize> = Vec::new();
        let mut p = None;
        let mut mu = None;
        let mut series: Vec<(usize, f64)> = Vec::new();
        let mut in_data = false;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some((key, value)) = comment.split_once(':') {
                    let value = value.trim();
                    match key.trim() {
                        "n" => n = Some(parse_num::<usize>(value)?),
                        "w" => w = Some(parse_num::<usize>(value)?),
                        "unitary" => unitary = Some(parse_unitary(value)?),
                        "sites" => {
                            if !value.is_empty() {
                                for s in value.split(',') {
                                    sites.push(parse_num::<usize>(s.trim())?);
                                }
                            }
                        }
                        "p" => p = Some(parse_num::<f64>(value)?),
                        "mu" => mu = Some(parse_num::<f64>(value)?),
                        _ => {}
                    }
                }
                continue;
            }
            if line == "t,P" {
                in_data = true;
                continue;
            }
            if in_data {
                let (t, prob) = line
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("bad data row '{line}'")))?;
                series.push((parse_num::<usize>(t)?, parse_num::<f64>(prob)?));
            }
        }
        let meta = TraceMeta {
            n: n.ok_or_else(|| Error::Parse("missing '# n:' header".into()))?,
            w: w.ok_or_else(|| Error::Parse("missing '# w:' header".into()))?,
            unitary: unitary.ok_or_else(|| Error::Parse("missing '# unitary:' header".into()))?,
            sites,
            p: p.ok_or_else(|| Error::Parse("missing '# p:' header".into()))?,
            mu: mu.ok_or_else(|| Error::Parse("missing '# mu:' header".into()))?,
        };
        SimulationTrace::new(meta, series)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim()
        .parse::<T>()
        .map_err(|e| Error::Parse(format!("'{s}': {e}")))
}

fn parse_unitary(value: &str) -> Result<UnitarySpec> {
    if !value.contains('=') {
        return Ok(UnitarySpec::named(value));
    }
    let mut a_re = 0.0;
    let mut a_im = 0.0;
    let mut b_re = 0.0;
    let mut b_im = 0.0;
    let mut theta = 0.0;
    let mut phi = 0.0;
    for part in value.split_whitespace() {
        let (key, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad unitary field '{part}'")))?;
        match key {
            "a" => (a_re, a_im) = parse_complex(v)?,
            "b" => (b_re, b_im) = parse_complex(v)?,
            "theta" => theta = parse_num(v)?,
            "phi" => phi = parse_num(v)?,
            _ => return Err(Error::Parse(format!("unknown unitary field '{key}'"))),
        }
    }
    Ok(UnitarySpec::Params {
        a_re,
        a_im,
        b_re,
        b_im,
        theta,
        phi,
    })
}

fn parse_complex(s: &str) -> Result<(f64, f64)> {
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| Error::Parse(format!("complex value '{s}' must end in 'i'")))?;
    // Split at the sign of the imaginary part (skip a leading sign).
    for (idx, ch) in body.char_indices().skip(1) {
        if (ch == '+' || ch == '-') && !matches!(&body[idx - 1..idx], "e" | "E") {
            let re = parse_num::<f64>(&body[..idx])?;
            let im = parse_num::<f64>(&body[idx..])?;
            return Ok((re, im));
        }
    }
    Err(Error::Parse(format!("cannot split complex value '{s}'")))
}
