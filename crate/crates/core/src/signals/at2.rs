use std::fmt::Write as _;
use std::path::Path;

use super::{SignalError, TimeSeries, Unit};

/// An acceleration record as read from a PEER AT2 file.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundMotion {
    pub record_id: String,
    pub accel: TimeSeries,
    pub source_dt: f64,
}

impl GroundMotion {
    pub fn npts(&self) -> usize {
        self.accel.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Npts,
    Dt,
    Number(f64),
}

fn tokenize(line: &str) -> Vec<Token> {
    line.split(|c: char| c.is_whitespace() || c == ',' || c == '=' || c == ':')
        .filter(|t| !t.is_empty())
        .filter_map(|t| {
            let upper = t.to_ascii_uppercase();
            match upper.as_str() {
                "NPTS" => Some(Token::Npts),
                "DT" => Some(Token::Dt),
                _ => t.parse::<f64>().ok().map(Token::Number),
            }
        })
        .collect()
}

/// Reads NPTS and DT from the fourth header line. Both the keyed layout
/// (`NPTS=  4000, DT=   .0050 SEC`) and the legacy positional layout
/// (`4000   .0050   NPTS, DT`) are accepted.
fn parse_header(line: &str) -> Result<(usize, f64), SignalError> {
    let tokens = tokenize(line);
    let mut npts = None;
    let mut dt = None;
    let keyword_first = matches!(tokens.first(), Some(Token::Npts | Token::Dt));

    if keyword_first {
        let mut pending: Option<Token> = None;
        for tok in &tokens {
            match tok {
                Token::Npts | Token::Dt => pending = Some(*tok),
                Token::Number(v) => match pending.take() {
                    Some(Token::Npts) if npts.is_none() => npts = Some(*v),
                    Some(Token::Dt) if dt.is_none() => dt = Some(*v),
                    _ => {}
                },
            }
        }
    } else {
        let numbers: Vec<f64> = tokens
            .iter()
            .filter_map(|t| match t {
                Token::Number(v) => Some(*v),
                _ => None,
            })
            .take(2)
            .collect();
        let keywords: Vec<Token> = tokens
            .iter()
            .copied()
            .filter(|t| matches!(t, Token::Npts | Token::Dt))
            .collect();
        if numbers.len() == 2 {
            // positional numbers pair with the keyword order, NPTS then DT when unlabeled
            let order = if keywords.len() >= 2 { keywords[..2].to_vec() } else { vec![Token::Npts, Token::Dt] };
            for (kw, v) in order.iter().zip(numbers) {
                match kw {
                    Token::Npts => npts = Some(v),
                    Token::Dt => dt = Some(v),
                    Token::Number(_) => {}
                }
            }
        }
    }

    let npts = npts.ok_or_else(|| SignalError::MalformedHeader(format!("no NPTS value in `{}`", line.trim())))?;
    let dt = dt.ok_or_else(|| SignalError::MalformedHeader(format!("no DT value in `{}`", line.trim())))?;
    if !(npts >= 1.0 && npts.fract() == 0.0 && npts.is_finite()) {
        return Err(SignalError::MalformedHeader(format!("NPTS `{npts}` is not a positive integer")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SignalError::MalformedHeader(format!("DT `{dt}` is not positive")));
    }
    Ok((npts as usize, dt))
}

/// Parses the contents of a PEER AT2 file. Samples are in units of g.
pub fn parse_at2(text: &str) -> Result<GroundMotion, SignalError> {
    let mut lines = text.lines();
    let mut header = Vec::with_capacity(4);
    for _ in 0..4 {
        match lines.next() {
            Some(l) => header.push(l),
            None => return Err(SignalError::MalformedHeader(format!("expected 4 header lines, found {}", header.len()))),
        }
    }
    let (npts, dt) = parse_header(header[3])?;

    let mut values = Vec::with_capacity(npts);
    for tok in lines.flat_map(str::split_whitespace) {
        let index = values.len();
        // some exports write Fortran double-precision exponents
        let v: f64 = tok
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| SignalError::InvalidSample { index, token: tok.to_string() })?;
        if !v.is_finite() {
            return Err(SignalError::NonFiniteSample(index));
        }
        values.push(v);
    }
    if values.len() != npts {
        return Err(SignalError::SampleCountMismatch { declared: npts, parsed: values.len() });
    }

    let record_id = header[1]
        .split(',')
        .next()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .unwrap_or("unnamed")
        .to_string();
    Ok(GroundMotion {
        record_id,
        accel: TimeSeries::new(dt, values, Unit::StandardGravity)?,
        source_dt: dt,
    })
}

/// Reads an AT2 file; the record id is taken from an `RSN<digits>` file-name
/// prefix when present.
pub fn load_at2(path: &Path) -> Result<GroundMotion, SignalError> {
    let text = std::fs::read_to_string(path).map_err(|e| SignalError::IoFailure {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut gm = parse_at2(&text)?;
    if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
        let upper = stem.to_ascii_uppercase();
        if let Some(rest) = upper.strip_prefix("RSN") {
            let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
            if !digits.is_empty() {
                gm.record_id = format!("RSN{digits}");
            }
        }
    }
    Ok(gm)
}

/// Writes a motion in the NGA-West2 AT2 layout (five samples per line), with
/// enough digits that parsing the text back is exact.
pub fn to_at2_string(record_id: &str, description: &str, accel_g: &[f64], dt: f64) -> String {
    let mut out = String::new();
    out.push_str("PEER NGA STRONG MOTION DATABASE RECORD\n");
    let _ = writeln!(out, "{record_id}, {description}");
    out.push_str("ACCELERATION TIME SERIES IN UNITS OF G\n");
    let _ = writeln!(out, "NPTS={:>7}, DT={:>10} SEC", accel_g.len(), dt);
    for chunk in accel_g.chunks(5) {
        for v in chunk {
            let _ = write!(out, "{:>25.16E}", v);
        }
        out.push('\n');
    }
    out
}
