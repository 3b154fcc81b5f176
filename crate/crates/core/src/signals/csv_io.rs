use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::SignalError;

/// Column order of a simulation record CSV.
pub const RECORD_COLUMNS: [&str; 12] = [
    "t", "r", "dt_cmd", "d_table", "v_table", "a_table", "d1", "d2", "a1_abs", "a2_abs", "F", "V_lyap",
];

/// Named, equal-length numeric columns in a fixed order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Columns {
    names: Vec<String>,
    data: Vec<Vec<f64>>,
}

impl Columns {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), SignalError> {
        if let Some(first) = self.data.first() {
            if first.len() != values.len() {
                return Err(SignalError::LengthMismatch(first.len(), values.len()));
            }
        }
        self.names.push(name.into());
        self.data.push(values);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.data[i].as_slice())
    }

    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// Sample interval implied by a `t` column, when it is uniform.
    pub fn uniform_dt(&self) -> Result<f64, SignalError> {
        let t = self.get("t").ok_or_else(|| SignalError::SchemaMismatch("missing column `t`".into()))?;
        if t.len() < 2 {
            return Err(SignalError::TooShort(t.len(), 2));
        }
        let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
        let uniform = t.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(f64::MIN_POSITIVE));
        if !(dt > 0.0) || !uniform {
            return Err(SignalError::SchemaMismatch("`t` is not strictly increasing with uniform spacing".into()));
        }
        Ok(dt)
    }
}

fn io_err(path: &Path, e: impl ToString) -> SignalError {
    SignalError::IoFailure { path: path.display().to_string(), message: e.to_string() }
}

/// Writes columns as CSV with 17 significant digits per value.
pub fn write_csv(columns: &Columns, path: &Path) -> Result<(), SignalError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    write_csv_to(columns, &mut w).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes columns as CSV to any sink.
pub fn write_csv_to(columns: &Columns, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{}", columns.names.join(","))?;
    let mut line = String::with_capacity(columns.names.len() * 25);
    for row in 0..columns.rows() {
        line.clear();
        for (i, col) in columns.data.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            use std::fmt::Write as _;
            let _ = write!(line, "{:.16e}", col[row]);
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Reads every column of a headed numeric CSV.
pub fn read_csv(path: &Path) -> Result<Columns, SignalError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| SignalError::SchemaMismatch(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut data = vec![Vec::new(); names.len()];
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| SignalError::SchemaMismatch(e.to_string()))?;
        if rec.len() != names.len() {
            return Err(SignalError::SchemaMismatch(format!("row {} has {} fields", row + 1, rec.len())));
        }
        for (col, field) in data.iter_mut().zip(rec.iter()) {
            let v = field
                .trim()
                .parse::<f64>()
                .map_err(|_| SignalError::SchemaMismatch(format!("row {}: `{field}` is not a number", row + 1)))?;
            col.push(v);
        }
    }
    Ok(Columns { names, data })
}

/// Reads a simulation record CSV and checks the column schema.
pub fn read_record_csv(path: &Path) -> Result<Columns, SignalError> {
    let cols = read_csv(path)?;
    for name in RECORD_COLUMNS {
        if cols.get(name).is_none() {
            return Err(SignalError::SchemaMismatch(format!("missing column `{name}`")));
        }
    }
    Ok(cols)
}
