//! Versioned CSV schema shared by every harness output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::config::{FixedVar, MechanismKind};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Column names in write order. Readers look columns up by name.
pub const COLUMNS: [&str; 18] = [
    "schema_version",
    "mechanism",
    "zeta",
    "I_bar_P_dB",
    "P_max_dB",
    "trial",
    "trial_seed",
    "selected_relay",
    "P_S",
    "P_Rk",
    "phi_opt",
    "rate",
    "oracle_rate",
    "gap_percent",
    "iterations",
    "converged",
    "fixed",
    "sweep_dB",
];

/// One output record. `fixed` and `sweep_dB` are set only by the
/// fixed-power sweep, which holds `fixed` at its configured value and sets
/// the other power to `sweep_dB`.
#[derive(Debug, Clone, PartialEq)]
#[allow(non_snake_case)]
pub struct ResultRow {
    pub mechanism: MechanismKind,
    pub zeta: f64,
    pub I_bar_P_dB: f64,
    pub P_max_dB: f64,
    pub trial: usize,
    pub trial_seed: u64,
    pub selected_relay: usize,
    pub P_S: f64,
    pub P_Rk: f64,
    pub phi_opt: Option<f64>,
    pub rate: f64,
    pub oracle_rate: Option<f64>,
    pub gap_percent: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub fixed: Option<FixedVar>,
    pub sweep_dB: Option<f64>,
}

/// Relative shortfall of `rate` against `oracle`, in percent. A zero oracle
/// rate leaves the gap undefined unless the rate is zero too.
pub fn gap_percent(rate: f64, oracle: f64) -> Option<f64> {
    if oracle > 0.0 {
        Some(100.0 * (oracle - rate) / oracle)
    } else if rate == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// `%.10g`: ten significant digits, trailing zeros dropped, exponent form
/// outside `[1e-4, 1e10)`.
pub fn format_float(x: f64) -> String {
    const DIGITS: i32 = 10;
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp).max(0) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

impl ResultRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            SCHEMA_VERSION.to_string(),
            self.mechanism.name().into(),
            format_float(self.zeta),
            format_float(self.I_bar_P_dB),
            format_float(self.P_max_dB),
            self.trial.to_string(),
            self.trial_seed.to_string(),
            self.selected_relay.to_string(),
            format_float(self.P_S),
            format_float(self.P_Rk),
            opt_float(self.phi_opt),
            format_float(self.rate),
            opt_float(self.oracle_rate),
            opt_float(self.gap_percent),
            self.iterations.to_string(),
            self.converged.to_string(),
            self.fixed.map(|f| f.name().to_string()).unwrap_or_default(),
            opt_float(self.sweep_dB),
        ]
    }

    /// Parses a record given the column index of every name in [`COLUMNS`].
    fn from_record(index: &[usize; COLUMNS.len()], rec: &csv::StringRecord) -> Result<Self> {
        let line = rec.position().map_or(0, |p| p.line());
        let field = |c: usize| rec.get(index[c]).unwrap_or("");
        let bad = |c: usize| Error::Config(format!("line {line}: bad {} value {:?}", COLUMNS[c], field(c)));
        let float = |c: usize| field(c).parse::<f64>().map_err(|_| bad(c));
        let opt = |c: usize| match field(c) {
            "" => Ok(None),
            s => s.parse::<f64>().map(Some).map_err(|_| bad(c)),
        };
        let int = |c: usize| field(c).parse::<u64>().map_err(|_| bad(c));
        if field(0).parse::<u32>().map_err(|_| bad(0))? != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "line {line}: schema_version {} is not {SCHEMA_VERSION}",
                field(0)
            )));
        }
        Ok(Self {
            mechanism: MechanismKind::parse(field(1)).ok_or_else(|| bad(1))?,
            zeta: float(2)?,
            I_bar_P_dB: float(3)?,
            P_max_dB: float(4)?,
            trial: int(5)? as usize,
            trial_seed: int(6)?,
            selected_relay: int(7)? as usize,
            P_S: float(8)?,
            P_Rk: float(9)?,
            phi_opt: opt(10)?,
            rate: float(11)?,
            oracle_rate: opt(12)?,
            gap_percent: opt(13)?,
            iterations: int(14)? as usize,
            converged: field(15).parse::<bool>().map_err(|_| bad(15))?,
            fixed: match field(16) {
                "" => None,
                "P_S" => Some(FixedVar::SourcePower),
                "P_Rk" => Some(FixedVar::RelayPower),
                _ => return Err(bad(16)),
            },
            sweep_dB: opt(17)?,
        })
    }
}

/// Writes `rows` under the schema header. Unless `deterministic`, a
/// `# generated ...` comment line with the wall-clock time comes first.
pub fn write_rows(path: &Path, rows: &[ResultRow], deterministic: bool) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    if !deterministic {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        writeln!(out, "# generated unix_time={secs}").map_err(|e| Error::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.to_record())?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Header of a schema CSV, mapped to the position of every known column.
pub(crate) fn column_index(headers: &csv::StringRecord) -> Result<[usize; COLUMNS.len()]> {
    let mut index = [0; COLUMNS.len()];
    for (c, name) in COLUMNS.iter().enumerate() {
        index[c] = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| Error::Config(format!("CSV header lacks column {name:?}")))?;
    }
    Ok(index)
}

pub(crate) fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

/// Reads a CSV written by [`write_rows`]; columns may appear in any order.
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = reader(path)?;
    let index = column_index(rdr.headers()?)?;
    rdr.records()
        .map(|rec| ResultRow::from_record(&index, &rec?))
        .collect()
}
