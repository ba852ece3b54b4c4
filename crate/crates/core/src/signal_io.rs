//! Loading, transforming and dyadically aligning input series.
//!
//! Everything downstream of this module works on a [`SignalPair`]: two
//! finite-valued series of identical length `2^J` with `J >= 4`. Inputs that
//! are not dyadic are truncated, never padded.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest dyadic exponent accepted for analysis.
pub const MIN_LOG2_LENGTH: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    Raw,
    Price,
    Return,
    Volatility,
    Measure,
    /// Running sum of another series.
    Profile,
}

/// A named, finite-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    name: String,
    values: Vec<f64>,
    kind: SignalKind,
}

impl Signal {
    pub fn new(name: impl Into<String>, values: Vec<f64>, kind: SignalKind) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::InvalidInput(format!("signal {name:?} is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "signal {name:?} has a non-finite value at index {i}"
            )));
        }
        if kind == SignalKind::Measure {
            if let Some(i) = values.iter().position(|&v| v < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "measure {name:?} has a negative value at index {i}"
                )));
            }
        }
        Ok(Signal { name, values, kind })
    }

    pub fn raw(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Signal::new(name, values, SignalKind::Raw)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SignalKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn with_kind(mut self, kind: SignalKind) -> Result<Self> {
        if kind == SignalKind::Measure && self.values.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "signal {:?} has negative values and cannot be a measure",
                self.name
            )));
        }
        self.kind = kind;
        Ok(self)
    }
}

/// Two signals of identical dyadic length.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalPair {
    x: Signal,
    y: Signal,
}

impl SignalPair {
    pub fn new(x: Signal, y: Signal) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "pair lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        check_dyadic(x.len())?;
        Ok(SignalPair { x, y })
    }

    pub fn x(&self) -> &Signal {
        &self.x
    }

    pub fn y(&self) -> &Signal {
        &self.y
    }

    pub fn length(&self) -> usize {
        self.x.len()
    }

    /// `J` such that `length == 2^J`.
    pub fn log2_length(&self) -> u32 {
        self.x.len().trailing_zeros()
    }

    pub fn into_parts(self) -> (Signal, Signal) {
        (self.x, self.y)
    }
}

pub(crate) fn check_dyadic(n: usize) -> Result<u32> {
    if !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "length {n} is not a power of two"
        )));
    }
    let log2 = n.trailing_zeros();
    if log2 < MIN_LOG2_LENGTH {
        return Err(Error::InvalidInput(format!(
            "length {n} is below the minimum of {}",
            1usize << MIN_LOG2_LENGTH
        )));
    }
    Ok(log2)
}

/// Column selector for CSV input: a zero-based index or a header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl Default for ColumnSelector {
    fn default() -> Self {
        ColumnSelector::Index(0)
    }
}

impl FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.trim().parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.trim().to_string()),
        })
    }
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Name(n) => write!(f, "{n:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            header: false,
        }
    }
}

/// Read one column of a delimited text file as a [`Signal`] of kind `Raw`.
///
/// Blank cells and non-finite numbers are rejected with the offending
/// 1-based line number; nothing is imputed.
pub fn load_series(path: &Path, column: &ColumnSelector, opts: &CsvOptions) -> Result<Signal> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    // The csv reader skips empty lines; a blank row inside the data is a gap.
    let lines: Vec<&str> = text.lines().collect();
    if let Some(last) = lines.iter().rposition(|l| !l.trim().is_empty()) {
        if let Some(i) = lines[..last].iter().position(|l| l.trim().is_empty()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                row: i as u64 + 1,
                value: String::new(),
            });
        }
    }
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let format_err = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };

    let index = match column {
        ColumnSelector::Index(i) => *i,
        ColumnSelector::Name(name) => {
            if !opts.header {
                return Err(Error::Config(format!(
                    "column {name:?} selected by name but the input has no header"
                )));
            }
            let headers = reader.headers().map_err(|e| format_err(e.to_string()))?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| format_err(format!("no column named {name:?}")))?
        }
    };

    let mut values = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(format_err(e.to_string())),
        }
        let row = record.position().map_or(0, |p| p.line());
        let cell = record.get(index).unwrap_or("");
        let value = cell.parse::<f64>().ok().filter(|v| v.is_finite());
        match value {
            Some(v) => values.push(v),
            None => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row,
                    value: cell.to_string(),
                })
            }
        }
    }

    if values.is_empty() {
        return Err(Error::EmptyColumn {
            path: path.to_path_buf(),
            column: column.to_string(),
        });
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Signal::raw(name, values)
}

/// `r[t] = ln p[t+1] - ln p[t]`.
pub fn log_returns(prices: &Signal) -> Result<Signal> {
    let p = prices.values();
    if p.len() < 2 {
        return Err(Error::InvalidInput(
            "log returns need at least two prices".into(),
        ));
    }
    if let Some(i) = p.iter().position(|&v| v <= 0.0) {
        return Err(Error::InvalidInput(format!(
            "non-positive price {} at index {i}",
            p[i]
        )));
    }
    let r = p.windows(2).map(|w| w[1].ln() - w[0].ln()).collect();
    Signal::new(prices.name(), r, SignalKind::Return)
}

/// Absolute returns.
pub fn volatility(returns: &Signal) -> Result<Signal> {
    match returns.kind() {
        SignalKind::Return | SignalKind::Volatility => {}
        other => {
            return Err(Error::InvalidInput(format!(
                "volatility expects returns, got a {other:?} series"
            )))
        }
    }
    let v = returns.values().iter().map(|r| r.abs()).collect();
    Signal::new(returns.name(), v, SignalKind::Volatility)
}

/// Running sum `F[t] = sum_{s <= t} x[s]`.
pub fn cumulative_sum(signal: &Signal) -> Signal {
    let mut acc = 0.0;
    let values = signal
        .values()
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    Signal {
        name: signal.name.clone(),
        values,
        kind: SignalKind::Profile,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignPolicy {
    /// Drop leading samples, keeping the most recent ones.
    #[default]
    TruncateHead,
    /// Drop trailing samples.
    TruncateTail,
}

/// Cut both series to the largest power of two not above the shorter length.
pub fn align_pair(x: &Signal, y: &Signal, policy: AlignPolicy) -> Result<SignalPair> {
    let shortest = x.len().min(y.len());
    let min_len = 1usize << MIN_LOG2_LENGTH;
    if shortest < min_len {
        return Err(Error::InvalidInput(format!(
            "series of length {shortest} is shorter than the minimum of {min_len}"
        )));
    }
    let n = 1usize << (usize::BITS - 1 - shortest.leading_zeros());
    let cut = |s: &Signal| {
        let v = s.values();
        let kept = match policy {
            AlignPolicy::TruncateHead => &v[v.len() - n..],
            AlignPolicy::TruncateTail => &v[..n],
        };
        Signal {
            name: s.name.clone(),
            values: kept.to_vec(),
            kind: s.kind,
        }
    };
    SignalPair::new(cut(x), cut(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    fn csv_file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn sig(v: &[f64], kind: SignalKind) -> Signal {
        Signal::new("t", v.to_vec(), kind).unwrap()
    }

    #[test]
    fn loads_plain_column() {
        let f = csv_file("1.0\n2.0\n3.0\n");
        let s = load_series(f.path(), &ColumnSelector::Index(0), &CsvOptions::default()).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.kind(), SignalKind::Raw);
    }

    #[test]
    fn loads_named_column_after_header() {
        let f = csv_file("close\n100\n101\n");
        let opts = CsvOptions {
            header: true,
            ..Default::default()
        };
        let s = load_series(f.path(), &"close".parse().unwrap(), &opts).unwrap();
        assert_eq!(s.values(), &[100.0, 101.0]);
    }

    #[test]
    fn selects_column_with_custom_delimiter() {
        let f = csv_file("a;b\n1;10\n2;20\n");
        let opts = CsvOptions {
            delimiter: b';',
            header: true,
        };
        let s = load_series(f.path(), &ColumnSelector::Index(1), &opts).unwrap();
        assert_eq!(s.values(), &[10.0, 20.0]);
    }

    #[test]
    fn bad_cell_reports_row() {
        let f = csv_file("1\n2\nabc\n4\n");
        let err = load_series(f.path(), &ColumnSelector::Index(0), &CsvOptions::default())
            .unwrap_err();
        match err {
            Error::Parse { row, ref value, .. } => {
                assert_eq!(row, 3);
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("row 3"));
    }

    #[test]
    fn blank_and_nan_cells_are_rejected() {
        let f = csv_file("1\n\"\"\n3\n");
        assert!(matches!(
            load_series(f.path(), &ColumnSelector::Index(0), &CsvOptions::default()),
            Err(Error::Parse { row: 2, .. })
        ));
        let f = csv_file("1\n\n3\n");
        assert!(matches!(
            load_series(f.path(), &ColumnSelector::Index(0), &CsvOptions::default()),
            Err(Error::Parse { row: 2, .. })
        ));
        let f = csv_file("1\nNaN\n");
        assert!(matches!(
            load_series(f.path(), &ColumnSelector::Index(0), &CsvOptions::default()),
            Err(Error::Parse { row: 2, .. })
        ));
    }

    #[test]
    fn missing_file_and_empty_column() {
        let err = load_series(
            Path::new("/nonexistent/prices.csv"),
            &ColumnSelector::Index(0),
            &CsvOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("/nonexistent/prices.csv"));

        let f = csv_file("close\n");
        let opts = CsvOptions {
            header: true,
            ..Default::default()
        };
        assert!(matches!(
            load_series(f.path(), &ColumnSelector::Index(0), &opts),
            Err(Error::EmptyColumn { .. })
        ));
    }

    #[test]
    fn log_return_examples() {
        let e = std::f64::consts::E;
        let r = log_returns(&sig(&[1.0, e, e], SignalKind::Price)).unwrap();
        assert_relative_eq!(r.values()[0], 1.0, epsilon = 1e-15);
        assert_eq!(r.values()[1], 0.0);
        assert_eq!(r.kind(), SignalKind::Return);

        let r = log_returns(&sig(&[100.0, 100.0], SignalKind::Price)).unwrap();
        assert_eq!(r.values(), &[0.0]);

        let r = log_returns(&sig(&[2.0, 8.0, 4.0], SignalKind::Price)).unwrap();
        assert_relative_eq!(r.values()[0], 4f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(r.values()[1], -(2f64.ln()), epsilon = 1e-15);
    }

    #[test]
    fn log_returns_reject_non_positive_prices() {
        let err = log_returns(&sig(&[1.0, 0.0, 2.0], SignalKind::Price)).unwrap_err();
        assert!(err.to_string().contains("index 1"));
        assert!(log_returns(&sig(&[1.0], SignalKind::Price)).is_err());
    }

    #[test]
    fn volatility_examples() {
        let v = volatility(&sig(&[-0.5, 0.5], SignalKind::Return)).unwrap();
        assert_eq!(v.values(), &[0.5, 0.5]);
        let v = volatility(&sig(&[0.0], SignalKind::Return)).unwrap();
        assert_eq!(v.values(), &[0.0]);
        let v = volatility(&sig(&[-1.0, 2.0, -3.0], SignalKind::Return)).unwrap();
        assert_eq!(v.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(v.kind(), SignalKind::Volatility);
        assert!(volatility(&sig(&[1.0], SignalKind::Price)).is_err());
    }

    #[test]
    fn align_examples() {
        let x = sig(&(0..10000).map(f64::from).collect::<Vec<_>>(), SignalKind::Raw);
        let y = sig(&(0..9000).map(f64::from).collect::<Vec<_>>(), SignalKind::Raw);
        let pair = align_pair(&x, &y, AlignPolicy::TruncateHead).unwrap();
        assert_eq!(pair.length(), 8192);
        assert_eq!(pair.x().values()[8191], 9999.0);
        assert_eq!(pair.y().values()[0], (9000 - 8192) as f64);

        let pair = align_pair(&x, &y, AlignPolicy::TruncateTail).unwrap();
        assert_eq!(pair.x().values()[0], 0.0);

        let a = sig(&vec![1.0; 8192], SignalKind::Raw);
        let pair = align_pair(&a, &a, AlignPolicy::TruncateHead).unwrap();
        assert_eq!(pair.x(), &a);

        let a = sig(&[1.0; 20], SignalKind::Raw);
        let b = sig(&[1.0; 17], SignalKind::Raw);
        assert_eq!(align_pair(&a, &b, AlignPolicy::TruncateHead).unwrap().length(), 16);

        let c = sig(&[1.0; 15], SignalKind::Raw);
        assert!(align_pair(&a, &c, AlignPolicy::TruncateHead).is_err());
    }

    #[test]
    fn signal_invariants() {
        assert!(Signal::raw("e", vec![]).is_err());
        assert!(Signal::raw("n", vec![1.0, f64::NAN]).is_err());
        assert!(Signal::new("m", vec![0.5, -0.1], SignalKind::Measure).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn returns_round_trip_to_prices(prices in prop::collection::vec(0.01f64..1e4, 2..200)) {
                let r = log_returns(&sig(&prices, SignalKind::Price)).unwrap();
                let mut rebuilt = vec![1.0];
                for v in r.values() {
                    let last = *rebuilt.last().unwrap();
                    rebuilt.push(last * v.exp());
                }
                let factor = prices[0];
                for (p, q) in prices.iter().zip(&rebuilt) {
                    prop_assert!(((q * factor) - p).abs() <= 1e-12 * p.abs());
                }
            }

            #[test]
            fn volatility_is_idempotent(r in prop::collection::vec(-1.0f64..1.0, 1..100)) {
                let v = volatility(&sig(&r, SignalKind::Return)).unwrap();
                let vv = volatility(&v).unwrap();
                prop_assert_eq!(v.values(), vv.values());
            }

            #[test]
            fn aligned_length_is_dyadic(nx in 16usize..5000, ny in 16usize..5000) {
                let x = sig(&vec![0.0; nx], SignalKind::Raw);
                let y = sig(&vec![0.0; ny], SignalKind::Raw);
                let pair = align_pair(&x, &y, AlignPolicy::TruncateHead).unwrap();
                prop_assert!(pair.length().is_power_of_two());
                prop_assert!(pair.length() <= nx && pair.length() <= ny);
                prop_assert!(pair.length() * 2 > nx.min(ny));
            }
        }
    }
}
