//! Text formats: Gram matrices, found-class lists, mass tables, progress
//! logs and the run-configuration file. Parsers report line numbers.

use kneser_core::hunt::ProgressRow;
use kneser_core::matrix::IntMat;
use kneser_core::neighbors::NeighborSpec;
use kneser_core::roots::RootSystem;
use kneser_core::{Lattice, Rational};
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

#[derive(Debug)]
pub struct FormatError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}: {}", self.path, self.message)
        } else {
            write!(f, "{}:{}: {}", self.path, self.line, self.message)
        }
    }
}

impl std::error::Error for FormatError {}

fn err(path: &Path, line: usize, message: impl Into<String>) -> FormatError {
    FormatError { path: path.display().to_string(), line, message: message.into() }
}

/// Gram matrix text: first line `n`, then `n` lines of `n` integers.
pub fn read_gram(path: &Path) -> Result<Lattice, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| err(path, 0, e.to_string()))?;
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| err(path, 1, "empty file"))?;
    let n: usize = first
        .trim()
        .parse()
        .map_err(|_| err(path, 1, format!("expected the rank, found {first:?}")))?;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for k in 0..n {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| err(path, k + 1, format!("expected {n} matrix rows")))?;
        let row: Vec<BigInt> = line
            .split_whitespace()
            .map(|t| t.parse::<BigInt>())
            .collect::<Result<_, _>>()
            .map_err(|_| err(path, idx + 1, "bad integer entry"))?;
        if row.len() != n {
            return Err(err(path, idx + 1, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    Lattice::from_gram(IntMat::from_rows(rows)).map_err(|e| err(path, 1, e.to_string()))
}

pub fn write_gram(path: &Path, lat: &Lattice) -> Result<(), FormatError> {
    Ok(fs::write(path, render_gram(lat)).map_err(|e| err(path, 0, e.to_string()))?)
}

pub fn render_gram(lat: &Lattice) -> String {
    let n = lat.rank();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| lat.gram()[(i, j)].to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// `num/den`, always with the slash.
pub fn render_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::new(text.parse().ok()?, BigInt::one())),
    }
}

/// One found class per line:
/// `d:x1,...,xn:eps:mu_num/mu_den:beta_hex16:R_symbol` (no `eps` for odd d).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListEntry {
    pub spec: NeighborSpec,
    pub mu: Rational,
    pub beta: u64,
    pub root: RootSystem,
}

pub fn render_list_entry(e: &ListEntry) -> String {
    format!("{}:{}:{:016x}:{}", e.spec, render_rational(&e.mu), e.beta, e.root)
}

pub fn parse_list_entry(line: &str) -> Result<ListEntry, String> {
    let fields: Vec<&str> = line.trim().split(':').collect();
    // spec takes 2 fields for odd d, 3 for even
    let (spec_text, rest) = match fields.len() {
        5 => (fields[..2].join(":"), &fields[2..]),
        6 => (fields[..3].join(":"), &fields[3..]),
        k => return Err(format!("expected 5 or 6 fields, found {k}")),
    };
    let spec: NeighborSpec =
        spec_text.parse().map_err(|e| format!("bad neighbor spec: {e}"))?;
    let mu = parse_rational(rest[0]).ok_or("bad rational mass")?;
    let beta = u64::from_str_radix(rest[1].trim(), 16).map_err(|_| "bad hash field")?;
    let root: RootSystem = rest[2].parse().map_err(|_| "bad root system symbol")?;
    Ok(ListEntry { spec, mu, beta, root })
}

pub fn read_list(path: &Path) -> Result<Vec<ListEntry>, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| err(path, 0, e.to_string()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_list_entry(line).map_err(|m| err(path, i + 1, m))?);
    }
    Ok(out)
}

pub fn write_list(path: &Path, entries: &[ListEntry]) -> Result<(), FormatError> {
    let mut out = String::new();
    for e in entries {
        out.push_str(&render_list_entry(e));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| err(path, 0, e.to_string()))
}

/// Mass table: `R_symbol:num/den` per line.
pub fn read_mass_table(path: &Path) -> Result<BTreeMap<RootSystem, Rational>, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| err(path, 0, e.to_string()))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (sym, mass) = line
            .rsplit_once(':')
            .ok_or_else(|| err(path, i + 1, "expected R_symbol:num/den"))?;
        let root: RootSystem =
            sym.trim().parse().map_err(|_| err(path, i + 1, "bad root system symbol"))?;
        let mass =
            parse_rational(mass).ok_or_else(|| err(path, i + 1, "bad rational mass"))?;
        out.insert(root, mass);
    }
    Ok(out)
}

pub fn write_mass_table(
    path: &Path,
    table: &BTreeMap<RootSystem, Rational>,
) -> Result<(), FormatError> {
    let mut out = String::new();
    for (root, mass) in table {
        out.push_str(&format!("{root}:{}\n", render_rational(mass)));
    }
    fs::write(path, out).map_err(|e| err(path, 0, e.to_string()))
}

/// Progress log line: `d #iso #found #new remaining_num/remaining_den`.
pub fn render_progress_row(row: &ProgressRow) -> String {
    format!(
        "{} {} {} {} {}",
        row.d,
        row.n_iso,
        row.n_found,
        row.n_new,
        render_rational(&row.remaining)
    )
}

pub fn parse_progress_row(line: &str) -> Result<ProgressRow, String> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 5 {
        return Err(format!("expected 5 columns, found {}", f.len()));
    }
    Ok(ProgressRow {
        d: f[0].parse().map_err(|_| "bad d")?,
        n_iso: f[1].parse().map_err(|_| "bad #iso")?,
        n_found: f[2].parse().map_err(|_| "bad #found")?,
        n_new: f[3].parse().map_err(|_| "bad #new")?,
        remaining: parse_rational(f[4]).ok_or("bad remaining mass")?,
    })
}

/// Serializable run configuration; round-trips through a single TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_parity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmass: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chunk: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tries: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_table: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_list: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_progress: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        fs::write(path, self.to_toml()).map_err(|e| err(path, 0, e.to_string()))
    }

    pub fn read(path: &Path) -> Result<RunConfig, FormatError> {
        let text = fs::read_to_string(path).map_err(|e| err(path, 0, e.to_string()))?;
        Self::from_toml(&text).map_err(|m| err(path, 1, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use std::str::FromStr;

    #[test]
    fn gram_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("i3.gram");
        let lat = Lattice::standard(3);
        write_gram(&p, &lat).unwrap();
        let back = read_gram(&p).unwrap();
        assert_eq!(back.gram(), lat.gram());
    }

    #[test]
    fn gram_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.gram");
        fs::write(&p, "2\n1 0\n0 x\n").unwrap();
        let e = read_gram(&p).unwrap_err();
        assert_eq!(e.line, 3);
        fs::write(&p, "2\n1 0 0\n0 1\n").unwrap();
        let e = read_gram(&p).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn list_entry_round_trip() {
        let entries = [
            ListEntry {
                spec: NeighborSpec { d: 59, x: (1..=29).collect(), eps: None },
                mu: Rational::new(BigInt::from(1), BigInt::from(2)),
                beta: 0xdeadbeef01234567,
                root: RootSystem::from_str("0").unwrap(),
            },
            ListEntry {
                spec: NeighborSpec { d: 24, x: vec![1, 2, 3], eps: Some(1) },
                mu: Rational::new(BigInt::from(5), BigInt::from(24)),
                beta: 1,
                root: RootSystem::from_str("7A1+3A2+A7").unwrap(),
            },
        ];
        for e in &entries {
            let line = render_list_entry(e);
            let back = parse_list_entry(&line).unwrap();
            assert_eq!(&back, e);
        }
        assert!(parse_list_entry("garbage").is_err());
        assert!(parse_list_entry("59:1,2:0:1/2:ffff:0").is_err()); // eps on odd d
    }

    #[test]
    fn mass_table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mass.tbl");
        let mut table = BTreeMap::new();
        table.insert(
            RootSystem::from_str("2E8").unwrap(),
            Rational::new(BigInt::from(1), BigInt::from(2)),
        );
        table.insert(RootSystem::from_str("0").unwrap(), Rational::zero());
        write_mass_table(&p, &table).unwrap();
        assert_eq!(read_mass_table(&p).unwrap(), table);
    }

    #[test]
    fn progress_round_trip() {
        let row = ProgressRow {
            d: 23,
            n_iso: 55,
            n_found: 0,
            n_new: 0,
            remaining: Rational::new(BigInt::from(5), BigInt::from(24)),
        };
        let line = render_progress_row(&row);
        assert_eq!(line, "23 55 0 0 5/24");
        assert_eq!(parse_progress_row(&line).unwrap(), row);
    }

    #[test]
    fn config_round_trip() {
        let cfg = RunConfig {
            subcommand: "bne".into(),
            n: Some(28),
            d_min: Some(23),
            d_max: Some(27),
            d_parity: Some("any".into()),
            partition: Some(vec![8, 3, 3, 2, 2, 2, 2, 2, 2, 1, 1]),
            end: Some(0),
            root: Some("7A1+3A2+A7".into()),
            rmass: Some("5/24".into()),
            chunk: Some(4096),
            threads: Some(4),
            seed: Some(7),
            ..RunConfig::default()
        };
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg);
        // and reserializing is identical
        assert_eq!(back.to_toml(), text);
    }
}
