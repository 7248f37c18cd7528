use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{SweepError, SweepRow};

pub const CSV_HEADER: &str = "omega0,mean,std_error,n,p_est,delta_e_eff";

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> SweepError + '_ {
    move |source| SweepError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Minimum significant digits printed for each float.
pub const MIN_SIGNIFICANT_DIGITS: usize = 10;

/// Shortest decimal that parses back to `x`, padded with trailing zeros to
/// at least [`MIN_SIGNIFICANT_DIGITS`] significant digits.
pub fn format_float(x: f64) -> String {
    let mut s = format!("{x}");
    if !x.is_finite() {
        return s;
    }
    if !s.contains('.') {
        s.push('.');
    }
    let digits: String = s.chars().filter(char::is_ascii_digit).collect();
    let significant = digits.trim_start_matches('0').len();
    // zero has no significant digits of its own; count the leading one
    let have = if significant == 0 { 1 } else { significant };
    for _ in have..MIN_SIGNIFICANT_DIGITS {
        s.push('0');
    }
    s
}

/// Writes `# ` metadata lines, the header, and one line per row.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow], metadata: &[String]) -> io::Result<()> {
    write_preamble(&mut out, metadata)?;
    for r in rows {
        write_row(&mut out, r)?;
    }
    out.flush()
}

fn write_preamble<W: Write>(out: &mut W, metadata: &[String]) -> io::Result<()> {
    for line in metadata {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{CSV_HEADER}")
}

fn write_row<W: Write>(out: &mut W, r: &SweepRow) -> io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{}",
        format_float(r.omega0),
        format_float(r.mean),
        format_float(r.std_error),
        r.n,
        format_float(r.p_est),
        format_float(r.delta_e_eff)
    )
}

pub fn emit_csv(rows: &[SweepRow], path: &Path, metadata: &[String]) -> Result<(), SweepError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_csv(BufWriter::new(file), rows, metadata).map_err(io_err(path))
}

/// Appends rows to a CSV file as they arrive, flushing after each one so a
/// failed sweep leaves every finished row on disk.
pub struct CsvSink<W: Write = BufWriter<File>> {
    path: PathBuf,
    out: W,
}

impl CsvSink {
    pub fn create(path: &Path, metadata: &[String]) -> Result<Self, SweepError> {
        let file = File::create(path).map_err(io_err(path))?;
        CsvSink::from_writer(BufWriter::new(file), path, metadata)
    }
}

impl<W: Write> CsvSink<W> {
    /// Wraps any writer; `label` names it in I/O errors.
    pub fn from_writer(mut out: W, label: &Path, metadata: &[String]) -> Result<Self, SweepError> {
        write_preamble(&mut out, metadata)
            .and_then(|_| out.flush())
            .map_err(io_err(label))?;
        Ok(Self {
            path: label.to_path_buf(),
            out,
        })
    }

    pub fn push(&mut self, row: &SweepRow) -> Result<(), SweepError> {
        write_row(&mut self.out, row)
            .and_then(|_| self.out.flush())
            .map_err(io_err(&self.path))
    }
}

/// Reads rows written by [`write_csv`], skipping `#` lines.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<SweepRow>, SweepError> {
    let bad = |line: usize, message: String| SweepError::Csv { line, message };
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| bad(i + 1, e.to_string()))?;
        if line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != CSV_HEADER {
                return Err(bad(i + 1, format!("expected header `{CSV_HEADER}`")));
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(
                i + 1,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let num = |k: usize| -> Result<f64, SweepError> {
            fields[k]
                .parse()
                .map_err(|e| bad(i + 1, format!("field {}: {e}", k + 1)))
        };
        rows.push(SweepRow {
            omega0: num(0)?,
            mean: num(1)?,
            std_error: num(2)?,
            n: fields[3]
                .parse()
                .map_err(|e| bad(i + 1, format!("field 4: {e}")))?,
            p_est: num(4)?,
            delta_e_eff: num(5)?,
        });
    }
    if !header_seen {
        return Err(bad(0, "missing header".into()));
    }
    Ok(rows)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<SweepRow>, SweepError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_csv(BufReader::new(file))
}
