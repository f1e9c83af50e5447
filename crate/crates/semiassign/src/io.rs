//! File formats consumed and produced by the CLI.
//!
//! Problem files: a header row `caps,<m_1>,...,<m_n>` followed by `m` rows of
//! `n` comma-separated decimal costs (UTF-8, `.` decimal separator).
//!
//! Sample files: a header whose first token is `#dy=<d_y>` followed by the
//! column names `y_1..y_{d_y},z_1..z_{d_z}`; each data row carries the
//! `d_y + d_z` coordinates of one sample.
//!
//! Payoff files: plain numeric CSV, optionally preceded by a sidecar
//! capacities line `caps,<c_1>,...` naming per-column capacities.
//!
//! Benchmark records: `solver,case,n,trial,seed,op_count,elapsed_ns,objective`
//! with decimal integers everywhere except the objective, which uses the
//! shortest round-trip decimal.

use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::Array2;

use crate::bench::BenchRecord;
use crate::builders::SampleSet;
use crate::error::{Error, Result};
use crate::graph::SemiAssignProblem;

fn parse_usize(token: &str, context: &str) -> Result<usize> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{}: invalid integer '{}'", context, token.trim())))
}

fn parse_f64(token: &str, context: &str) -> Result<f64> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{}: invalid number '{}'", context, token.trim())))
}

fn numeric_row(line: &str, line_no: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|tok| parse_f64(tok, &format!("line {}", line_no)))
        .collect()
}

/// Reads a problem file: `caps` header plus cost rows.
pub fn read_problem(reader: impl BufRead) -> Result<SemiAssignProblem> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty problem file".into()))??;
    let mut tokens = header.split(',');
    match tokens.next() {
        Some(first) if first.trim() == "caps" => {}
        _ => {
            return Err(Error::Parse(
                "problem file must start with a 'caps,<m_1>,...' header".into(),
            ))
        }
    }
    let caps: Vec<usize> = tokens
        .map(|tok| parse_usize(tok, "caps header"))
        .collect::<Result<_>>()?;
    if caps.is_empty() {
        return Err(Error::Parse("caps header lists no capacities".into()));
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = numeric_row(&line, idx + 2)?;
        if row.len() != caps.len() {
            return Err(Error::Parse(format!(
                "line {}: expected {} costs, found {}",
                idx + 2,
                caps.len(),
                row.len()
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("problem file has no cost rows".into()));
    }
    let m = rows.len();
    let n = caps.len();
    let cost =
        Array2::from_shape_vec((m, n), rows.into_iter().flatten().collect()).expect("shape");
    SemiAssignProblem::new(cost, caps)
}

pub fn read_problem_file(path: impl AsRef<Path>) -> Result<SemiAssignProblem> {
    let file = std::fs::File::open(path)?;
    read_problem(std::io::BufReader::new(file))
}

/// Writes a problem in the same format `read_problem` accepts.
pub fn write_problem(mut writer: impl Write, problem: &SemiAssignProblem) -> Result<()> {
    write!(writer, "caps")?;
    for c in problem.caps() {
        write!(writer, ",{}", c)?;
    }
    writeln!(writer)?;
    for i in 0..problem.m() {
        for j in 0..problem.n() {
            if j > 0 {
                write!(writer, ",")?;
            }
            write!(writer, "{}", problem.cost()[(i, j)])?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// Reads a sample file; the mandatory `#dy=<d_y>` header token splits each
/// row into its y and z parts.
pub fn read_samples(reader: impl BufRead) -> Result<SampleSet> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty samples file".into()))??;
    let mut tokens = header.split(',');
    let first = tokens.next().unwrap_or("").trim();
    let dy = match first.strip_prefix("#dy=") {
        Some(v) => parse_usize(v, "#dy header")?,
        None => {
            return Err(Error::Parse(
                "samples file must start with a '#dy=<d_y>' header token".into(),
            ))
        }
    };
    if dy == 0 {
        return Err(Error::Parse("#dy must be positive".into()));
    }
    let names: Vec<&str> = tokens.map(|t| t.trim()).collect();
    if names.len() <= dy {
        return Err(Error::Parse(format!(
            "header names {} columns but #dy={} requires at least {}",
            names.len(),
            dy,
            dy + 1
        )));
    }
    let width = names.len();

    let mut y = Vec::new();
    let mut z = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = numeric_row(&line, idx + 2)?;
        if row.len() != width {
            return Err(Error::Parse(format!(
                "line {}: expected {} values, found {}",
                idx + 2,
                width,
                row.len()
            )));
        }
        y.push(row[..dy].to_vec());
        z.push(row[dy..].to_vec());
    }
    SampleSet::new(y, z)
}

pub fn read_samples_file(path: impl AsRef<Path>) -> Result<SampleSet> {
    let file = std::fs::File::open(path)?;
    read_samples(std::io::BufReader::new(file))
}

/// Writes samples in the format `read_samples` accepts.
pub fn write_samples(mut writer: impl Write, samples: &SampleSet) -> Result<()> {
    let (dy, dz) = (samples.dim_y(), samples.dim_z());
    write!(writer, "#dy={}", dy)?;
    for k in 1..=dy {
        write!(writer, ",y_{}", k)?;
    }
    for k in 1..=dz {
        write!(writer, ",z_{}", k)?;
    }
    writeln!(writer)?;
    for (yv, zv) in samples.y().iter().zip(samples.z()) {
        let mut first = true;
        for v in yv.iter().chain(zv) {
            if !first {
                write!(writer, ",")?;
            }
            write!(writer, "{}", v)?;
            first = false;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// Reads a payoff matrix, returning the sidecar capacities when the file
/// starts with a `caps,...` line.
pub fn read_payoff(reader: impl BufRead) -> Result<(Array2<f64>, Option<Vec<usize>>)> {
    let mut caps: Option<Vec<usize>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if rows.is_empty() && caps.is_none() && trimmed.starts_with("caps") {
            caps = Some(
                trimmed
                    .split(',')
                    .skip(1)
                    .map(|tok| parse_usize(tok, "caps line"))
                    .collect::<Result<_>>()?,
            );
            continue;
        }
        let row = numeric_row(trimmed, idx + 1)?;
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} values, found {}",
                    idx + 1,
                    prev.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("payoff file has no rows".into()));
    }
    let (m, n) = (rows.len(), rows[0].len());
    let payoff =
        Array2::from_shape_vec((m, n), rows.into_iter().flatten().collect()).expect("shape");
    Ok((payoff, caps))
}

pub fn read_payoff_file(path: impl AsRef<Path>) -> Result<(Array2<f64>, Option<Vec<usize>>)> {
    let file = std::fs::File::open(path)?;
    read_payoff(std::io::BufReader::new(file))
}

pub const RECORDS_HEADER: &str = "solver,case,n,trial,seed,op_count,elapsed_ns,objective";

/// Writes benchmark records with the fixed column order.
pub fn write_records(mut writer: impl Write, records: &[BenchRecord]) -> Result<()> {
    writeln!(writer, "{}", RECORDS_HEADER)?;
    for r in records {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{}",
            r.solver.as_str(),
            r.case.as_str(),
            r.n,
            r.trial,
            r.seed,
            r.op_count,
            r.elapsed_ns,
            r.objective
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Solver;
    use crate::synth::Case;
    use std::io::Cursor;

    #[test]
    fn problem_round_trip() {
        let text = "caps,2,2\n1,2\n3,0\n2,2\n0,5\n";
        let p = read_problem(Cursor::new(text)).unwrap();
        assert_eq!((p.m(), p.n()), (4, 2));
        assert_eq!(p.caps(), &[2, 2]);
        assert_eq!(p.cost()[(3, 1)], 5.0);

        let mut out = Vec::new();
        write_problem(&mut out, &p).unwrap();
        let again = read_problem(Cursor::new(out)).unwrap();
        assert_eq!(again.cost(), p.cost());
        assert_eq!(again.caps(), p.caps());
    }

    #[test]
    fn problem_rejects_malformed_input() {
        assert!(read_problem(Cursor::new("")).is_err());
        assert!(read_problem(Cursor::new("1,2\n3,4\n")).is_err());
        assert!(read_problem(Cursor::new("caps,1,1\n1\n2\n")).is_err());
        assert!(read_problem(Cursor::new("caps,1,1\n1,x\n2,3\n")).is_err());
        // structurally fine but invalid as an instance
        assert!(matches!(
            read_problem(Cursor::new("caps,1,2\n1,2\n3,4\n")),
            Err(Error::CapacityMismatch { .. })
        ));
    }

    #[test]
    fn samples_round_trip() {
        let text = "#dy=2,y_1,y_2,z_1\n0.5,1.5,-3\n2,0,4.25\n";
        let s = read_samples(Cursor::new(text)).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim_y(), 2);
        assert_eq!(s.dim_z(), 1);
        assert_eq!(s.z()[1], vec![4.25]);

        let mut out = Vec::new();
        write_samples(&mut out, &s).unwrap();
        let again = read_samples(Cursor::new(out)).unwrap();
        assert_eq!(again.y(), s.y());
        assert_eq!(again.z(), s.z());
    }

    #[test]
    fn samples_require_the_dy_token() {
        assert!(read_samples(Cursor::new("y_1,z_1\n0,1\n")).is_err());
        assert!(read_samples(Cursor::new("#dy=2,y_1,y_2\n0,1\n")).is_err());
    }

    #[test]
    fn payoff_with_and_without_sidecar() {
        let (payoff, caps) = read_payoff(Cursor::new("caps,1,1\n5,1\n1,5\n")).unwrap();
        assert_eq!(caps, Some(vec![1, 1]));
        assert_eq!(payoff[(1, 1)], 5.0);

        let (payoff, caps) = read_payoff(Cursor::new("5,1\n1,5\n")).unwrap();
        assert_eq!(caps, None);
        assert_eq!(payoff.dim(), (2, 2));
    }

    #[test]
    fn records_format_is_stable() {
        let records = vec![BenchRecord {
            solver: Solver::Modified,
            case: Case::Independent,
            n: 6,
            trial: 0,
            seed: 12345,
            op_count: 777,
            elapsed_ns: 42,
            objective: 0.1,
        }];
        let mut out = Vec::new();
        write_records(&mut out, &records).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "solver,case,n,trial,seed,op_count,elapsed_ns,objective\nmodified,independent,6,0,12345,777,42,0.1\n"
        );
    }
}
