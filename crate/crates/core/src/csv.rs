//! CSV artifacts. All reals are written as 17-significant-digit
//! scientific notation with a '.' decimal point, so a written value parses
//! back to the identical bits and repeated runs produce byte-identical
//! files. Readers reject anything they did not write.

use crate::engine::RoundRecord;
use crate::error::{Error, Result};
use crate::hedge::ladder::PriceLadder;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub const TRAJECTORY_HEADER: &str = "n,x_n,M_n,portfolio_cost_n,K_n";
pub const DETECTOR_HEADER: &str = "n,event_id,partial_stat";
pub const LADDER_HEADER: &str = "k,nu_k,mu_k";
pub const PATH_HEADER: &str = "x_n";

/// One row per recorded round: the move, the stake, the hedge spend, and
/// the capital after settlement.
pub fn write_trajectory_csv(path: &Path, rounds: &[RoundRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for r in rounds {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            format_real(r.x),
            format_real(r.stake),
            format_real(r.bet_cost),
            format_real(r.capital)
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Streaming writer for detector rows, one (round, event, partial) triple
/// per line in whatever order the caller emits them.
pub struct DetectorCsvWriter {
    out: BufWriter<File>,
}

impl DetectorCsvWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{DETECTOR_HEADER}")?;
        Ok(DetectorCsvWriter { out })
    }

    pub fn row(&mut self, n: u64, event_id: &str, partial_stat: f64) -> Result<()> {
        writeln!(self.out, "{n},{event_id},{}", format_real(partial_stat))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

/// Price and increment columns for every fully determined index: rows stop
/// two short of the ladder depth because the increment at k reads prices
/// through k+2.
pub fn write_ladder_csv(path: &Path, ladder: &PriceLadder) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{LADDER_HEADER}")?;
    let depth = ladder.depth();
    if depth >= 2 {
        for k in 0..=depth - 2 {
            writeln!(
                out,
                "{k},{},{}",
                format_real(ladder.price(k)?),
                format_real(ladder.mu(k)?)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

/// A recorded move path, one value per line.
pub fn write_path_csv(path: &Path, moves: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{PATH_HEADER}")?;
    for &x in moves {
        writeln!(out, "{}", format_real(x))?;
    }
    out.flush()?;
    Ok(())
}

/// Read a move path written by `write_path_csv` (header line `x_n`, one
/// finite real per following line).
pub fn read_path_csv(path: &Path) -> Result<Vec<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut moves = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if i == 0 {
            if line != PATH_HEADER {
                return Err(Error::Csv {
                    line: 1,
                    detail: format!("expected header '{PATH_HEADER}', got '{line}'"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let x: f64 = line.parse().map_err(|e| Error::Csv {
            line: i + 1,
            detail: format!("bad real '{line}': {e}"),
        })?;
        if !x.is_finite() {
            return Err(Error::Csv {
                line: i + 1,
                detail: format!("moves must be finite, got {x}"),
            });
        }
        moves.push(x);
    }
    Ok(moves)
}
