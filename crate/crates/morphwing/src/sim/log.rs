//! Structured per-step simulation log and its CSV form.
//!
//! The CSV schema is a stable interface: two comment lines (format tag and
//! seed), one header row with the fixed column order below, then one row
//! per decimated step at full double precision (shortest round-trip
//! formatting).

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::state::GenVec;
use crate::spatial::Vec3;

/// One logged sample.
#[derive(Clone, Debug)]
pub struct LogRecord {
    pub t: f64,
    pub p_b: Vec3,
    pub euler: Vec3,
    pub q_s: f64,
    pub q_e: f64,
    pub qd: GenVec,
    pub omega_b: Vec3,
    pub u_a: GenVec,
    pub u_m: GenVec,
    pub u_f: GenVec,
    pub f_left: Vec3,
    pub f_right: Vec3,
    pub r: GenVec,
    pub estimate: Vec3,
    pub e_kin: f64,
    pub e_pot: f64,
}

impl LogRecord {
    pub fn is_finite(&self) -> bool {
        self.row().iter().all(|x| x.is_finite())
    }

    /// Flattened row in CSV column order.
    pub fn row(&self) -> Vec<f64> {
        let mut row = Vec::with_capacity(COLUMNS.len());
        row.push(self.t);
        row.extend(self.p_b.iter());
        row.extend(self.euler.iter());
        row.push(self.q_s);
        row.push(self.q_e);
        row.extend(self.qd.iter());
        row.extend(self.omega_b.iter());
        row.extend(self.u_a.iter());
        row.extend(self.u_m.iter());
        row.extend(self.u_f.iter());
        row.extend(self.f_left.iter());
        row.extend(self.f_right.iter());
        row.extend(self.r.iter());
        row.extend(self.estimate.iter());
        row.push(self.e_kin);
        row.push(self.e_pot);
        row
    }
}

/// Fixed CSV column order.
pub const COLUMNS: [&str; 63] = [
    "t", "px", "py", "pz", "roll", "pitch", "yaw", "qs", "qe", "vx", "vy", "vz", "droll",
    "dpitch", "dyaw", "dqs", "dqe", "wx", "wy", "wz", "ua0", "ua1", "ua2", "ua3", "ua4", "ua5",
    "ua6", "ua7", "um0", "um1", "um2", "um3", "um4", "um5", "um6", "um7", "uf0", "uf1", "uf2",
    "uf3", "uf4", "uf5", "uf6", "uf7", "flx", "fly", "flz", "frx", "fry", "frz", "r0", "r1",
    "r2", "r3", "r4", "r5", "r6", "r7", "estx", "esty", "estz", "e_kin", "e_pot",
];

/// Complete run log.
#[derive(Clone, Debug)]
pub struct SimLog {
    pub seed: u64,
    pub records: Vec<LogRecord>,
    /// Count of noise draws beyond six sigma (sanity telemetry).
    pub noise_exceedances: usize,
}

impl SimLog {
    pub fn column_index(name: &str) -> Option<usize> {
        COLUMNS.iter().position(|c| *c == name)
    }

    /// Extract one column as a series.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = Self::column_index(name)
            .ok_or_else(|| Error::SchemaMismatch(format!("unknown column '{name}'")))?;
        Ok(self.records.iter().map(|r| r.row()[idx]).collect())
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// Summed-wing truth force per axis.
    pub fn truth_force(&self) -> [Vec<f64>; 3] {
        let mut out = [vec![], vec![], vec![]];
        for rec in &self.records {
            let total = rec.f_left + rec.f_right;
            for a in 0..3 {
                out[a].push(total[a]);
            }
        }
        out
    }

    /// Extracted force estimate per axis.
    pub fn estimate_force(&self) -> [Vec<f64>; 3] {
        let mut out = [vec![], vec![], vec![]];
        for rec in &self.records {
            for a in 0..3 {
                out[a].push(rec.estimate[a]);
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "# morphwing simlog v1")?;
        writeln!(w, "# seed = {}", self.seed)?;
        writeln!(w, "{}", COLUMNS.join(","))?;
        let mut line = String::with_capacity(1024);
        for rec in &self.records {
            line.clear();
            for (i, v) in rec.row().iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                // Shortest round-trip formatting: full precision, stable bytes.
                line.push_str(&format!("{v}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Parsed CSV log: header names plus raw rows (used by the metrics and
/// plot subcommands, which must work on logs from disk).
#[derive(Clone, Debug)]
pub struct CsvLog {
    pub seed: Option<u64>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvLog {
    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let reader = std::io::BufReader::new(file);
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        let mut seed = None;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("seed =") {
                    seed = v.trim().parse().ok();
                }
                continue;
            }
            match &columns {
                None => {
                    columns = Some(trimmed.split(',').map(|s| s.trim().to_string()).collect());
                }
                Some(cols) => {
                    let vals: std::result::Result<Vec<f64>, _> =
                        trimmed.split(',').map(|s| s.trim().parse::<f64>()).collect();
                    let vals = vals.map_err(|e| {
                        Error::SchemaMismatch(format!("line {}: {e}", lineno + 1))
                    })?;
                    if vals.len() != cols.len() {
                        return Err(Error::SchemaMismatch(format!(
                            "line {}: {} values for {} columns",
                            lineno + 1,
                            vals.len(),
                            cols.len()
                        )));
                    }
                    rows.push(vals);
                }
            }
        }
        let columns = columns
            .ok_or_else(|| Error::SchemaMismatch("no header row found".into()))?;
        Ok(Self { seed, columns, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::SchemaMismatch(format!("missing column '{name}'")))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_record(t: f64) -> LogRecord {
        LogRecord {
            t,
            p_b: Vec3::new(1.0, 2.0, 3.0),
            euler: Vec3::new(0.1, 0.2, 0.3),
            q_s: 0.4,
            q_e: -0.5,
            qd: GenVec::repeat(0.25),
            omega_b: Vec3::new(0.01, 0.02, 0.03),
            u_a: GenVec::repeat(1.5),
            u_m: GenVec::repeat(-0.5),
            u_f: GenVec::repeat(0.125),
            f_left: Vec3::new(0.1, 0.2, 0.3),
            f_right: Vec3::new(0.1, -0.2, 0.3),
            r: GenVec::repeat(0.0625),
            estimate: Vec3::new(0.2, 0.0, 0.6),
            e_kin: 1.25,
            e_pot: -2.5,
        }
    }

    #[test]
    fn row_matches_column_count() {
        assert_eq!(sample_record(0.0).row().len(), COLUMNS.len());
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let log = SimLog {
            seed: 77,
            records: vec![sample_record(0.0), sample_record(0.1)],
            noise_exceedances: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        log.write_csv(&path).unwrap();
        let parsed = CsvLog::read(&path).unwrap();
        assert_eq!(parsed.seed, Some(77));
        assert_eq!(parsed.columns.len(), COLUMNS.len());
        assert_eq!(parsed.rows.len(), 2);
        let orig = log.records[1].row();
        for (a, b) in orig.iter().zip(parsed.rows[1].iter()) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} vs {b}");
        }
    }

    #[test]
    fn truth_force_sums_wings() {
        let log = SimLog { seed: 0, records: vec![sample_record(0.0)], noise_exceedances: 0 };
        let truth = log.truth_force();
        assert_eq!(truth[0][0], 0.2);
        assert_eq!(truth[1][0], 0.0);
        assert!((truth[2][0] - 0.6).abs() <= 1e-15);
    }
}
