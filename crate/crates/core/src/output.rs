//! CSV record files.
//!
//! One row per orbit with columns
//! `omega1,omega2,a_or_eps,rot1,rot2,digT,class,m1,m2,n,M,lyap1,lyap2`.
//! Fields that do not apply are left empty (the second drive and rotation
//! component for circle maps, resonance data for chaotic orbits, and so on).
//! Reals are written in scientific notation with 17 significant digits.
//! Circle-map rows record `ω ≈ p/q` as `m1 = q`, `n = p`, `M = q`.

use std::io::{BufRead, Write};

use crate::scan::{Outcome, ScanRecord};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "omega1,omega2,a_or_eps,rot1,rot2,digT,class,m1,m2,n,M,lyap1,lyap2";

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

fn opt_int(x: Option<i64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Renders one record as a CSV line without the trailing newline.
pub fn record_line(r: &ScanRecord) -> String {
    let drive = r.params.drive();
    let circle = drive.len() == 1;
    let mut f: Vec<String> = Vec::with_capacity(13);
    f.push(fmt_real(drive[0]));
    f.push(opt_real(drive.get(1).copied()));
    f.push(fmt_real(r.params.amplitude()));
    match &r.outcome {
        Outcome::Failed(_) => {
            f.extend(["", "", ""].map(String::from));
            f.push("error".into());
            f.extend(["", "", "", ""].map(String::from));
        }
        Outcome::Classified { rotation, class } => {
            let w = rotation.omega();
            f.push(fmt_real(w[0]));
            f.push(opt_real(w.get(1).copied()));
            f.push(fmt_real(rotation.digits()));
            f.push(class.label().into());
            let hit = class.resonance();
            f.push(opt_int(hit.map(|h| h.m[0])));
            f.push(if circle { String::new() } else { opt_int(hit.map(|h| h.m[1])) });
            f.push(opt_int(hit.map(|h| h.n)));
            f.push(opt_int(hit.map(|h| h.order as i64)));
        }
    }
    f.push(opt_real(r.lyapunov.map(|l| l.lambda1)));
    f.push(opt_real(r.lyapunov.map(|l| l.lambda2)));
    f.join(",")
}

pub fn write_records_csv<W: Write>(mut out: W, records: &[ScanRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", record_line(r))?;
    }
    Ok(())
}

/// The subset of a CSV row needed to re-aggregate a scan.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub omega: Vec<f64>,
    pub amplitude: f64,
    pub rotation: Vec<f64>,
    pub digits: Option<f64>,
    pub class: String,
    pub order: Option<u64>,
}

fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        field
            .parse()
            .map(Some)
            .map_err(|_| Error::invalid(format!("bad number {field:?} in records file")))
    }
}

/// Reads a record file written by [`write_records_csv`].
pub fn read_records_csv<R: BufRead>(input: R) -> Result<Vec<CsvRow>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::invalid("empty records file"))?
        .map_err(|e| Error::invalid(e.to_string()))?;
    if header.trim() != CSV_HEADER {
        return Err(Error::invalid(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::invalid(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(Error::invalid(format!("row {}: expected 13 fields, got {}", i + 2, f.len())));
        }
        let omega: Vec<f64> = [f[0], f[1]].iter().map(|s| parse_opt(s)).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        let rotation: Vec<f64> = [f[3], f[4]].iter().map(|s| parse_opt(s)).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
        rows.push(CsvRow {
            omega,
            amplitude: parse_opt(f[2])?.ok_or_else(|| Error::invalid(format!("row {}: missing a_or_eps", i + 2)))?,
            rotation,
            digits: parse_opt(f[5])?,
            class: f[6].to_string(),
            order: parse_opt(f[10])?.map(|v| v as u64),
        });
    }
    Ok(rows)
}

/// `(amplitude, nonresonant fraction)` per distinct amplitude, in order of
/// first appearance.
pub fn mu_by_amplitude(rows: &[CsvRow]) -> Vec<(f64, f64)> {
    let mut acc: Vec<(f64, usize, usize)> = Vec::new();
    for r in rows {
        let hit = (r.class == "nonresonant") as usize;
        match acc.iter_mut().find(|(a, _, _)| *a == r.amplitude) {
            Some(e) => {
                e.1 += hit;
                e.2 += 1;
            }
            None => acc.push((r.amplitude, hit, 1)),
        }
    }
    acc.into_iter().map(|(a, k, n)| (a, k as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::{LyapunovPair, RotationResult};
    use crate::maps::{parameter_catalog, CircleParams};
    use crate::resonance::{OrbitClass, ResonanceHit};
    use crate::scan::{MapParams, Rotation};

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_real(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_real(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn rows_round_trip() {
        let hit = ResonanceHit { m: [1, -1], n: 0, order: 2, distance: 1e-12 };
        let t = parameter_catalog(0).unwrap().with_omega([0.84, 0.835]).unwrap().with_eps(0.8).unwrap();
        let recs = vec![
            ScanRecord {
                params: MapParams::Torus2(t),
                outcome: Outcome::Classified {
                    rotation: Rotation::Torus2(RotationResult { omega: [0.8394, 0.8394], digits: 15.2 }),
                    class: OrbitClass::Resonant(Some(hit)),
                },
                lyapunov: Some(LyapunovPair { lambda1: 0.0, lambda2: -0.1 }),
            },
            ScanRecord {
                params: MapParams::Circle(CircleParams::new(0.3, 0.8).unwrap()),
                outcome: Outcome::Failed("nan".into()),
                lyapunov: None,
            },
        ];
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].contains(",resonant,1,-1,0,2,"));
        assert!(lines[2].contains(",,,,error,,,,,,"));
        let rows = read_records_csv(&buf[..]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].omega, vec![0.84, 0.835]);
        assert_eq!(rows[0].order, Some(2));
        assert_eq!(rows[1].class, "error");
        assert_eq!(rows[1].omega, vec![0.3]);
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(read_records_csv(&b""[..]).is_err());
        assert!(read_records_csv(&b"a,b\n1,2\n"[..]).is_err());
    }
}
