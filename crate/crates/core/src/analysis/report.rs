//! CSV serialization of study results.
//!
//! Floats are written in scientific notation with 12 significant digits, so
//! identical results produce identical bytes.

use std::io::{Read, Write};

use super::study::{QualityLevel, QualityReport};
use super::{AnalysisError, ConvergenceReport, ErrorRecord, QualityRecord, RateFit, NON_CONVERGENT_SLOPE, SIGMA_REQUIRED};

pub const REPORT_HEADER: [&str; 11] =
    ["case", "level", "h", "dofs", "l2_u1", "h1_u1", "l2_u2", "kappa_min", "K_max", "max_dist", "max_normal_angle"];
pub const RATES_HEADER: [&str; 4] = ["norm", "slope", "residual", "status"];
pub const QUALITY_HEADER: [&str; 7] = ["case", "level", "h", "kappa_min", "K_max", "max_dist", "max_normal_angle"];

pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn parse_float(s: &str) -> Result<f64, AnalysisError> {
    s.trim().parse().map_err(|_| AnalysisError::Format(format!("not a number: {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize, AnalysisError> {
    s.trim().parse().map_err(|_| AnalysisError::Format(format!("not an integer: {s:?}")))
}

fn check_header(reader: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<(), AnalysisError> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(AnalysisError::Format(format!("unexpected header {header:?}")));
    }
    Ok(())
}

fn field(record: &csv::StringRecord, i: usize) -> Result<&str, AnalysisError> {
    record.get(i).ok_or_else(|| AnalysisError::Format(format!("missing column {i}")))
}

/// One row per level, in the order of `report.records`.
pub fn write_report_csv(out: impl Write, report: &ConvergenceReport) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in &report.records {
        w.write_record([
            report.case.clone(),
            r.level.to_string(),
            format_float(r.h),
            r.dofs.to_string(),
            format_float(r.l2_u1),
            format_float(r.h1_u1),
            format_float(r.l2_u2),
            format_float(r.quality.kappa_min),
            format_float(r.quality.k_max),
            format_float(r.quality.max_distance),
            format_float(r.quality.max_normal_angle),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads back `(case, record)` rows written by [`write_report_csv`].
pub fn read_report_csv(input: impl Read) -> Result<Vec<(String, ErrorRecord)>, AnalysisError> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &REPORT_HEADER)?;
    reader
        .records()
        .map(|row| {
            let row = row?;
            let f = |i| field(&row, i).and_then(parse_float);
            Ok((
                field(&row, 0)?.to_owned(),
                ErrorRecord {
                    level: parse_usize(field(&row, 1)?)?,
                    h: f(2)?,
                    dofs: parse_usize(field(&row, 3)?)?,
                    l2_u1: f(4)?,
                    h1_u1: f(5)?,
                    l2_u2: f(6)?,
                    quality: QualityRecord {
                        kappa_min: f(7)?,
                        k_max: f(8)?,
                        max_distance: f(9)?,
                        max_normal_angle: f(10)?,
                    },
                },
            ))
        })
        .collect()
}

/// A row of `rates.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub name: String,
    pub slope: f64,
    /// Absent for the derived `sigma` row.
    pub residual: Option<f64>,
    pub status: String,
}

pub fn norm_status(slope: f64) -> &'static str {
    if slope <= NON_CONVERGENT_SLOPE {
        "non-convergent"
    } else {
        "convergent"
    }
}

pub fn sigma_status(sigma: f64) -> &'static str {
    if sigma >= SIGMA_REQUIRED {
        "ok"
    } else {
        "below-3/2"
    }
}

fn quality_rows(gamma: Option<RateFit>, epsilon: Option<RateFit>, sigma: Option<f64>) -> Vec<RateRow> {
    let mut rows = Vec::new();
    for (name, fit) in [("gamma", gamma), ("epsilon", epsilon)] {
        if let Some(fit) = fit {
            rows.push(RateRow { name: name.into(), slope: fit.slope, residual: Some(fit.residual), status: "measured".into() });
        }
    }
    if let Some(sigma) = sigma {
        rows.push(RateRow { name: "sigma".into(), slope: sigma, residual: None, status: sigma_status(sigma).into() });
    }
    rows
}

/// Rows of `rates.csv`: one per norm, then `gamma`, `epsilon` and `sigma`.
pub fn rate_rows(report: &ConvergenceReport) -> Vec<RateRow> {
    let mut rows: Vec<RateRow> = report
        .rates
        .iter()
        .map(|(norm, fit)| RateRow {
            name: norm.name().into(),
            slope: fit.slope,
            residual: Some(fit.residual),
            status: norm_status(fit.slope).into(),
        })
        .collect();
    rows.extend(quality_rows(report.gamma, report.epsilon, report.sigma_estimate));
    rows
}

pub fn quality_rate_rows(report: &QualityReport) -> Vec<RateRow> {
    quality_rows(report.gamma, report.epsilon, report.sigma_estimate)
}

pub fn write_rates_csv(out: impl Write, rows: &[RateRow]) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATES_HEADER)?;
    for row in rows {
        w.write_record([
            row.name.clone(),
            format_float(row.slope),
            row.residual.map(format_float).unwrap_or_default(),
            row.status.clone(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_rates_csv(input: impl Read) -> Result<Vec<RateRow>, AnalysisError> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &RATES_HEADER)?;
    reader
        .records()
        .map(|row| {
            let row = row?;
            let residual = field(&row, 2)?;
            Ok(RateRow {
                name: field(&row, 0)?.to_owned(),
                slope: parse_float(field(&row, 1)?)?,
                residual: if residual.is_empty() { None } else { Some(parse_float(residual)?) },
                status: field(&row, 3)?.to_owned(),
            })
        })
        .collect()
}

pub fn write_quality_csv(out: impl Write, report: &QualityReport) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(QUALITY_HEADER)?;
    for l in &report.levels {
        let q = &l.quality;
        w.write_record([
            report.case.clone(),
            l.level.to_string(),
            format_float(l.h),
            format_float(q.kappa_min),
            format_float(q.k_max),
            format_float(q.max_distance),
            format_float(q.max_normal_angle),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads back `(case, level)` rows written by [`write_quality_csv`].
pub fn read_quality_csv(input: impl Read) -> Result<Vec<(String, QualityLevel)>, AnalysisError> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &QUALITY_HEADER)?;
    reader
        .records()
        .map(|row| {
            let row = row?;
            let f = |i| field(&row, i).and_then(parse_float);
            Ok((
                field(&row, 0)?.to_owned(),
                QualityLevel {
                    level: parse_usize(field(&row, 1)?)?,
                    h: f(2)?,
                    quality: QualityRecord {
                        kappa_min: f(3)?,
                        k_max: f(4)?,
                        max_distance: f(5)?,
                        max_normal_angle: f(6)?,
                    },
                },
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::fit_rates;

    fn sample_report() -> ConvergenceReport {
        let records: Vec<_> = [0.5, 0.25, 0.125, 0.0625]
            .iter()
            .enumerate()
            .map(|(level, &h)| ErrorRecord {
                level,
                h,
                dofs: 10 << (2 * level),
                l2_u1: 0.3 * h,
                h1_u1: 1.1 * h.powf(0.75),
                l2_u2: 2.0 * h.sqrt() + 1e-3 / 3.0,
                quality: QualityRecord {
                    kappa_min: 0.2 + 1.0 / 7.0,
                    k_max: 0.6,
                    max_distance: h * h / 8.0,
                    max_normal_angle: h / std::f64::consts::PI,
                },
            })
            .collect();
        fit_rates("cap, pi/3", &records).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-11 * a.abs().max(b.abs())
    }

    #[test]
    fn report_round_trip() {
        let report = sample_report();
        let mut bytes = Vec::new();
        write_report_csv(&mut bytes, &report).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("case,level,h,dofs,l2_u1,h1_u1,l2_u2,kappa_min,K_max,max_dist,max_normal_angle\n"));

        let rows = read_report_csv(bytes.as_slice()).unwrap();
        assert_eq!(rows.len(), report.records.len());
        for ((case, back), original) in rows.iter().zip(&report.records) {
            assert_eq!(case, "cap, pi/3");
            assert_eq!((back.level, back.dofs), (original.level, original.dofs));
            assert!(close(back.h, original.h) && close(back.l2_u2, original.l2_u2));
            assert!(close(back.quality.kappa_min, original.quality.kappa_min));
        }

        // a second pass through the text format is lossless
        let again = ConvergenceReport { records: rows.into_iter().map(|r| r.1).collect(), ..report };
        let mut bytes_again = Vec::new();
        write_report_csv(&mut bytes_again, &again).unwrap();
        assert_eq!(bytes, bytes_again);
    }

    #[test]
    fn rates_round_trip_and_status() {
        let report = sample_report();
        let rows = rate_rows(&report);
        assert_eq!(rows.iter().map(|r| r.name.as_str()).collect::<Vec<_>>(), ["l2_u1", "h1_u1", "l2_u2", "gamma", "epsilon", "sigma"]);
        assert_eq!(rows[0].status, "convergent");
        assert_eq!(rows[5].status, "ok");
        let mut bytes = Vec::new();
        write_rates_csv(&mut bytes, &rows).unwrap();
        let back = read_rates_csv(bytes.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            assert_eq!((&a.name, &a.status, a.residual.is_some()), (&b.name, &b.status, b.residual.is_some()));
            assert!(close(a.slope, b.slope));
        }
        assert_eq!(norm_status(0.25), "non-convergent");
        assert_eq!(sigma_status(1.2), "below-3/2");
    }

    #[test]
    fn quality_round_trip() {
        let report = sample_report();
        let levels = report.records.iter().map(|r| QualityLevel { level: r.level, h: r.h, quality: r.quality }).collect();
        let quality = QualityReport::new("lantern", levels);
        let mut bytes = Vec::new();
        write_quality_csv(&mut bytes, &quality).unwrap();
        let back = read_quality_csv(bytes.as_slice()).unwrap();
        assert_eq!(back.len(), 4);
        assert!(back.iter().zip(&quality.levels).all(|((c, a), b)| c == "lantern" && a.level == b.level && close(a.h, b.h)));
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_report_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_rates_csv("norm,slope\n".as_bytes()).is_err());
    }
}
