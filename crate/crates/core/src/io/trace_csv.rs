//! Trace CSV files. Floats use Rust's shortest round-trip formatting, so a
//! written trace reads back bit-exactly.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{io_error, Result, SascError};
use crate::trace::{ConvergenceTrace, TraceRecord};

pub const TRACE_HEADER: [&str; 8] = [
    "samples",
    "epoch",
    "objective",
    "feasibility",
    "beta",
    "alpha",
    "dist_to_ref",
    "wall_time_s",
];

fn row(r: &TraceRecord) -> [String; 8] {
    [
        r.samples.to_string(),
        r.epoch.to_string(),
        r.objective.to_string(),
        r.feasibility.to_string(),
        r.beta.to_string(),
        r.alpha.to_string(),
        r.dist_to_ref.map(|d| d.to_string()).unwrap_or_default(),
        r.wall_time.to_string(),
    ]
}

pub fn write_trace<W: Write>(trace: &ConvergenceTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv(trace: &ConvergenceTrace, path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    write_trace(trace, f).map_err(|e| io_error(path, e))
}

pub fn read_trace<R: Read>(input: R, source_name: &str) -> Result<ConvergenceTrace> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(|e| SascError::Parse {
        source_name: source_name.into(),
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(TRACE_HEADER.iter().copied()) {
        return Err(SascError::Parse {
            source_name: source_name.into(),
            line: 1,
            message: format!(
                "unexpected header '{}'",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut trace = ConvergenceTrace::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let err = |message: String| SascError::Parse {
            source_name: source_name.into(),
            line,
            message,
        };
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let f = |k: usize| -> Result<f64> {
            rec[k]
                .parse()
                .map_err(|_| err(format!("bad {} '{}'", TRACE_HEADER[k], &rec[k])))
        };
        trace.records.push(TraceRecord {
            samples: rec[0]
                .parse()
                .map_err(|_| err(format!("bad samples '{}'", &rec[0])))?,
            epoch: rec[1]
                .parse()
                .map_err(|_| err(format!("bad epoch '{}'", &rec[1])))?,
            objective: f(2)?,
            feasibility: f(3)?,
            beta: f(4)?,
            alpha: f(5)?,
            dist_to_ref: if rec[6].is_empty() { None } else { Some(f(6)?) },
            wall_time: f(7)?,
        });
    }
    Ok(trace)
}

pub fn read_trace_csv(path: &Path) -> Result<ConvergenceTrace> {
    let f = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
    read_trace(f, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn to_string(t: &ConvergenceTrace) -> String {
        let mut buf = Vec::new();
        write_trace(t, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_trace_is_header_only() {
        assert_eq!(
            to_string(&ConvergenceTrace::new()),
            "samples,epoch,objective,feasibility,beta,alpha,dist_to_ref,wall_time_s\n"
        );
    }

    #[test]
    fn single_record() {
        let mut t = ConvergenceTrace::new();
        t.push(TraceRecord {
            samples: 2,
            epoch: 0,
            objective: 1.5,
            feasibility: 0.25,
            beta: 4.0,
            alpha: 1.0,
            dist_to_ref: None,
            wall_time: 0.01,
        });
        let s = to_string(&t);
        assert_eq!(s.lines().nth(1).unwrap(), "2,0,1.5,0.25,4,1,,0.01");
        assert_eq!(read_trace(s.as_bytes(), "t").unwrap(), t);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(matches!(
            read_trace("a,b\n1,2\n".as_bytes(), "t"),
            Err(SascError::Parse { line: 1, .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(
            vals in prop::collection::vec((any::<f64>(), any::<f64>(), 0.0f64..1e9, prop::option::of(any::<f64>())), 0..20)
        ) {
            let mut t = ConvergenceTrace::new();
            for (k, (obj, feas, beta, d)) in vals.into_iter().enumerate() {
                t.records.push(TraceRecord {
                    samples: k as u64 + 1,
                    epoch: k,
                    objective: obj,
                    feasibility: feas,
                    beta,
                    alpha: beta / 3.0,
                    dist_to_ref: d,
                    wall_time: 0.0,
                });
            }
            let back = read_trace(to_string(&t).as_bytes(), "t").unwrap();
            prop_assert_eq!(back.records.len(), t.records.len());
            for (a, b) in back.records.iter().zip(&t.records) {
                prop_assert_eq!(a.objective.to_bits(), b.objective.to_bits());
                prop_assert_eq!(a.feasibility.to_bits(), b.feasibility.to_bits());
                prop_assert_eq!(a.dist_to_ref.map(f64::to_bits), b.dist_to_ref.map(f64::to_bits));
            }
        }
    }
}
