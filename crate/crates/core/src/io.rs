//! CSV encodings for trajectories (`n,x,y`) and sweeps (`param,x,y`).
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same value, so a write/read cycle is lossless.

use std::io::{Read, Write};

use crate::error::{ModelError, Result};
use crate::model::State;
use crate::scalar::Scalar;
use crate::trajectory::SweepRow;

pub const TRAJECTORY_HEADER: [&str; 3] = ["n", "x", "y"];
pub const SWEEP_HEADER: [&str; 3] = ["param", "x", "y"];

/// Shortest round-trip decimal representation.
pub fn shortest<T: Scalar>(v: T) -> String {
    format!("{v:?}")
}

fn parse<T: Scalar>(field: &str, line: u64) -> Result<T> {
    T::from_str_radix(field.trim(), 10)
        .map_err(|_| ModelError::InvalidArgument(format!("line {line}: cannot parse '{field}'")))
}

pub fn write_trajectory_csv<W: Write, T: Scalar>(out: W, states: &[State<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for (n, s) in states.iter().enumerate() {
        w.write_record([n.to_string(), shortest(s.x()), shortest(s.y())])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads states back; `n` must count up from 0 without gaps.
pub fn read_trajectory_csv<R: Read, T: Scalar>(input: R) -> Result<Vec<State<T>>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &TRAJECTORY_HEADER)?;
    let mut states = Vec::new();
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let n: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| ModelError::InvalidArgument(format!("line {line}: bad step index")))?;
        if n != states.len() {
            return Err(ModelError::InvalidArgument(format!(
                "line {line}: expected step {}, found {n}",
                states.len()
            )));
        }
        states.push(State::new(
            parse(&record[1], line)?,
            parse(&record[2], line)?,
        )?);
    }
    Ok(states)
}

/// One line per sampled state; a row without samples is written as
/// `param,,` so it survives a round trip.
pub fn write_sweep_csv<W: Write, T: Scalar>(out: W, rows: &[SweepRow<T>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let value = shortest(row.value);
        if row.samples.is_empty() {
            w.write_record([value.as_str(), "", ""])?;
        }
        for s in &row.samples {
            w.write_record([value.clone(), shortest(s.x()), shortest(s.y())])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Groups consecutive lines with equal parameter values into rows. Exit
/// information is not part of the encoding and comes back as `None`.
pub fn read_sweep_csv<R: Read, T: Scalar>(input: R) -> Result<Vec<SweepRow<T>>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(r.headers()?, &SWEEP_HEADER)?;
    let mut rows: Vec<SweepRow<T>> = Vec::new();
    for record in r.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let value: T = parse(&record[0], line)?;
        let sample = if record[1].is_empty() && record[2].is_empty() {
            None
        } else {
            Some(State::new(
                parse(&record[1], line)?,
                parse(&record[2], line)?,
            )?)
        };
        match rows.last_mut() {
            Some(last) if last.value == value && sample.is_some() => last.samples.extend(sample),
            _ => rows.push(SweepRow {
                value,
                samples: sample.into_iter().collect(),
                exit: None,
            }),
        }
    }
    Ok(rows)
}

fn check_header(found: &csv::StringRecord, want: &[&str; 3]) -> Result<()> {
    if found.iter().eq(want.iter().copied()) {
        Ok(())
    } else {
        Err(ModelError::InvalidArgument(format!(
            "expected header {}, found {}",
            want.join(","),
            found.iter().collect::<Vec<_>>().join(",")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::trajectory::{bifurcation_sweep, iterate, SweepSpec};
    use crate::Parameter;
    use proptest::prelude::*;

    #[test]
    fn trajectory_header_and_first_rows() {
        let p = ModelParams::new(3.0, 1.0, 2.0, 4.5, 2.0).unwrap();
        let t = iterate(&p, State::new(0.25, 0.3).unwrap(), 1);
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t.states).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,x,y"));
        assert_eq!(lines.next(), Some("0,0.25,0.3"));
        assert!(lines.next().unwrap().starts_with("1,0.2875"));
    }

    #[test]
    fn sweep_round_trip_keeps_empty_rows() {
        let spec = SweepSpec {
            base: ModelParams::new(4.0, 1.0, 2.0, 2.0, 4.0).unwrap(),
            parameter: Parameter::A,
            start: 4.2,
            end: 5.8,
            points: 5,
            initial: State::new(1.2, 0.2).unwrap(),
        };
        let rows = bifurcation_sweep(&spec, 2000, 16).unwrap();
        // a = 5.8 escapes during the transient
        assert!(rows.last().unwrap().samples.is_empty());
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let back: Vec<SweepRow<f64>> = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (u, v) in rows.iter().zip(&back) {
            assert_eq!(u.value, v.value);
            assert_eq!(u.samples, v.samples);
        }
    }

    #[test]
    fn rejects_wrong_header_and_gaps() {
        assert!(read_trajectory_csv::<_, f64>("a,b,c\n0,1,0\n".as_bytes()).is_err());
        assert!(read_trajectory_csv::<_, f64>("n,x,y\n0,1,0\n2,1,0\n".as_bytes()).is_err());
        assert!(read_trajectory_csv::<_, f64>("n,x,y\n0,-1,0\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn trajectory_csv_is_lossless(
            xs in prop::collection::vec((1e-300f64..1e6, 0.0f64..1e6), 1..50)
        ) {
            let states: Vec<State<f64>> =
                xs.iter().map(|&(x, y)| State::new(x, y).unwrap()).collect();
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &states).unwrap();
            let back: Vec<State<f64>> = read_trajectory_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), states.len());
            for (u, v) in states.iter().zip(&back) {
                prop_assert_eq!(u.x().to_bits(), v.x().to_bits());
                prop_assert_eq!(u.y().to_bits(), v.y().to_bits());
            }
        }

        #[test]
        fn single_precision_csv_is_lossless(x in 1e-30f32..1e6, y in 0.0f32..1e6) {
            let states = vec![State::new(x, y).unwrap()];
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &states).unwrap();
            let back: Vec<State<f32>> = read_trajectory_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back[0].x().to_bits(), x.to_bits());
            prop_assert_eq!(back[0].y().to_bits(), y.to_bits());
        }
    }
}
