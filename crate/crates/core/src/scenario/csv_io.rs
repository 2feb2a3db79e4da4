use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::SweepError;
use crate::moving::Side;
use crate::solver::{JumpState, Trajectory};

fn csv_err(e: impl std::fmt::Display) -> SweepError {
    SweepError::Csv(e.to_string())
}

/// Columns `t, side, jump, arc, y1..yd, v1..vd`. Jump instants get three rows
/// (`left`, `at`, `right`) with `jump = 1`; the jump density (the chord) is
/// repeated on each. `arc` is empty when `ℓ_C` is unknown. Floats use the
/// shortest representation that round-trips.
pub fn write_trajectory_csv<W: Write>(y: &Trajectory, out: W) -> Result<(), SweepError> {
    let d = y.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string(), "side".into(), "jump".into(), "arc".into()];
    header.extend((1..=d).map(|i| format!("y{i}")));
    header.extend((1..=d).map(|i| format!("v{i}")));
    w.write_record(&header).map_err(csv_err)?;

    let arc_cell = |x: Option<f64>| x.map_or_else(String::new, |a| a.to_string());
    let mut row = |t: f64, side: Side, jump: bool, arc: Option<f64>, ys: &[f64], vs: &[f64]| {
        let mut rec = vec![t.to_string(), side.as_str().to_string(), u8::from(jump).to_string(), arc_cell(arc)];
        rec.extend(ys.iter().map(f64::to_string));
        rec.extend(vs.iter().map(f64::to_string));
        w.write_record(&rec).map_err(csv_err)
    };
    for j in 0..y.len() {
        let t = y.times[j];
        let at = y.value(j);
        let v = y.density_at(j);
        let arc = y.arc.as_ref().map(|a| a[j]);
        match y.jumps.iter().find(|s| s.index == j) {
            Some(s) => {
                let known = y.arc.is_some();
                row(t, Side::Left, true, known.then_some(s.arc.0), &s.left, &s.density)?;
                row(t, Side::At, true, arc, at.as_slice(), &s.density)?;
                row(t, Side::Right, true, known.then_some(s.arc.1), &s.right, &s.density)?;
            }
            None => row(t, Side::At, false, arc, at.as_slice(), v.as_slice())?,
        }
    }
    w.flush().map_err(csv_err)
}

/// Inverse of [`write_trajectory_csv`]; the initial condition is not stored
/// and comes back as `None`.
pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Trajectory, SweepError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.len() < 6 || (header.len() - 4) % 2 != 0 || &header[0] != "t" || &header[1] != "side" {
        return Err(csv_err("unexpected header"));
    }
    let d = (header.len() - 4) / 2;
    let num = |s: &str| s.parse::<f64>().map_err(csv_err);

    let mut times = Vec::new();
    let mut arcs: Vec<Option<f64>> = Vec::new();
    let mut values = Vec::new();
    let mut density = Vec::new();
    let mut jumps = Vec::new();
    // (t, y, arc) of the `left` row, then of the `at` row plus its density
    type Row = (f64, Vec<f64>, Option<f64>);
    let mut pending: Option<Row> = None;
    let mut at_seen: Option<(Row, Vec<f64>)> = None;

    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let t = num(&rec[0])?;
        let arc = if rec[3].is_empty() { None } else { Some(num(&rec[3])?) };
        let ys = (4..4 + d).map(|i| num(&rec[i])).collect::<Result<Vec<_>, _>>()?;
        let vs = (4 + d..4 + 2 * d).map(|i| num(&rec[i])).collect::<Result<Vec<_>, _>>()?;
        match (&rec[1], &rec[2]) {
            ("at", "0") => {
                times.push(t);
                arcs.push(arc);
                values.extend(ys);
                density.extend(vs);
            }
            ("left", "1") => pending = Some((t, ys, arc)),
            ("at", "1") => {
                if pending.as_ref().is_none_or(|p| p.0 != t) {
                    return Err(csv_err(format!("jump at t={t} has no left row")));
                }
                at_seen = Some(((t, ys, arc), vs));
            }
            ("right", "1") => {
                let (Some((tl, left, arc_l)), Some(((ta, at, arc_at), chord))) = (pending.take(), at_seen.take()) else {
                    return Err(csv_err(format!("jump at t={t} is incomplete")));
                };
                if tl != t || ta != t {
                    return Err(csv_err(format!("jump rows at t={t} disagree")));
                }
                jumps.push(JumpState {
                    index: times.len(),
                    t,
                    left,
                    right: ys,
                    arc: (arc_l.unwrap_or(f64::NAN), arc.unwrap_or(f64::NAN)),
                    density: chord.clone(),
                });
                times.push(t);
                arcs.push(arc_at);
                values.extend(at);
                density.extend(chord);
            }
            (side, flag) => return Err(csv_err(format!("bad row kind {side}/{flag} at t={t}"))),
        }
    }
    if pending.is_some() || at_seen.is_some() {
        return Err(csv_err("trailing incomplete jump"));
    }
    let n = times.len();
    let arc = arcs.iter().copied().collect::<Option<Vec<f64>>>();
    Ok(Trajectory {
        times,
        arc,
        values: DMatrix::from_vec(d, n, values),
        density: DMatrix::from_vec(d, n, density),
        jumps,
        initial: None,
    })
}
