//! Time-series CSV files and binary field snapshots.
//!
//! Time series use the header `t,E,X2,flux,u_l2,grad_l2,v_l2,tail_k<k>...`
//! with every value written to 17 significant digits, so reading a written
//! file reproduces each `f64` exactly.
//!
//! Snapshots use a little-endian container:
//!
//! ```text
//! b"DWAF1" | dim u32 | n u32 × dim | (a, b) f64 × dim | variant u8 | t f64 | u f64 × N | v f64 × N
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::geometry::{Grid, GridConfig, ScalarField};
use crate::integrate::TimeSeries;
use crate::model::Variant;
use crate::phase::{EnergySample, State};

pub const SNAPSHOT_MAGIC: &[u8; 5] = b"DWAF1";
const BASE_COLUMNS: [&str; 7] = ["t", "E", "X2", "flux", "u_l2", "grad_l2", "v_l2"];

/// Header size in bytes of a snapshot of dimension `dim`.
pub fn snapshot_header_len(dim: usize) -> usize {
    SNAPSHOT_MAGIC.len() + 4 + 4 * dim + 16 * dim + 1 + 8
}

pub fn timeseries_header(tail_radii: &[f64]) -> Vec<String> {
    BASE_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(tail_radii.iter().map(|k| format!("tail_k{k}")))
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_timeseries<W: Write>(series: &TimeSeries, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(timeseries_header(&series.tail_radii))?;
    for s in &series.samples {
        if s.tails.len() != series.tail_radii.len() {
            return Err(Error::Format(format!(
                "sample at t = {} has {} tails, expected {}",
                s.t,
                s.tails.len(),
                series.tail_radii.len()
            )));
        }
        let mut row = vec![
            fmt(s.t),
            fmt(s.energy),
            fmt(s.x2),
            fmt(s.flux),
            fmt(s.u_l2),
            fmt(s.grad_l2),
            fmt(s.v_l2),
        ];
        row.extend(s.tails.iter().map(|x| fmt(*x)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_timeseries<R: Read>(input: R) -> Result<TimeSeries> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.len() < BASE_COLUMNS.len() {
        return Err(Error::Format(format!(
            "header has {} columns, need at least 7",
            header.len()
        )));
    }
    for (i, expected) in BASE_COLUMNS.iter().enumerate() {
        if &header[i] != *expected {
            return Err(Error::Format(format!(
                "column {i} is `{}`, expected `{expected}`",
                &header[i]
            )));
        }
    }
    let mut tail_radii = Vec::new();
    for name in header.iter().skip(BASE_COLUMNS.len()) {
        let k = name
            .strip_prefix("tail_k")
            .and_then(|k| k.parse::<f64>().ok())
            .filter(|k| *k > 0.0 && k.is_finite())
            .ok_or_else(|| Error::Format(format!("malformed tail column `{name}`")))?;
        tail_radii.push(k);
    }
    let mut samples: Vec<EnergySample> = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Format(format!("row {} has {} fields", line + 1, record.len())));
        }
        let vals = record
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Format(format!("row {}: bad number `{f}`", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(prev) = samples.last() {
            if !(vals[0] > prev.t) {
                return Err(Error::Format(format!(
                    "row {}: time {} does not increase",
                    line + 1,
                    vals[0]
                )));
            }
        }
        samples.push(EnergySample {
            t: vals[0],
            energy: vals[1],
            x2: vals[2],
            flux: vals[3],
            u_l2: vals[4],
            grad_l2: vals[5],
            v_l2: vals[6],
            tails: vals[7..].to_vec(),
            extras: None,
        });
    }
    Ok(TimeSeries { tail_radii, samples })
}

pub fn save_timeseries(series: &TimeSeries, path: &Path) -> Result<()> {
    write_timeseries(series, BufWriter::new(File::create(path)?))
}

pub fn load_timeseries(path: &Path) -> Result<TimeSeries> {
    read_timeseries(BufReader::new(File::open(path)?))
}

pub fn write_snapshot<W: Write>(w: &State, variant: Variant, mut out: W) -> Result<()> {
    let grid = w.grid();
    if grid.kind() != variant.domain_kind() {
        return Err(Error::Config(format!(
            "variant `{}` does not match the grid",
            variant.name()
        )));
    }
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_u32::<LittleEndian>(grid.dim() as u32)?;
    for &n in grid.nodes() {
        out.write_u32::<LittleEndian>(n as u32)?;
    }
    for &(a, b) in grid.extents() {
        out.write_f64::<LittleEndian>(a)?;
        out.write_f64::<LittleEndian>(b)?;
    }
    out.write_u8(variant.tag())?;
    out.write_f64::<LittleEndian>(w.t)?;
    for x in w.u.values().iter().chain(w.v.values()) {
        out.write_f64::<LittleEndian>(*x)?;
    }
    out.flush()?;
    Ok(())
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("snapshot is truncated".into())
    } else {
        Error::Io(e)
    }
}

/// Reads a snapshot; the returned state carries no integrator history.
pub fn read_snapshot<R: Read>(mut input: R) -> Result<(State, Variant)> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic).map_err(truncated)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let dim = input.read_u32::<LittleEndian>().map_err(truncated)? as usize;
    if !(1..=2).contains(&dim) {
        return Err(Error::Format(format!("unsupported dimension {dim}")));
    }
    let mut nodes = Vec::with_capacity(dim);
    for _ in 0..dim {
        nodes.push(input.read_u32::<LittleEndian>().map_err(truncated)? as usize);
    }
    let mut extents = Vec::with_capacity(dim);
    for _ in 0..dim {
        let a = input.read_f64::<LittleEndian>().map_err(truncated)?;
        let b = input.read_f64::<LittleEndian>().map_err(truncated)?;
        extents.push((a, b));
    }
    let tag = input.read_u8().map_err(truncated)?;
    let variant = Variant::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown variant tag {tag}")))?;
    let t = input.read_f64::<LittleEndian>().map_err(truncated)?;
    if !t.is_finite() {
        return Err(Error::Format("non-finite time".into()));
    }
    let grid = Grid::new(&GridConfig {
        kind: variant.domain_kind(),
        extents,
        nodes,
    })
    .map_err(|e| Error::Format(format!("invalid grid in header: {e}")))?;
    let n = grid.len();
    let mut payload = vec![0.0; 2 * n];
    input.read_f64_into::<LittleEndian>(&mut payload).map_err(truncated)?;
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    if let Some(i) = payload.iter().position(|x| !x.is_finite()) {
        let what = if i < n { "u" } else { "v" };
        return Err(Error::Format(format!("non-finite {what} payload at index {}", i % n)));
    }
    let v = payload.split_off(n);
    let state = State::new(
        ScalarField::from_values(&grid, payload)?,
        ScalarField::from_values(&grid, v)?,
        t,
    )?;
    Ok((state, variant))
}

pub fn save_snapshot(w: &State, variant: Variant, path: &Path) -> Result<()> {
    write_snapshot(w, variant, BufWriter::new(File::create(path)?))
}

pub fn load_snapshot(path: &Path) -> Result<(State, Variant)> {
    read_snapshot(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainKind;
    use crate::random::{rng, unit_state};

    fn plane() -> std::sync::Arc<Grid> {
        Grid::new(&GridConfig::plane(DomainKind::Strip, (0.0, 3.0), (-2.0, 2.0), (7, 9))).unwrap()
    }

    fn series(n: usize, radii: Vec<f64>) -> TimeSeries {
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 * 0.1;
                EnergySample {
                    t,
                    energy: (-t).exp() / 3.0,
                    x2: 1.0 / (1.0 + t),
                    flux: -t.sin().abs() * 1e-17,
                    u_l2: t.sqrt(),
                    grad_l2: 2.0f64.sqrt() * t,
                    v_l2: 1e300 * t,
                    tails: radii.iter().map(|k| k * t * std::f64::consts::PI).collect(),
                    extras: None,
                }
            })
            .collect();
        TimeSeries {
            tail_radii: radii,
            samples,
        }
    }

    #[test]
    fn timeseries_round_trip() {
        let s = series(1000, vec![20.0, 2.5]);
        let mut buf = Vec::new();
        write_timeseries(&s, &mut buf).unwrap();
        let back = read_timeseries(buf.as_slice()).unwrap();
        assert_eq!(back, s);
        let header = String::from_utf8(buf).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, "t,E,X2,flux,u_l2,grad_l2,v_l2,tail_k20,tail_k2.5");
        assert_eq!(header.split(',').count(), 7 + 2);
    }

    #[test]
    fn empty_series_is_header_only() {
        let s = series(0, vec![]);
        let mut buf = Vec::new();
        write_timeseries(&s, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,E,X2,flux,u_l2,grad_l2,v_l2\n");
    }

    #[test]
    fn malformed_header_rejected() {
        let text = "t,E,X2,flux,u_l2,grad,v_l2\n0,1,1,1,1,1,1\n";
        assert!(matches!(read_timeseries(text.as_bytes()), Err(Error::Format(_))));
        let text = "t,E,X2,flux,u_l2,grad_l2,v_l2,tail_kx\n";
        assert!(matches!(read_timeseries(text.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn decreasing_time_rejected() {
        let text = "t,E,X2,flux,u_l2,grad_l2,v_l2\n1,1,1,1,1,1,1\n0.5,1,1,1,1,1,1\n";
        assert!(matches!(read_timeseries(text.as_bytes()), Err(Error::Format(_))));
    }

    #[test]
    fn snapshot_round_trip_is_bit_exact() {
        let g = plane();
        let mut w = unit_state(&g, Variant::NoMassStrip, &mut rng(1, 0));
        w.t = 0.1 + 0.2;
        let mut buf = Vec::new();
        write_snapshot(&w, Variant::NoMassStrip, &mut buf).unwrap();
        assert_eq!(buf.len(), snapshot_header_len(2) + 16 * g.len());
        let (back, variant) = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(variant, Variant::NoMassStrip);
        assert_eq!(back.t.to_bits(), w.t.to_bits());
        for (a, b) in back
            .u
            .values()
            .iter()
            .chain(back.v.values())
            .zip(w.u.values().iter().chain(w.v.values()))
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.grid().config(), g.config());
    }

    #[test]
    fn zero_snapshot_round_trip() {
        let g = plane();
        let w = State::zeros(&g);
        let mut buf = Vec::new();
        write_snapshot(&w, Variant::NoMassStrip, &mut buf).unwrap();
        let (back, _) = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn header_length_for_plane() {
        assert_eq!(snapshot_header_len(2), 58);
    }

    #[test]
    fn snapshot_errors() {
        let g = plane();
        let w = State::zeros(&g);
        let mut buf = Vec::new();
        write_snapshot(&w, Variant::NoMassStrip, &mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_snapshot(bad.as_slice()), Err(Error::Format(_))));

        let short = &buf[..buf.len() - 3];
        assert!(matches!(read_snapshot(short), Err(Error::Format(_))));

        let mut nan = buf.clone();
        let at = snapshot_header_len(2);
        nan[at..at + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(read_snapshot(nan.as_slice()), Err(Error::Format(_))));
    }
}
