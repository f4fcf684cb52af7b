//! Trajectory files.
//!
//! CSV: header `n,t,m,x,U`, one row per stored value, floats with 17
//! significant digits. Dirichlet end nodes appear as `m = -1` and `m = M`.
//!
//! Binary (little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 4     | magic `FDC1` |
//! | 8     | `u64` values per layer (`M`, or `M + 2` with Dirichlet end nodes) |
//! | 8     | `f64` tau |
//! | 8     | `f64` h |
//! | 8     | `u64` layer count |
//! | ...   | `f64` values, layer after layer |

use std::io::{Read, Write};

use super::{SolverError, Trajectory};

pub const BINARY_MAGIC: &[u8; 4] = b"FDC1";

pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> Result<(), SolverError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| SolverError::Io(e.to_string());
    w.write_record(["n", "t", "m", "x", "U"]).map_err(csv_err)?;
    let offset = if traj.grid.is_periodic() { 0 } else { 1 };
    for (i, layer) in traj.layers.iter().enumerate() {
        let n = traj.level(i);
        let t = fmt17(traj.grid.t(n as i64));
        for (s, v) in layer.iter().enumerate() {
            let j = s as i64 - offset;
            w.write_record([n.to_string(), t.clone(), j.to_string(), fmt17(traj.grid.x(j)), fmt17(*v)])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_binary<W: Write>(traj: &Trajectory, mut out: W) -> Result<(), SolverError> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(traj.grid.layer_len() as u64).to_le_bytes())?;
    out.write_all(&traj.grid.tau.to_le_bytes())?;
    out.write_all(&traj.grid.h.to_le_bytes())?;
    out.write_all(&(traj.layers.len() as u64).to_le_bytes())?;
    for layer in &traj.layers {
        for v in layer {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a binary file back as `(tau, h, layers)`.
pub fn read_binary<R: Read>(mut input: R) -> Result<(f64, f64, Vec<Vec<f64>>), SolverError> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(SolverError::Io("not a trajectory file (bad magic)".into()));
    }
    let mut word = [0u8; 8];
    let mut next = |input: &mut R| -> Result<[u8; 8], SolverError> {
        input.read_exact(&mut word)?;
        Ok(word)
    };
    let width = u64::from_le_bytes(next(&mut input)?) as usize;
    let tau = f64::from_le_bytes(next(&mut input)?);
    let h = f64::from_le_bytes(next(&mut input)?);
    let count = u64::from_le_bytes(next(&mut input)?) as usize;
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let mut layer = Vec::with_capacity(width);
        for _ in 0..width {
            layer.push(f64::from_le_bytes(next(&mut input)?));
        }
        layers.push(layer);
    }
    Ok((tau, h, layers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme_library::SchemeName;
    use crate::solver::{run, GridConfig, IcPreset, SimulationConfig};

    fn small() -> Trajectory {
        run(&SimulationConfig {
            scheme: SchemeName::LinearCross,
            grid: GridConfig::periodic(8),
            ic: IcPreset::Sine { k: 1.0, amplitude: 1.0, traveling: false },
            steps: 3,
            record_stride: 1,
        })
        .unwrap()
    }

    #[test]
    fn binary_round_trip() {
        let t = small();
        let mut buf = Vec::new();
        write_binary(&t, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 32 + 8 * 8 * 5);
        let (tau, h, layers) = read_binary(buf.as_slice()).unwrap();
        assert_eq!((tau, h), (t.grid.tau, t.grid.h));
        assert_eq!(layers, t.layers);
    }

    #[test]
    fn csv_values_round_trip_exactly() {
        let t = small();
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,t,m,x,U"));
        let row: Vec<&str> = lines.nth(9).unwrap().split(',').collect();
        assert_eq!(row[0], "1");
        assert_eq!(row[4].parse::<f64>().unwrap(), t.layers[1][1]);
    }
}
