//! Binary checkpoint files: magic, format version, grid metadata, time,
//! then the raw physical arrays. All integers and floats little-endian;
//! arrays are row-major, one component after the other.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{NematicError, Result};
use crate::field::{Field, VectorField};
use crate::grid::PeriodicGrid;
use crate::solver::State;

const MAGIC: &[u8; 4] = b"ELCS";
const VERSION: u32 = 1;

fn write_array(w: &mut impl Write, data: &[f64]) -> Result<()> {
    for &x in data {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn read_array(r: &mut impl Read, len: usize) -> Result<Vec<f64>> {
    let mut buf = [0u8; 8];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        r.read_exact(&mut buf)?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

pub fn save(path: &Path, state: &State) -> Result<()> {
    let grid = state.grid();
    let mut state = state.clone();
    state.rho.ensure_physical();
    state.u.ensure_physical();
    state.d.ensure_physical();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    for &n in grid.shape() {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    w.write_all(&state.t.to_le_bytes())?;
    write_array(&mut w, state.rho.physical_data()?)?;
    for c in state.u.comps() {
        write_array(&mut w, c.physical_data()?)?;
    }
    for c in state.d.comps() {
        write_array(&mut w, c.physical_data()?)?;
    }
    w.flush()?;
    Ok(())
}

/// Load a checkpoint; the density bounds are run metadata and come from the
/// configuration, not the file.
pub fn load(path: &Path, m1: f64, m2: f64) -> Result<State> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(NematicError::Checkpoint(format!(
            "bad magic {:?} in {}",
            magic,
            path.display()
        )));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(NematicError::Checkpoint(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    r.read_exact(&mut u32buf)?;
    let dim = u32::from_le_bytes(u32buf) as usize;
    if !(2..=3).contains(&dim) {
        return Err(NematicError::Checkpoint(format!("bad dimension {dim}")));
    }
    let mut shape = Vec::with_capacity(dim);
    for _ in 0..dim {
        r.read_exact(&mut u32buf)?;
        shape.push(u32::from_le_bytes(u32buf) as usize);
    }
    let grid = PeriodicGrid::new(dim, &shape)?;
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf)?;
    let t = f64::from_le_bytes(f64buf);
    let len = grid.len();
    let rho = Field::from_physical(grid, read_array(&mut r, len)?)?;
    let mut ucomps = Vec::with_capacity(dim);
    for _ in 0..dim {
        ucomps.push(Field::from_physical(grid, read_array(&mut r, len)?)?);
    }
    let mut dcomps = Vec::with_capacity(3);
    for _ in 0..3 {
        dcomps.push(Field::from_physical(grid, read_array(&mut r, len)?)?);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(NematicError::Checkpoint(
            "trailing bytes after field data".into(),
        ));
    }
    Ok(State {
        rho,
        u: VectorField::new(ucomps)?,
        d: VectorField::new(dcomps)?,
        t,
        m1,
        m2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn round_trip_bit_exact() {
        let grid = PeriodicGrid::square(2, 8).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let state = State {
            rho: Field::from_fn(grid, |x| 1.0 + 0.25 * (tau * x[0]).sin()),
            u: VectorField::new(vec![
                Field::from_fn(grid, |x| (tau * x[1]).cos()),
                Field::from_fn(grid, |x| (tau * x[0]).sin()),
            ])
            .unwrap(),
            d: VectorField::new(vec![
                Field::from_fn(grid, |x| (tau * x[0]).cos()),
                Field::from_fn(grid, |x| (tau * x[0]).sin()),
                Field::constant(grid, 0.0),
            ])
            .unwrap(),
            t: 0.37,
            m1: 0.75,
            m2: 1.25,
        };
        let dir = tempdir().unwrap();
        let path = dir.path().join("state.elcs");
        save(&path, &state).unwrap();
        let back = load(&path, 0.75, 1.25).unwrap();
        assert_eq!(back.t, state.t);
        let mut orig = state.clone();
        orig.rho.ensure_physical();
        orig.u.ensure_physical();
        orig.d.ensure_physical();
        assert_eq!(
            back.rho.physical_data().unwrap(),
            orig.rho.physical_data().unwrap()
        );
        for i in 0..2 {
            assert_eq!(
                back.u.comp(i).physical_data().unwrap(),
                orig.u.comp(i).physical_data().unwrap()
            );
        }
        for i in 0..3 {
            assert_eq!(
                back.d.comp(i).physical_data().unwrap(),
                orig.d.comp(i).physical_data().unwrap()
            );
        }
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("junk.elcs");
        std::fs::write(&path, b"NOPE12345678").unwrap();
        assert!(matches!(
            load(&path, 0.5, 1.5),
            Err(NematicError::Checkpoint(_))
        ));
    }
}
