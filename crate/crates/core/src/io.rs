//! Little-endian binary formats for fields (`PSF1`) and operators (`DOP1`).

use std::io::{Read, Write};

use ndarray::Array2;

use crate::error::{LabError, Result};
use crate::phasespace::{Grid1D, PhaseSpaceField, PhaseSpaceGrid};
use crate::quantize::DensityOperator;
use crate::C64;

const PSF_MAGIC: &[u8; 4] = b"PSF1";
const DOP_MAGIC: &[u8; 4] = b"DOP1";

fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn expect_magic(r: &mut impl Read, magic: &[u8; 4]) -> Result<()> {
    let mut m = [0u8; 4];
    r.read_exact(&mut m)?;
    if &m != magic {
        return Err(LabError::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

pub fn write_field(w: &mut impl Write, f: &PhaseSpaceField) -> Result<()> {
    w.write_all(PSF_MAGIC)?;
    put_u64(w, f.grid.dim as u64)?;
    put_u64(w, f.grid.x.n_points as u64)?;
    put_u64(w, f.grid.xi.n_points as u64)?;
    put_f64(w, f.grid.x.length)?;
    put_f64(w, f.grid.xi.length)?;
    put_f64(w, f.time)?;
    for v in f.values.iter() {
        put_f64(w, *v)?;
    }
    Ok(())
}

pub fn read_field(r: &mut impl Read) -> Result<PhaseSpaceField> {
    expect_magic(r, PSF_MAGIC)?;
    let d = get_u64(r)? as usize;
    let nx = get_u64(r)? as usize;
    let nk = get_u64(r)? as usize;
    let lx = get_f64(r)?;
    let lk = get_f64(r)?;
    let time = get_f64(r)?;
    let grid = PhaseSpaceGrid::new(d, Grid1D::new(nx, lx)?, Grid1D::new(nk, lk)?)?;
    let (rows, cols) = (grid.nx_total(), grid.nxi_total());
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        data.push(get_f64(r)?);
    }
    let values = Array2::from_shape_vec((rows, cols), data).map_err(|e| LabError::Format(e.to_string()))?;
    let mut f = PhaseSpaceField::new(grid, values)?;
    f.time = time;
    Ok(f)
}

pub fn write_operator(w: &mut impl Write, rho: &DensityOperator) -> Result<()> {
    w.write_all(DOP_MAGIC)?;
    put_u64(w, rho.grid_x.n_points as u64)?;
    put_f64(w, rho.grid_x.length)?;
    put_f64(w, rho.hbar)?;
    for z in rho.matrix.iter() {
        put_f64(w, z.re)?;
        put_f64(w, z.im)?;
    }
    Ok(())
}

pub fn read_operator(r: &mut impl Read) -> Result<DensityOperator> {
    expect_magic(r, DOP_MAGIC)?;
    let n = get_u64(r)? as usize;
    let len = get_f64(r)?;
    let hbar = get_f64(r)?;
    let grid = Grid1D::new(n, len)?;
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re = get_f64(r)?;
        let im = get_f64(r)?;
        data.push(C64::new(re, im));
    }
    let matrix = Array2::from_shape_vec((n, n), data).map_err(|e| LabError::Format(e.to_string()))?;
    Ok(DensityOperator { grid_x: grid, hbar, matrix })
}

pub fn save_field(path: &std::path::Path, f: &PhaseSpaceField) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_field(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &std::path::Path) -> Result<PhaseSpaceField> {
    read_field(&mut std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn save_operator(path: &std::path::Path, rho: &DensityOperator) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_operator(&mut w, rho)?;
    w.flush()?;
    Ok(())
}

pub fn load_operator(path: &std::path::Path) -> Result<DensityOperator> {
    read_operator(&mut std::io::BufReader::new(std::fs::File::open(path)?))
}
