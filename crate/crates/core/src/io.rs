//! File formats: QF4 fields, CSV exports, coefficient directories.
//!
//! QF4 is a text header `QF4 Ns Nt s0 t0 ds dt` and a newline, then Ns·Nt
//! little-endian f64 quadruples (a, b, c, d) in row-major order.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{QbtError, Result};
use crate::field::{Grid, QField2D};
use crate::qbt::{QbtCoefficients, SystemTag};
use crate::qfourier::QSpectrum2D;
use crate::quat::Quaternion;

pub fn write_qf4<W: Write>(f: &QField2D, mut w: W) -> Result<()> {
    let g = &f.grid;
    writeln!(w, "QF4 {} {} {:?} {:?} {:?} {:?}", g.ns, g.nt, g.s0, g.t0, g.ds, g.dt)?;
    let mut buf = Vec::with_capacity(32 * f.values.len());
    for q in &f.values {
        for x in q.to_array() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_qf4<R: Read>(r: R) -> Result<QField2D> {
    let mut r = BufReader::new(r);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 7 || parts[0] != "QF4" {
        return Err(QbtError::Format(format!("bad QF4 header {:?}", header.trim_end())));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|e| QbtError::Format(format!("{s}: {e}")));
    let real = |s: &str| s.parse::<f64>().map_err(|e| QbtError::Format(format!("{s}: {e}")));
    let grid = Grid::new(int(parts[1])?, int(parts[2])?, real(parts[3])?, real(parts[4])?, real(parts[5])?, real(parts[6])?)?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 32 * grid.len() {
        return Err(QbtError::Format(format!("expected {} payload bytes, found {}", 32 * grid.len(), bytes.len())));
    }
    let values = bytes
        .chunks_exact(32)
        .map(|c| {
            let x = |i: usize| f64::from_le_bytes(c[8 * i..8 * i + 8].try_into().expect("8-byte chunk"));
            Quaternion::new(x(0), x(1), x(2), x(3))
        })
        .collect();
    QField2D::from_values(grid, values)
}

pub fn save_qf4(f: &QField2D, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_qf4(f, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_qf4(path: impl AsRef<Path>) -> Result<QField2D> {
    read_qf4(File::open(path)?)
}

fn csv_err(e: csv::Error) -> QbtError {
    QbtError::Format(e.to_string())
}

/// Rows `s,t,a,b,c,d`.
pub fn write_field_csv<W: Write>(f: &QField2D, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["s", "t", "a", "b", "c", "d"]).map_err(csv_err)?;
    for m in 0..f.grid.ns {
        for n in 0..f.grid.nt {
            let q = f.at(m, n);
            out.serialize((f.grid.s(m), f.grid.t(n), q.a, q.b, q.c, q.d)).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Rows `w1,w2,a,b,c,d` in bin order.
pub fn write_spectrum_csv<W: Write>(s: &QSpectrum2D, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["w1", "w2", "a", "b", "c", "d"]).map_err(csv_err)?;
    for p in 0..s.grid.ns {
        for q in 0..s.grid.nt {
            let (w1, w2) = s.freq(p, q);
            let v = s.at(p, q);
            out.serialize((w1, w2, v.a, v.b, v.c, v.d)).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes a header row and numeric rows.
pub fn write_table_csv(path: impl AsRef<Path>, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = csv::Writer::from_path(path).map_err(csv_err)?;
    out.write_record(header).map_err(csv_err)?;
    for r in rows {
        out.write_record(r.iter().map(|x| format!("{x:?}"))).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_table_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = rdr.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|x| x.parse::<f64>().map_err(|e| QbtError::Format(format!("{x}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Headerless CSV of a row-major matrix.
pub fn write_matrix_csv(path: impl AsRef<Path>, rows: usize, cols: usize, values: &[f64]) -> Result<()> {
    if values.len() != rows * cols {
        return Err(QbtError::ShapeMismatch(format!("{} values for {rows}x{cols}", values.len())));
    }
    let mut out = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    for r in values.chunks(cols) {
        out.write_record(r.iter().map(|x| format!("{x:?}"))).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Binary greymap (P5) of a row-major matrix, scaled so the maximum is white.
pub fn write_pgm(path: impl AsRef<Path>, rows: usize, cols: usize, values: &[f64]) -> Result<()> {
    if values.len() != rows * cols {
        return Err(QbtError::ShapeMismatch(format!("{} values for {rows}x{cols}", values.len())));
    }
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{cols} {rows}\n255\n")?;
    let pixels: Vec<u8> = values
        .iter()
        .map(|&v| if max > 0.0 { (255.0 * v / max).round().clamp(0.0, 255.0) as u8 } else { 0 })
        .collect();
    w.write_all(&pixels)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellEntry {
    pub scale_index: usize,
    pub alpha_index: usize,
    pub c: f64,
    pub alpha: f64,
    pub haar_weight: f64,
    pub c1: String,
    pub c2: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientManifest {
    pub grid: Grid,
    pub scales: Vec<f64>,
    pub alphas: Vec<f64>,
    pub delta: f64,
    pub coverage: Option<f64>,
    pub system: SystemTag,
    pub cells: Vec<CellEntry>,
}

fn cell_file(channel: u8, i: usize, j: usize) -> String {
    format!("c{channel}_{i:03}_{j:03}.qf4")
}

/// One QF4 per (channel, c, α) plus `manifest.json`.
pub fn export_coefficients(coef: &QbtCoefficients, dir: impl AsRef<Path>, coverage: Option<f64>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut cells = Vec::with_capacity(coef.n_cells());
    for i in 0..coef.scales.len() {
        for j in 0..coef.alphas.len() {
            let k = coef.cell_index(i, j);
            let (n1, n2) = (cell_file(1, i, j), cell_file(2, i, j));
            save_qf4(&coef.c1[k], dir.join(&n1))?;
            save_qf4(&coef.c2[k], dir.join(&n2))?;
            cells.push(CellEntry {
                scale_index: i,
                alpha_index: j,
                c: coef.scales[i],
                alpha: coef.alphas[j],
                haar_weight: coef.haar_weights[k],
                c1: n1,
                c2: n2,
            });
        }
    }
    let manifest = CoefficientManifest {
        grid: coef.grid,
        scales: coef.scales.clone(),
        alphas: coef.alphas.clone(),
        delta: coef.delta(),
        coverage,
        system: coef.tag,
        cells,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

pub fn import_coefficients(dir: impl AsRef<Path>) -> Result<QbtCoefficients> {
    let dir = dir.as_ref();
    let manifest: CoefficientManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let mut c1 = Vec::with_capacity(manifest.cells.len());
    let mut c2 = Vec::with_capacity(manifest.cells.len());
    let mut weights = Vec::with_capacity(manifest.cells.len());
    for e in &manifest.cells {
        c1.push(load_qf4(dir.join(&e.c1))?);
        c2.push(load_qf4(dir.join(&e.c2))?);
        weights.push(e.haar_weight);
    }
    Ok(QbtCoefficients {
        grid: manifest.grid,
        scales: manifest.scales,
        alphas: manifest.alphas,
        haar_weights: weights,
        c1,
        c2,
        tag: manifest.system,
    })
}
