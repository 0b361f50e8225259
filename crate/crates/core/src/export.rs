//! Writing distributions and run manifests to disk.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::{GrayImage, Luma};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::measurement::{Axes, DistributionGrid, Normalization};
use crate::scenario::{OutputKind, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            DataFormat::Csv => "csv",
            DataFormat::Json => "json",
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub normalization: Normalization,
    pub config: ScenarioConfig,
    pub outputs: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub kind: OutputKind,
    pub file: String,
    pub image: Option<String>,
    pub nx: usize,
    pub ny: usize,
    pub mass: f64,
}

impl Manifest {
    pub fn new(config: &ScenarioConfig, normalization: Normalization) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config_hash(config),
            normalization,
            config: config.clone(),
            outputs: Vec::new(),
        }
    }
}

/// First 12 hex digits of the SHA-256 of the canonical JSON form.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let json = serde_json::to_vec(config).expect("config serialises");
    hex::encode(&Sha256::digest(&json)[..6])
}

/// Directory name for a run: the preset name when given, else the hash.
pub fn run_dir_name(config: &ScenarioConfig) -> String {
    match &config.name {
        Some(n) if !n.is_empty() && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') => n.clone(),
        _ => config_hash(config),
    }
}

fn axis_labels(dist: &DistributionGrid) -> (&'static str, &'static str) {
    match dist.axes {
        Axes::Position(_) => ("x", "y"),
        Axes::Momentum(_) => ("p_x", "p_y"),
    }
}

/// CSV with header `x,y,value` (or `p_x,p_y,value`), `x` varying fastest,
/// every number printed with 17 significant digits.
pub fn write_csv<W: Write>(dist: &DistributionGrid, mut w: W) -> io::Result<()> {
    let (lx, ly) = axis_labels(dist);
    writeln!(w, "{lx},{ly},value")?;
    let (xs, ys) = (dist.xs(), dist.ys());
    for (iy, y) in ys.iter().enumerate() {
        for (ix, x) in xs.iter().enumerate() {
            writeln!(w, "{x:.16e},{y:.16e},{:.16e}", dist.at(ix, iy))?;
        }
    }
    w.flush()
}

#[derive(Serialize)]
struct JsonGrid<'a> {
    manifest: &'a Manifest,
    kind: OutputKind,
    x_label: &'a str,
    y_label: &'a str,
    x: Vec<f64>,
    y: Vec<f64>,
    /// `values[iy][ix]`.
    values: Vec<&'a [f64]>,
}

pub fn write_json<W: Write>(dist: &DistributionGrid, kind: OutputKind, manifest: &Manifest, w: W) -> io::Result<()> {
    let (x_label, y_label) = axis_labels(dist);
    let doc = JsonGrid {
        manifest,
        kind,
        x_label,
        y_label,
        x: dist.xs(),
        y: dist.ys(),
        values: dist.values.chunks(dist.nx()).collect(),
    };
    serde_json::to_writer(w, &doc).map_err(io::Error::other)
}

/// Grayscale heatmap, linear in the density, brightest at the maximum.
/// Rows run from high `y` (top) to low `y`. `window` crops to
/// `(x_min, x_max, y_min, y_max)` in axis units.
pub fn render_heatmap(dist: &DistributionGrid, window: Option<(f64, f64, f64, f64)>) -> GrayImage {
    let (xs, ys) = (dist.xs(), dist.ys());
    let inside = |v: f64, lo: f64, hi: f64| v >= lo - 1e-12 && v <= hi + 1e-12;
    let (cols, rows): (Vec<usize>, Vec<usize>) = match window {
        Some((x0, x1, y0, y1)) => (
            (0..xs.len()).filter(|&i| inside(xs[i], x0, x1)).collect(),
            (0..ys.len()).filter(|&i| inside(ys[i], y0, y1)).collect(),
        ),
        None => ((0..xs.len()).collect(), (0..ys.len()).collect()),
    };
    let peak = rows
        .iter()
        .flat_map(|&iy| cols.iter().map(move |&ix| (ix, iy)))
        .map(|(ix, iy)| dist.at(ix, iy))
        .fold(0.0, f64::max);
    let mut img = GrayImage::new(cols.len() as u32, rows.len() as u32);
    for (r, &iy) in rows.iter().rev().enumerate() {
        for (c, &ix) in cols.iter().enumerate() {
            let v = if peak > 0.0 { dist.at(ix, iy) / peak } else { 0.0 };
            img.put_pixel(c as u32, r as u32, Luma([(v.clamp(0.0, 1.0) * 255.0).round() as u8]));
        }
    }
    img
}

/// Writes `<dir>/<output>.<ext>` (plus `.png`) for each distribution and
/// `<dir>/manifest.json`. Returns the paths written.
pub fn write_outputs(
    dir: &Path,
    manifest: &mut Manifest,
    outputs: &[(OutputKind, DistributionGrid, Option<(f64, f64, f64, f64)>)],
    format: DataFormat,
    images: bool,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    // The manifest is complete before any data file is written so JSON
    // output can embed it.
    for (kind, dist, window) in outputs {
        let file = format!("{}.{}", kind.file_stem(), format.extension());
        let image = images.then(|| format!("{}.png", kind.file_stem()));
        manifest.outputs.push(ManifestEntry {
            kind: *kind,
            file,
            image: image.clone(),
            nx: dist.nx(),
            ny: dist.ny(),
            mass: dist.mass(),
        });
        if let Some(name) = image {
            let path = dir.join(name);
            render_heatmap(dist, *window).save(&path).map_err(io::Error::other)?;
            written.push(path);
        }
    }
    for ((kind, dist, _), entry) in outputs.iter().zip(&manifest.outputs) {
        let path = dir.join(&entry.file);
        let w = BufWriter::new(fs::File::create(&path)?);
        match format {
            DataFormat::Csv => write_csv(dist, w)?,
            DataFormat::Json => write_json(dist, *kind, manifest, w)?,
        }
        written.push(path);
    }
    let path = dir.join("manifest.json");
    let mut w = BufWriter::new(fs::File::create(&path)?);
    serde_json::to_writer_pretty(&mut w, manifest).map_err(io::Error::other)?;
    writeln!(w)?;
    w.flush()?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SpatialGrid;
    use crate::scenario::preset;

    fn ramp() -> DistributionGrid {
        let grid = SpatialGrid::new(3, 2, (-1.0, 1.0), (0.0, 1.0)).unwrap();
        DistributionGrid {
            axes: Axes::Position(grid),
            values: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            normalization: Normalization::Raw,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&ramp(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y,value");
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[1], "-1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0");
        assert_eq!(lines[6], "1.0000000000000000e0,1.0000000000000000e0,5.0000000000000000e0");
    }

    #[test]
    fn heatmap_is_bright_at_peak_and_y_up() {
        let img = render_heatmap(&ramp(), None);
        assert_eq!(img.dimensions(), (3, 2));
        assert_eq!(img.get_pixel(2, 0)[0], 255);
        assert_eq!(img.get_pixel(0, 1)[0], 0);
        let cropped = render_heatmap(&ramp(), Some((-0.1, 1.0, 0.0, 0.5)));
        assert_eq!(cropped.dimensions(), (2, 1));
    }

    #[test]
    fn hash_tracks_content() {
        let a = preset("fig2e").unwrap();
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.beam.sigma_x = 0.21;
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 12);
        assert_eq!(run_dir_name(&a), "fig2e");
        b.name = None;
        assert_eq!(run_dir_name(&b), config_hash(&b));
    }
}
