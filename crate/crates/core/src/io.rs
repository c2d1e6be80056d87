//! CSV readers and writers for clouds, ground truth, partitions and index
//! lists.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a cloud
//! written and read back is bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::detector::{Label, Partition, PointFlags};
use crate::error::{Error, Result};
use crate::geometry::{GroundTruthLabel, PointCloud};

pub const GROUND_TRUTH_HEADER: &str = "index,near_singularity,distance,stratum_id";
pub const PARTITION_HEADER: &str = "index,label,n_long_bars,annulus_size,flags";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Delimiter {
    /// Commas if the first data line has one, otherwise whitespace.
    #[default]
    Auto,
    Comma,
    Whitespace,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub delimiter: Delimiter,
    /// `None` skips the first line only if it does not parse as numbers.
    pub skip_header: Option<bool>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Loads a rectangular numeric table; the column count becomes the ambient
/// dimension. Blank lines and lines starting with `#` are ignored.
pub fn load_cloud(path: &Path, opts: &LoadOptions) -> Result<PointCloud> {
    parse_cloud(&read(path)?, path, opts)
}

/// As [`load_cloud`], on text already in memory; `path` is used in errors.
pub fn parse_cloud(text: &str, path: &Path, opts: &LoadOptions) -> Result<PointCloud> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    let Some(&(_, first)) = lines.peek() else {
        return Err(parse_err(path, 1, "file contains no data rows"));
    };
    let comma = match opts.delimiter {
        Delimiter::Auto => first.contains(','),
        Delimiter::Comma => true,
        Delimiter::Whitespace => false,
    };
    let split = |l: &str| -> Vec<String> {
        if comma {
            l.split(',').map(|f| f.trim().to_string()).collect()
        } else {
            l.split_whitespace().map(str::to_string).collect()
        }
    };
    let skip = opts
        .skip_header
        .unwrap_or_else(|| split(first).iter().any(|f| f.parse::<f64>().is_err()));
    if skip {
        lines.next();
    }

    let mut coords = Vec::new();
    let mut dim = None;
    for (lineno, line) in lines {
        let fields = split(line);
        let expected = *dim.get_or_insert(fields.len());
        if fields.len() != expected {
            return Err(parse_err(
                path,
                lineno,
                format!("ragged row: expected {expected} fields, found {}", fields.len()),
            ));
        }
        for (col, f) in fields.iter().enumerate() {
            let v: f64 = f
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("field {} is not a number: `{f}`", col + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("field {} is not finite: `{f}`", col + 1),
                ));
            }
            coords.push(v);
        }
    }
    let Some(dim) = dim else {
        return Err(parse_err(path, 1, "file contains no data rows"));
    };
    if dim == 0 {
        return Err(parse_err(path, 1, "rows have no fields"));
    }
    PointCloud::from_flat(dim, coords)
}

pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..cloud.ambient_dim()).map(|d| format!("x{d}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for p in cloud.points() {
        for (d, x) in p.iter().enumerate() {
            if d > 0 {
                out.push(',');
            }
            write!(out, "{x}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    write_text(path, &cloud_to_csv(cloud))
}

pub fn ground_truth_to_csv(labels: &[GroundTruthLabel]) -> String {
    let mut out = String::from(GROUND_TRUTH_HEADER);
    out.push('\n');
    for (i, g) in labels.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{}",
            g.near_singularity, g.distance_to_singular_locus, g.stratum_id
        )
        .unwrap();
    }
    out
}

pub fn write_ground_truth(path: &Path, labels: &[GroundTruthLabel]) -> Result<()> {
    write_text(path, &ground_truth_to_csv(labels))
}

/// Reads a ground-truth sidecar. Rows must list indices `0, 1, 2, ...`.
pub fn read_ground_truth(path: &Path) -> Result<Vec<GroundTruthLabel>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (lineno, fields) in table_rows(&text, path, GROUND_TRUTH_HEADER)? {
        let index: usize = field(path, lineno, &fields[0], "index")?;
        if index != out.len() {
            return Err(parse_err(
                path,
                lineno,
                format!("expected index {}, found {index}", out.len()),
            ));
        }
        out.push(GroundTruthLabel {
            near_singularity: field(path, lineno, &fields[1], "near_singularity")?,
            distance_to_singular_locus: field(path, lineno, &fields[2], "distance")?,
            stratum_id: field(path, lineno, &fields[3], "stratum_id")?,
        });
    }
    Ok(out)
}

pub fn partition_to_csv(p: &Partition) -> String {
    let mut out = String::from(PARTITION_HEADER);
    out.push('\n');
    for i in 0..p.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.indices[i],
            p.labels[i],
            p.long_bars[i],
            p.annulus_sizes[i],
            p.flags[i].to_field()
        )
        .unwrap();
    }
    out
}

pub fn write_partition(path: &Path, p: &Partition) -> Result<()> {
    write_text(path, &partition_to_csv(p))
}

/// Reads a partition CSV, checking that each label agrees with its long-bar
/// count.
pub fn read_partition(path: &Path) -> Result<Partition> {
    let text = read(path)?;
    let mut p = Partition::default();
    for (lineno, fields) in table_rows(&text, path, PARTITION_HEADER)? {
        let label: Label = field(path, lineno, &fields[1], "label")?;
        let bars: usize = field(path, lineno, &fields[2], "n_long_bars")?;
        if Label::from_long_bars(bars) != label {
            return Err(parse_err(
                path,
                lineno,
                format!("label {label} disagrees with {bars} long bars"),
            ));
        }
        p.indices.push(field(path, lineno, &fields[0], "index")?);
        p.labels.push(label);
        p.long_bars.push(bars);
        p.annulus_sizes.push(field(path, lineno, &fields[3], "annulus_size")?);
        p.flags
            .push(PointFlags::from_field(&fields[4]).map_err(|e| parse_err(path, lineno, e.to_string()))?);
    }
    Ok(p)
}

/// Reads point indices, one per line; an optional `index` header and any
/// further comma-separated columns are ignored.
pub fn read_indices(path: &Path) -> Result<Vec<usize>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let first = line.split(',').next().unwrap_or("").trim();
        if first.is_empty() || (i == 0 && first == "index") {
            continue;
        }
        out.push(field(path, i + 1, first, "index")?);
    }
    Ok(out)
}

pub fn write_indices(path: &Path, indices: &[usize]) -> Result<()> {
    let mut out = String::from("index\n");
    for i in indices {
        writeln!(out, "{i}").unwrap();
    }
    write_text(path, &out)
}

/// Data rows of a CSV with the given header, split into fields and checked
/// for the header's column count.
fn table_rows(text: &str, path: &Path, header: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((_, h)) => {
            return Err(parse_err(
                path,
                1,
                format!("expected header `{header}`, found `{}`", h.trim()),
            ))
        }
        None => return Err(parse_err(path, 1, "empty file")),
    }
    let cols = header.split(',').count();
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != cols {
            return Err(parse_err(
                path,
                i + 1,
                format!("expected {cols} fields, found {}", fields.len()),
            ));
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, text: &str, name: &str) -> Result<T> {
    text.parse()
        .map_err(|_| parse_err(path, line, format!("invalid {name}: `{text}`")))
}
