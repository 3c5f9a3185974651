//! Small binary datasets over ±1 units.
//!
//! Images are plain PBM (`P1`); a file may hold several images back to back.
//! A directory of images may carry a `manifest.json` of the form
//! `{"labels": {"<file name>": <label>, ...}}`, applied to every image in
//! the named file.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::rng;
use crate::sampling::{SampleCounter, SampleSet};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    n_units: usize,
    items: Vec<Vec<i8>>,
    labels: Option<Vec<i64>>,
}

impl BinaryDataset {
    pub fn new(n_units: usize, items: Vec<Vec<i8>>) -> Result<Self> {
        if n_units == 0 {
            return Err(Error::InvalidArgument("items need at least one unit".into()));
        }
        for item in &items {
            if item.len() != n_units {
                return Err(Error::DimensionMismatch { expected: n_units, found: item.len() });
            }
            if item.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::InvalidArgument("units must be +1 or -1".into()));
            }
        }
        Ok(Self { n_units, items, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.items.len() {
            return Err(Error::DimensionMismatch { expected: self.items.len(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn items(&self) -> &[Vec<i8>] {
        &self.items
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The items as a multiset.
    pub fn to_sample_set(&self) -> SampleSet {
        let mut counter = SampleCounter::new(self.n_units);
        for item in &self.items {
            counter.add(item);
        }
        counter.finish()
    }

    fn subset(&self, indices: &[usize]) -> Self {
        Self {
            n_units: self.n_units,
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
            labels: self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }
}

/// Every full-row pattern followed by every full-column pattern on a
/// `rows × cols` grid, flattened row-major with `+1` = on, duplicates removed.
pub fn bars_and_stripes(rows: usize, cols: usize) -> Result<BinaryDataset> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!("grid {rows}x{cols} needs at least one row and column")));
    }
    if rows >= 31 || cols >= 31 {
        return Err(Error::InvalidArgument(format!("grid {rows}x{cols} is too large to enumerate")));
    }
    let on = |bit: bool| if bit { 1i8 } else { -1 };
    let mut seen = HashSet::new();
    let mut items = Vec::new();
    for bars in 0..1u32 << rows {
        let item: Vec<i8> = (0..rows * cols).map(|k| on(bars >> (k / cols) & 1 == 1)).collect();
        if seen.insert(item.clone()) {
            items.push(item);
        }
    }
    for stripes in 0..1u32 << cols {
        let item: Vec<i8> = (0..rows * cols).map(|k| on(stripes >> (k % cols) & 1 == 1)).collect();
        if seen.insert(item.clone()) {
            items.push(item);
        }
    }
    BinaryDataset::new(rows * cols, items)
}

/// Whether `item` is a pure bar or stripe pattern on the grid.
pub fn is_bar_or_stripe(item: &[i8], rows: usize, cols: usize) -> bool {
    if item.len() != rows * cols {
        return false;
    }
    let bars = (0..rows).all(|r| item[r * cols..(r + 1) * cols].iter().all(|&s| s == item[r * cols]));
    let stripes = (0..cols).all(|c| (0..rows).all(|r| item[r * cols + c] == item[c]));
    bars || stripes
}

/// Images parsed from one P1 file: `(width, height, pixels)` each.
fn parse_pbm(text: &str, path: &Path) -> Result<Vec<(usize, usize, Vec<i8>)>> {
    let malformed = |reason: String| Error::MalformedPbm { path: path.to_owned(), reason };
    // strip comments, keep everything else as a character stream
    let mut cleaned = String::with_capacity(text.len());
    for line in text.lines() {
        cleaned.push_str(line.split('#').next().unwrap_or(""));
        cleaned.push('\n');
    }
    let mut chars = cleaned.chars().peekable();
    let skip_ws = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
    };
    let read_token = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
        let mut token = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                break;
            }
            token.push(c);
            chars.next();
        }
        token
    };
    let mut images = Vec::new();
    loop {
        skip_ws(&mut chars);
        if chars.peek().is_none() {
            break;
        }
        let magic = read_token(&mut chars);
        if magic != "P1" {
            return Err(malformed(format!("expected magic number P1, found {magic:?}")));
        }
        let mut dims = [0usize; 2];
        for (d, name) in dims.iter_mut().zip(["width", "height"]) {
            skip_ws(&mut chars);
            let token = read_token(&mut chars);
            *d = token.parse().map_err(|_| malformed(format!("invalid {name} {token:?}")))?;
            if *d == 0 {
                return Err(malformed(format!("{name} must be positive")));
            }
        }
        let [width, height] = dims;
        let mut pixels = Vec::with_capacity(width * height);
        while pixels.len() < width * height {
            skip_ws(&mut chars);
            match chars.next() {
                Some('1') => pixels.push(1),
                Some('0') => pixels.push(-1),
                Some(c) => return Err(malformed(format!("unexpected pixel character {c:?}"))),
                None => {
                    return Err(malformed(format!(
                        "expected {} pixels, file ends after {}",
                        width * height,
                        pixels.len()
                    )))
                }
            }
        }
        images.push((width, height, pixels));
    }
    if images.is_empty() {
        return Err(malformed("no image found".into()));
    }
    Ok(images)
}

#[derive(Deserialize)]
struct Manifest {
    #[serde(default)]
    labels: BTreeMap<String, i64>,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Load a P1 file, or every `*.pbm` file of a directory in name order.
pub fn load_pbm_images(path: impl AsRef<Path>) -> Result<BinaryDataset> {
    let path = path.as_ref();
    let (files, manifest) = if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("pbm")))
            .collect();
        files.sort();
        let manifest_path = path.join(MANIFEST_FILE);
        let manifest = if manifest_path.exists() {
            Some(serde_json::from_str::<Manifest>(&read_text(&manifest_path)?)?)
        } else {
            None
        };
        (files, manifest)
    } else {
        (vec![path.to_owned()], None)
    };

    let mut shape: Option<(usize, usize)> = None;
    let mut items = Vec::new();
    let mut labels = Vec::new();
    for file in &files {
        let label = manifest
            .as_ref()
            .and_then(|m| file.file_name().and_then(|n| n.to_str()).and_then(|n| m.labels.get(n).copied()));
        for (width, height, pixels) in parse_pbm(&read_text(file)?, file)? {
            match shape {
                None => shape = Some((width, height)),
                Some((w, h)) if (w, h) != (width, height) => {
                    return Err(Error::DimensionMismatch { expected: w * h, found: width * height });
                }
                Some(_) => {}
            }
            items.push(pixels);
            labels.push(label);
        }
    }
    let Some((w, h)) = shape else {
        return Err(Error::EmptyDataset);
    };
    let data = BinaryDataset::new(w * h, items)?;
    if manifest.is_some() && labels.iter().all(Option::is_some) {
        data.with_labels(labels.into_iter().flatten().collect())
    } else {
        Ok(data)
    }
}

/// Write every item as a `cols`-wide P1 image, concatenated into one file.
pub fn write_pbm(data: &BinaryDataset, rows: usize, cols: usize, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if rows * cols != data.n_units() {
        return Err(Error::DimensionMismatch { expected: data.n_units(), found: rows * cols });
    }
    let mut out = String::new();
    for item in data.items() {
        let _ = writeln!(out, "P1\n{cols} {rows}");
        for row in item.chunks(cols) {
            let line: Vec<&str> = row.iter().map(|&s| if s > 0 { "1" } else { "0" }).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Deterministic shuffled split into `(train, validation)` with
/// `⌊len · fraction⌋` validation items, kept between 1 and `len − 1`.
pub fn split(data: &BinaryDataset, validation_fraction: f64, seed: u64) -> Result<(BinaryDataset, BinaryDataset)> {
    if !(validation_fraction > 0.0 && validation_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "validation fraction {validation_fraction} must lie strictly between 0 and 1"
        )));
    }
    if data.len() < 2 {
        return Err(Error::InvalidArgument(format!("cannot split {} item(s)", data.len())));
    }
    let n_val = ((data.len() as f64 * validation_fraction).floor() as usize).clamp(1, data.len() - 1);
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng::seeded(seed));
    let (val, train) = order.split_at(n_val);
    let mut train = train.to_vec();
    let mut val = val.to_vec();
    train.sort_unstable();
    val.sort_unstable();
    Ok((data.subset(&train), data.subset(&val)))
}
