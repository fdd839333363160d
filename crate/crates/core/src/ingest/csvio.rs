//! Rays and positions CSV files, plus the `dataset.json` sidecar.
//!
//! A dataset directory holds:
//!
//! ```text
//! rays.csv       rx_id,path_id,power_dbm,delay_ns,dod_az_deg,dod_el_deg,doa_az_deg,doa_el_deg
//! positions.csv  rx_id,x_m,y_m,z_m[,t_s]
//! dataset.json   optional metadata (label, frequency, tx, layout, flagged receivers)
//! ```

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::model::{PathSet, PathTuple, ReceiverLayout, TrajectoryPoint, Vec3};

use super::dataset::{Dataset, DatasetMetadata, POSITION_TOLERANCE_M};
use super::numfmt::format_sig9;
use super::IngestError;

pub const RAYS_FILE: &str = "rays.csv";
pub const POSITIONS_FILE: &str = "positions.csv";
pub const METADATA_FILE: &str = "dataset.json";

pub const RAYS_HEADER: [&str; 8] = [
    "rx_id",
    "path_id",
    "power_dbm",
    "delay_ns",
    "dod_az_deg",
    "dod_el_deg",
    "doa_az_deg",
    "doa_el_deg",
];
pub const POSITIONS_HEADER: [&str; 4] = ["rx_id", "x_m", "y_m", "z_m"];
pub const TIME_COLUMN: &str = "t_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    /// Reject unknown columns instead of ignoring them with a warning.
    pub strict: bool,
}

/// Column indices for the required names, plus optional ones when present.
fn resolve_columns(
    path: &Path,
    header: &csv::StringRecord,
    required: &[&str],
    optional: &[&str],
    opts: LoadOptions,
) -> Result<(Vec<usize>, Vec<Option<usize>>), IngestError> {
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let malformed = |message: String| IngestError::MalformedHeader {
        path: path.to_path_buf(),
        message,
    };
    let mut seen = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if seen.insert(*n, i).is_some() {
            return Err(malformed(format!("column {n:?} appears twice")));
        }
    }
    let req = required
        .iter()
        .map(|r| {
            seen.get(r)
                .copied()
                .ok_or_else(|| malformed(format!("missing column {r:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let opt: Vec<Option<usize>> = optional.iter().map(|o| seen.get(o).copied()).collect();
    let known = |n: &str| required.contains(&n) || optional.contains(&n);
    let extra: Vec<&str> = names.iter().copied().filter(|n| !known(n)).collect();
    if opts.strict {
        let expected: Vec<&str> = required
            .iter()
            .copied()
            .chain(optional.iter().copied().filter(|o| seen.contains_key(o)))
            .collect();
        if names != expected {
            return Err(malformed(format!(
                "expected header {:?}, found {:?}",
                expected.join(","),
                names.join(",")
            )));
        }
    } else if !extra.is_empty() {
        log::warn!("{}: ignoring unknown columns {:?}", path.display(), extra);
    }
    Ok((req, opt))
}

fn reader(path: &Path) -> Result<csv::Reader<fs::File>, IngestError> {
    let file = fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

struct Row<'a> {
    path: &'a Path,
    header: &'a csv::StringRecord,
    record: csv::StringRecord,
}

impl Row<'_> {
    fn line(&self) -> u64 {
        self.record.position().map(|p| p.line()).unwrap_or(0)
    }

    fn text(&self, col: usize) -> &str {
        self.record.get(col).unwrap_or("").trim()
    }

    fn number(&self, col: usize) -> Result<f64, IngestError> {
        let raw = self.text(col);
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| IngestError::BadField {
                path: self.path.to_path_buf(),
                line: self.line(),
                column: self.header.get(col).unwrap_or("?").trim().to_string(),
                value: raw.to_string(),
            })
    }

    fn integer(&self, col: usize) -> Result<u64, IngestError> {
        let raw = self.text(col);
        raw.parse::<u64>().map_err(|_| IngestError::BadField {
            path: self.path.to_path_buf(),
            line: self.line(),
            column: self.header.get(col).unwrap_or("?").trim().to_string(),
            value: raw.to_string(),
        })
    }
}

fn csv_err(path: &Path, source: csv::Error) -> IngestError {
    IngestError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a rays file together with its positions file. Receivers listed in
/// the positions file but without rays get empty path sets; rays for a
/// receiver missing from the positions file are an error.
pub fn load_rayset_csv(
    rays_path: &Path,
    positions_path: &Path,
    metadata: DatasetMetadata,
    opts: LoadOptions,
) -> Result<Dataset, IngestError> {
    let mut dataset = Dataset::new(metadata);

    let mut positions = reader(positions_path)?;
    let header = positions.headers().map_err(|e| csv_err(positions_path, e))?.clone();
    let (cols, opt) = resolve_columns(positions_path, &header, &POSITIONS_HEADER, &[TIME_COLUMN], opts)?;
    let mut order: Vec<(String, Vec3, Option<f64>)> = Vec::new();
    for record in positions.records() {
        let row = Row {
            path: positions_path,
            header: &header,
            record: record.map_err(|e| csv_err(positions_path, e))?,
        };
        let id = row.text(cols[0]).to_string();
        let pos = Vec3::new(row.number(cols[1])?, row.number(cols[2])?, row.number(cols[3])?);
        let t = opt[0].map(|c| row.number(c)).transpose()?;
        order.push((id, pos, t));
    }

    let mut paths: HashMap<String, Vec<(u64, PathTuple)>> = HashMap::new();
    let known: HashMap<&str, ()> = order.iter().map(|(id, _, _)| (id.as_str(), ())).collect();
    let mut rays = reader(rays_path)?;
    let header = rays.headers().map_err(|e| csv_err(rays_path, e))?.clone();
    let (cols, _) = resolve_columns(rays_path, &header, &RAYS_HEADER, &[], opts)?;
    for record in rays.records() {
        let row = Row {
            path: rays_path,
            header: &header,
            record: record.map_err(|e| csv_err(rays_path, e))?,
        };
        let id = row.text(cols[0]);
        if !known.contains_key(id) {
            return Err(IngestError::UnknownRxId {
                path: rays_path.to_path_buf(),
                line: row.line(),
                rx_id: id.to_string(),
            });
        }
        let path_id = row.integer(cols[1])?;
        let tuple = PathTuple {
            power_dbm: row.number(cols[2])?,
            delay_s: row.number(cols[3])? * 1e-9,
            dod_az: row.number(cols[4])?,
            dod_el: row.number(cols[5])?,
            doa_az: row.number(cols[6])?,
            doa_el: row.number(cols[7])?,
        };
        let list = paths.entry(id.to_string()).or_default();
        if list.iter().any(|(p, _)| *p == path_id) {
            return Err(IngestError::DuplicatePathId {
                path: rays_path.to_path_buf(),
                line: row.line(),
                rx_id: id.to_string(),
                path_id,
            });
        }
        list.push((path_id, tuple));
    }

    for (id, position, t) in order {
        let mut list = paths.remove(&id).unwrap_or_default();
        list.sort_by_key(|(p, _)| *p);
        let set = PathSet::new(id.clone(), list.into_iter().map(|(_, t)| t).collect());
        dataset.insert(id, position, t, set)?;
    }

    reconcile_layout(&mut dataset, positions_path)?;
    Ok(dataset)
}

/// Fills in a trajectory layout from timestamps when none is declared, and
/// checks a declared layout against the positions file.
fn reconcile_layout(dataset: &mut Dataset, positions_path: &Path) -> Result<(), IngestError> {
    let layout_err = |message: String| IngestError::Layout {
        path: positions_path.to_path_buf(),
        message,
    };
    match &dataset.metadata.layout {
        Some(layout) => {
            layout.validate()?;
            for r in layout.receivers() {
                let entry = dataset
                    .get(&r.rx_id)
                    .ok_or_else(|| layout_err(format!("layout receiver {} missing from positions", r.rx_id)))?;
                if !(entry.position.distance(r.position) <= POSITION_TOLERANCE_M) {
                    return Err(layout_err(format!(
                        "receiver {} position disagrees with the declared layout",
                        r.rx_id
                    )));
                }
            }
        }
        None => {
            let timed = dataset.receivers.values().filter(|r| r.t.is_some()).count();
            if timed > 0 {
                let points: Vec<TrajectoryPoint> = dataset
                    .receivers
                    .iter()
                    .map(|(id, r)| TrajectoryPoint {
                        rx_id: id.clone(),
                        t: r.t.unwrap_or(f64::NAN),
                        position: r.position,
                    })
                    .collect();
                let layout = ReceiverLayout::Trajectory { points };
                layout.validate()?;
                dataset.metadata.layout = Some(layout);
            }
        }
    }
    Ok(())
}

/// Loads `rays.csv`, `positions.csv` and (if present) `dataset.json` from a
/// dataset directory.
pub fn load_dataset_dir(dir: &Path, opts: LoadOptions) -> Result<Dataset, IngestError> {
    let meta_path = dir.join(METADATA_FILE);
    let metadata = if meta_path.exists() {
        let text = fs::read_to_string(&meta_path).map_err(|source| IngestError::Io {
            path: meta_path.clone(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| IngestError::Json {
            path: meta_path.clone(),
            source,
        })?
    } else {
        DatasetMetadata {
            label: dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            ..Default::default()
        }
    };
    load_rayset_csv(&dir.join(RAYS_FILE), &dir.join(POSITIONS_FILE), metadata, opts)
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), IngestError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Writes the three dataset files into `dir`, creating it if needed.
/// Receivers without paths appear only in the positions file.
pub fn write_dataset_dir(dataset: &Dataset, dir: &Path) -> Result<Vec<PathBuf>, IngestError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let timed = !dataset.is_empty() && dataset.receivers.values().all(|r| r.t.is_some());

    let mut pos_header: Vec<&str> = POSITIONS_HEADER.to_vec();
    if timed {
        pos_header.push(TIME_COLUMN);
    }
    let mut pos_rows = Vec::with_capacity(dataset.len());
    let mut ray_rows = Vec::new();
    for (id, entry) in &dataset.receivers {
        let mut row = vec![
            id.clone(),
            format_sig9(entry.position.x),
            format_sig9(entry.position.y),
            format_sig9(entry.position.z),
        ];
        if timed {
            row.push(format_sig9(entry.t.unwrap_or_default()));
        }
        pos_rows.push(row);
        for (k, p) in entry.paths.paths.iter().enumerate() {
            ray_rows.push(vec![
                id.clone(),
                k.to_string(),
                format_sig9(p.power_dbm),
                format_sig9(p.delay_s * 1e9),
                format_sig9(p.dod_az),
                format_sig9(p.dod_el),
                format_sig9(p.doa_az),
                format_sig9(p.doa_el),
            ]);
        }
    }
    let rays = dir.join(RAYS_FILE);
    let positions = dir.join(POSITIONS_FILE);
    let meta = dir.join(METADATA_FILE);
    write_csv(&rays, &RAYS_HEADER, &ray_rows)?;
    write_csv(&positions, &pos_header, &pos_rows)?;
    let mut f = fs::File::create(&meta).map_err(io_err(&meta))?;
    let json = serde_json::to_string_pretty(&dataset.metadata).expect("metadata serializes");
    f.write_all(json.as_bytes()).map_err(io_err(&meta))?;
    f.write_all(b"\n").map_err(io_err(&meta))?;
    Ok(vec![rays, positions, meta])
}
