//! File formats: measure and Lévy-data JSON, moment-table CSV, transform
//! value records, and atomic writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::limits::LevyData;
use crate::measure::{AtomicMeasure1D, AtomicMeasure2D, MomentTable2D};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Domain(#[from] Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Atom2DRecord {
    s_angle: f64,
    t_angle: f64,
    weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Atom1DRecord {
    x_angle: f64,
    weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeasureFile<A> {
    atoms: Vec<A>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LevyFile {
    rho1: MeasureFile<Atom2DRecord>,
    rho2: MeasureFile<Atom2DRecord>,
    a: f64,
    gamma1_angle: f64,
    gamma2_angle: f64,
}

fn json<T: for<'de> Deserialize<'de>>(text: &str) -> IoResult<T> {
    serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))
}

fn records_2d(mu: &AtomicMeasure2D) -> MeasureFile<Atom2DRecord> {
    MeasureFile {
        atoms: mu
            .atoms()
            .iter()
            .map(|a| Atom2DRecord {
                s_angle: a.s_angle,
                t_angle: a.t_angle,
                weight: a.weight,
            })
            .collect(),
    }
}

fn triples(file: &MeasureFile<Atom2DRecord>) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    file.atoms.iter().map(|a| (a.s_angle, a.t_angle, a.weight))
}

/// Parses a probability measure on `T²`.
pub fn parse_measure_2d(text: &str) -> IoResult<AtomicMeasure2D> {
    let file: MeasureFile<Atom2DRecord> = json(text)?;
    Ok(AtomicMeasure2D::probability(triples(&file))?)
}

pub fn parse_measure_1d(text: &str) -> IoResult<AtomicMeasure1D> {
    let file: MeasureFile<Atom1DRecord> = json(text)?;
    Ok(AtomicMeasure1D::probability(file.atoms.iter().map(|a| (a.x_angle, a.weight)))?)
}

pub fn measure_2d_to_json(mu: &AtomicMeasure2D) -> String {
    serde_json::to_string_pretty(&records_2d(mu)).expect("measure serializes")
}

pub fn measure_1d_to_json(nu: &AtomicMeasure1D) -> String {
    let file = MeasureFile {
        atoms: nu
            .atoms()
            .iter()
            .map(|&(x_angle, weight)| Atom1DRecord { x_angle, weight })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("measure serializes")
}

pub fn parse_levy(text: &str) -> IoResult<LevyData> {
    let file: LevyFile = json(text)?;
    let rho1 = AtomicMeasure2D::finite(triples(&file.rho1))?;
    let rho2 = AtomicMeasure2D::finite(triples(&file.rho2))?;
    Ok(LevyData::new(
        rho1,
        rho2,
        file.a,
        Complex64::from_polar(1.0, file.gamma1_angle),
        Complex64::from_polar(1.0, file.gamma2_angle),
    )?)
}

pub fn levy_to_json(ld: &LevyData) -> String {
    let file = LevyFile {
        rho1: records_2d(&ld.rho1),
        rho2: records_2d(&ld.rho2),
        a: ld.a,
        gamma1_angle: ld.gamma1.arg(),
        gamma2_angle: ld.gamma2.arg(),
    };
    serde_json::to_string_pretty(&file).expect("Lévy data serializes")
}

/// `p,q,re,im` rows sorted by `(p, q)`, 17 significant digits.
pub fn table_to_csv(table: &MomentTable2D) -> String {
    let mut rows: Vec<(i32, i32, Complex64)> = table.iter().collect();
    rows.sort_by_key(|r| (r.0, r.1));
    let mut out = String::from("p,q,re,im\n");
    for (p, q, v) in rows {
        out.push_str(&format!("{p},{q},{:.16e},{:.16e}\n", v.re, v.im));
    }
    out
}

/// One evaluated transform value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub z: [f64; 2],
    pub w: [f64; 2],
    pub transform: String,
    pub value: [f64; 2],
    pub component: String,
}

impl TransformRecord {
    pub fn new(z: Complex64, w: Complex64, transform: &str, value: Complex64, component: &str) -> Self {
        Self {
            z: [z.re, z.im],
            w: [w.re, w.im],
            transform: transform.to_owned(),
            value: [value.re, value.im],
            component: component.to_owned(),
        }
    }
}

pub fn read_text(path: &Path) -> IoResult<String> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> IoResult<()> {
    let wrap = |source| IoError::File {
        path: path.display().to_string(),
        source,
    };
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(wrap)?;
    f.write_all(contents.as_bytes()).map_err(wrap)?;
    f.sync_all().map_err(wrap)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        wrap(e)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_round_trip() {
        let text = r#"{"atoms": [{"s_angle": -0.5, "t_angle": 1.25, "weight": 0.25},
                                 {"s_angle": 0.1, "t_angle": 0.2, "weight": 0.75}]}"#;
        let mu = parse_measure_2d(text).unwrap();
        let saved = measure_2d_to_json(&mu);
        assert_eq!(measure_2d_to_json(&parse_measure_2d(&saved).unwrap()), saved);
        let nu = parse_measure_1d(r#"{"atoms": [{"x_angle": 0.3, "weight": 1.0}]}"#).unwrap();
        assert_eq!(parse_measure_1d(&measure_1d_to_json(&nu)).unwrap(), nu);
    }

    #[test]
    fn bad_atom_index_is_reported() {
        let text = r#"{"atoms": [{"s_angle": 0, "t_angle": 0, "weight": 1.5},
                                 {"s_angle": 0, "t_angle": 1, "weight": -0.5}]}"#;
        match parse_measure_2d(text) {
            Err(IoError::Domain(Error::InvalidAtom { index, .. })) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_measure_2d("{\"atoms\": 3}"), Err(IoError::Json(_))));
    }

    #[test]
    fn levy_round_trip() {
        let ld = LevyData::normal(0.75);
        assert_eq!(parse_levy(&levy_to_json(&ld)).unwrap(), ld);
    }

    #[test]
    fn csv_layout() {
        let csv = table_to_csv(&MomentTable2D::from_measure(&AtomicMeasure2D::point_mass(0.0, 0.0), 1));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[1], "-1,-1,1.0000000000000000e0,0.0000000000000000e0");
    }

    #[test]
    fn atomic_write() {
        let dir = std::env::temp_dir().join(format!("bifree-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(read_text(&path).unwrap(), "b\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
