//! Point-cloud files.
//!
//! CSV files carry one vector per row after a `# dim=<n>` comment line; JSON
//! files hold an array of arrays.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::vector::Vector;

fn check_dims(points: &[Vector], dim: Option<usize>) -> Result<()> {
    let expected = match dim.or_else(|| points.first().map(Vector::dim)) {
        Some(d) => d,
        None => return Err(Error::invalid("point cloud is empty")),
    };
    if let Some(p) = points.iter().find(|p| p.dim() != expected) {
        return Err(Error::DimensionMismatch { expected, found: p.dim() });
    }
    if points.is_empty() {
        return Err(Error::invalid("point cloud is empty"));
    }
    Ok(())
}

pub fn read_points_csv<R: Read>(mut reader: R) -> Result<Vec<Vector>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let dim = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix("dim="))
        .map(|d| d.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad dim header `{d}`"))))
        .transpose()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let points = rdr
        .deserialize::<Vec<f64>>()
        .map(|row| Vector::new(row?))
        .collect::<Result<Vec<_>>>()?;
    check_dims(&points, dim)?;
    Ok(points)
}

pub fn write_points_csv<W: Write>(mut writer: W, points: &[Vector]) -> Result<()> {
    check_dims(points, None)?;
    writeln!(writer, "# dim={}", points[0].dim())?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for p in points {
        w.serialize(p.as_slice())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_json<R: Read>(reader: R) -> Result<Vec<Vector>> {
    let points: Vec<Vector> = serde_json::from_reader(reader)?;
    check_dims(&points, None)?;
    Ok(points)
}

pub fn write_points_json<W: Write>(writer: W, points: &[Vector]) -> Result<()> {
    check_dims(points, None)?;
    serde_json::to_writer(writer, points)?;
    Ok(())
}

/// Loads a point cloud, choosing the format from the extension (`.json`
/// or CSV otherwise).
pub fn load_points(path: &Path) -> Result<Vec<Vector>> {
    let file = BufReader::new(File::open(path)?);
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_points_json(file),
        _ => read_points_csv(file),
    }
}

pub fn save_points(path: &Path, points: &[Vector]) -> Result<()> {
    let file = File::create(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => write_points_json(file, points),
        _ => write_points_csv(file, points),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud() -> Vec<Vector> {
        vec![Vector::new(vec![1.0, 0.5]).unwrap(), Vector::new(vec![-0.25, 3.0e-7]).unwrap()]
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &cloud()).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# dim=2\n"));
        assert_eq!(read_points_csv(buf.as_slice()).unwrap(), cloud());
    }

    #[test]
    fn json_round_trip() {
        let mut buf = Vec::new();
        write_points_json(&mut buf, &cloud()).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf), "[[1.0,0.5],[-0.25,3e-7]]");
        assert_eq!(read_points_json(buf.as_slice()).unwrap(), cloud());
    }

    #[test]
    fn csv_dim_header_is_enforced() {
        let text = "# dim=3\n1,2\n";
        assert!(matches!(read_points_csv(text.as_bytes()), Err(Error::DimensionMismatch { expected: 3, found: 2 })));
        assert!(read_points_csv("# dim=2\n".as_bytes()).is_err());
    }

    #[test]
    fn files_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["pts.csv", "pts.json"] {
            let path = dir.path().join(name);
            save_points(&path, &cloud()).unwrap();
            assert_eq!(load_points(&path).unwrap(), cloud());
        }
    }
}
