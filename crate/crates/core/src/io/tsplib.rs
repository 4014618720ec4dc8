//! TSPLIB subset: `KEY : VALUE` headers, `NODE_COORD_SECTION` with two
//! coordinates per node, optional `EOF`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::Mat;

use super::{Dataset, DatasetContent};

pub fn load_tsplib(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_tsplib(&text, &path.display().to_string())
}

/// Parses TSPLIB text. `origin` is used in error messages and as the dataset source.
pub fn parse_tsplib(text: &str, origin: &str) -> Result<Dataset> {
    let mut dimension: Option<usize> = None;
    let mut name: Option<String> = None;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut in_coords = false;

    for (lineno, line) in lines.by_ref() {
        if line.is_empty() {
            continue;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            in_coords = true;
            break;
        }
        if line == "EOF" {
            break;
        }
        let Some((key, value)) = line.split_once(':') else {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected `KEY : VALUE`, got `{line}`"),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "DIMENSION" => {
                let n = value.parse::<usize>().map_err(|_| {
                    Error::parse(origin, lineno, format!("bad DIMENSION `{value}`"))
                })?;
                if n == 0 {
                    return Err(Error::parse(origin, lineno, "DIMENSION must be positive"));
                }
                dimension = Some(n);
            }
            "NAME" => name = Some(value.to_string()),
            "NODE_COORD_TYPE" if value != "TWOD_COORDS" => {
                return Err(Error::parse(
                    origin,
                    lineno,
                    format!("unsupported NODE_COORD_TYPE {value}"),
                ));
            }
            _ => {}
        }
    }

    let n = dimension.ok_or_else(|| Error::parse(origin, 0, "missing DIMENSION header"))?;
    if !in_coords {
        return Err(Error::parse(origin, 0, "missing NODE_COORD_SECTION"));
    }

    let mut coords: Vec<Option<[f64; 2]>> = vec![None; n];
    let mut seen = 0usize;
    let mut last_line = 0usize;
    for (lineno, line) in lines {
        last_line = lineno;
        if line.is_empty() {
            continue;
        }
        if line == "EOF" || seen == n {
            break;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected `index x y`, got {} fields", fields.len()),
            ));
        }
        let idx: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(origin, lineno, format!("bad node index `{}`", fields[0])))?;
        if idx == 0 || idx > n {
            return Err(Error::parse(
                origin,
                lineno,
                format!("node index {idx} outside 1..={n}"),
            ));
        }
        let mut xy = [0.0; 2];
        for (slot, f) in xy.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(origin, lineno, format!("bad coordinate `{f}`")))?;
        }
        if coords[idx - 1].replace(xy).is_some() {
            return Err(Error::parse(
                origin,
                lineno,
                format!("duplicate node {idx}"),
            ));
        }
        seen += 1;
    }
    if seen < n {
        return Err(Error::parse(
            origin,
            last_line,
            format!("expected {n} nodes, found {seen} before end of input"),
        ));
    }

    let data: Vec<f64> = coords.into_iter().flatten().flatten().collect();
    Ok(Dataset {
        content: DatasetContent::Points {
            points: Mat::from_vec(n, 2, data)?,
        },
        labels: None,
        source: name.map_or_else(|| origin.to_string(), |nm| format!("{origin} ({nm})")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "NAME : tiny\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 22 22\n2 36 26\n3 21 45\nEOF\n";

    #[test]
    fn parses_header_and_nodes() {
        let d = parse_tsplib(SMALL, "tiny.tsp").unwrap();
        let p = d.points().unwrap();
        assert_eq!(p.shape(), (3, 2));
        assert_eq!(p.row(0), &[22.0, 22.0]);
        assert_eq!(p.row(2), &[21.0, 45.0]);
    }

    #[test]
    fn header_without_spaces_and_unordered_nodes() {
        let text = "DIMENSION: 2\nNODE_COORD_SECTION\n2 1.5 2.5\n1 -3 4e1\n";
        let d = parse_tsplib(text, "t").unwrap();
        assert_eq!(d.points().unwrap().row(0), &[-3.0, 40.0]);
        assert_eq!(d.points().unwrap().row(1), &[1.5, 2.5]);
    }

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_dimension() {
        let e = parse_tsplib("NAME : x\nNODE_COORD_SECTION\n1 2 3\n", "t").unwrap_err();
        assert!(e.to_string().contains("DIMENSION"));
    }

    #[test]
    fn malformed_coordinate_reports_line() {
        let text = "DIMENSION : 2\nNODE_COORD_SECTION\n1 2 3\n2 x 3\nEOF\n";
        assert_eq!(line_of(parse_tsplib(text, "t").unwrap_err()), 4);
        let text = "DIMENSION : 2\nNODE_COORD_SECTION\n1 2 3\n2 3\nEOF\n";
        assert_eq!(line_of(parse_tsplib(text, "t").unwrap_err()), 4);
    }

    #[test]
    fn early_eof() {
        let text = "DIMENSION : 3\nNODE_COORD_SECTION\n1 2 3\n2 3 4\nEOF\n";
        let e = parse_tsplib(text, "t").unwrap_err();
        assert!(e.to_string().contains("expected 3 nodes"));
    }

    #[test]
    fn bad_index_and_duplicates() {
        let text = "DIMENSION : 2\nNODE_COORD_SECTION\n1 2 3\n5 3 4\n";
        assert_eq!(line_of(parse_tsplib(text, "t").unwrap_err()), 4);
        let text = "DIMENSION : 2\nNODE_COORD_SECTION\n1 2 3\n1 3 4\n";
        assert_eq!(line_of(parse_tsplib(text, "t").unwrap_err()), 4);
    }

    #[test]
    fn missing_section_and_garbage_header() {
        assert!(parse_tsplib("DIMENSION : 2\n", "t").is_err());
        assert_eq!(line_of(parse_tsplib("DIMENSION 2\n", "t").unwrap_err()), 1);
    }
}
