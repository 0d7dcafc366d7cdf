//! CSV readers for running the statistics on external data.
//!
//! Formats (header row required):
//! - `group,value` for one-way ANOVA and DMRT
//! - `block,treatment,value` for the randomized complete block design
//! - `x,y` for regression

use std::io::Read;

use super::StatsError;

fn reader<R: Read>(src: R, expected: &[&str]) -> Result<csv::Reader<R>, StatsError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src);
    let headers = rdr
        .headers()
        .map_err(|e| StatsError::Input { line: 1, msg: e.to_string() })?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(StatsError::Input {
            line: 1,
            msg: format!("expected header {}, got {}", expected.join(","), got.join(",")),
        });
    }
    Ok(rdr)
}

fn parse_value(field: &str, line: u64, what: &str) -> Result<f64, StatsError> {
    let v: f64 = field
        .parse()
        .map_err(|_| StatsError::Input { line, msg: format!("{what} '{field}' is not a number") })?;
    if !v.is_finite() {
        return Err(StatsError::Input { line, msg: format!("{what} '{field}' is not finite") });
    }
    Ok(v)
}

fn records<R: Read>(
    rdr: &mut csv::Reader<R>,
    width: usize,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord), StatsError>> + '_ {
    rdr.records().enumerate().map(move |(i, rec)| {
        let line = rec
            .as_ref()
            .ok()
            .and_then(|r| r.position().map(|p| p.line()))
            .unwrap_or(i as u64 + 2);
        let rec = rec.map_err(|e| StatsError::Input { line, msg: e.to_string() })?;
        if rec.len() != width {
            return Err(StatsError::Input {
                line,
                msg: format!("expected {width} fields, got {}", rec.len()),
            });
        }
        Ok((line, rec))
    })
}

/// Groups in order of first appearance.
pub fn read_groups<R: Read>(src: R) -> Result<Vec<(String, Vec<f64>)>, StatsError> {
    let mut rdr = reader(src, &["group", "value"])?;
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for rec in records(&mut rdr, 2) {
        let (line, rec) = rec?;
        let label = &rec[0];
        if label.is_empty() {
            return Err(StatsError::Input { line, msg: "empty group label".into() });
        }
        let v = parse_value(&rec[1], line, "value")?;
        match groups.iter_mut().find(|(g, _)| g == label) {
            Some((_, vals)) => vals.push(v),
            None => groups.push((label.to_string(), vec![v])),
        }
    }
    Ok(groups)
}

/// Blocks x treatments matrix plus the labels of each axis, in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTable {
    pub blocks: Vec<String>,
    pub treatments: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

pub fn read_blocks<R: Read>(src: R) -> Result<BlockTable, StatsError> {
    let mut rdr = reader(src, &["block", "treatment", "value"])?;
    let mut cells: Vec<(usize, usize, f64, u64)> = Vec::new();
    let mut blocks: Vec<String> = Vec::new();
    let mut treatments: Vec<String> = Vec::new();
    let index = |names: &mut Vec<String>, s: &str| match names.iter().position(|n| n == s) {
        Some(i) => i,
        None => {
            names.push(s.to_string());
            names.len() - 1
        }
    };
    for rec in records(&mut rdr, 3) {
        let (line, rec) = rec?;
        if rec[0].is_empty() || rec[1].is_empty() {
            return Err(StatsError::Input { line, msg: "empty block or treatment label".into() });
        }
        let b = index(&mut blocks, &rec[0]);
        let t = index(&mut treatments, &rec[1]);
        let v = parse_value(&rec[2], line, "value")?;
        cells.push((b, t, v, line));
    }
    let mut data = vec![vec![None; treatments.len()]; blocks.len()];
    for (b, t, v, line) in cells {
        if data[b][t].replace(v).is_some() {
            return Err(StatsError::Input {
                line,
                msg: format!("duplicate cell ({}, {})", blocks[b], treatments[t]),
            });
        }
    }
    let mut out = Vec::with_capacity(blocks.len());
    for (b, row) in data.into_iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (t, cell) in row.into_iter().enumerate() {
            r.push(cell.ok_or_else(|| {
                StatsError::Ragged(format!("missing cell ({}, {})", blocks[b], treatments[t]))
            })?);
        }
        out.push(r);
    }
    Ok(BlockTable { blocks, treatments, data: out })
}

pub fn read_points<R: Read>(src: R) -> Result<Vec<(f64, f64)>, StatsError> {
    let mut rdr = reader(src, &["x", "y"])?;
    let mut pts = Vec::new();
    for rec in records(&mut rdr, 2) {
        let (line, rec) = rec?;
        pts.push((parse_value(&rec[0], line, "x")?, parse_value(&rec[1], line, "y")?));
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_keep_first_appearance_order() {
        let g = read_groups("group,value\nb,1\na,2\nb,3\n".as_bytes()).unwrap();
        assert_eq!(g, vec![("b".to_string(), vec![1.0, 3.0]), ("a".to_string(), vec![2.0])]);
    }

    #[test]
    fn bad_value_reports_line() {
        let err = read_groups("group,value\na,1\na,oops\n".as_bytes()).unwrap_err();
        assert_eq!(err, StatsError::Input { line: 3, msg: "value 'oops' is not a number".into() });
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_points("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn blocks_assemble_matrix() {
        let src = "block,treatment,value\n1,C,5\n1,t0,6\n2,t0,8\n2,C,7\n";
        let t = read_blocks(src.as_bytes()).unwrap();
        assert_eq!(t.treatments, vec!["C", "t0"]);
        assert_eq!(t.data, vec![vec![5.0, 6.0], vec![7.0, 8.0]]);
    }

    #[test]
    fn blocks_missing_and_duplicate_cells() {
        assert!(matches!(
            read_blocks("block,treatment,value\n1,C,5\n1,t0,6\n2,C,7\n".as_bytes()),
            Err(StatsError::Ragged(_))
        ));
        assert!(matches!(
            read_blocks("block,treatment,value\n1,C,5\n1,C,6\n".as_bytes()),
            Err(StatsError::Input { line: 3, .. })
        ));
    }

    #[test]
    fn points_parse() {
        assert_eq!(read_points("x,y\n0,1.5\n10, 2\n".as_bytes()).unwrap(), vec![(0.0, 1.5), (10.0, 2.0)]);
        assert!(read_points("x,y\n0,inf\n".as_bytes()).is_err());
    }
}
