use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};
use crate::infer::Evidence;
use crate::model::Network;

/// Marker for a missing value.
pub const MISSING: &str = "?";

/// Writes a header of variable names, then one row of state labels per example.
pub fn write_csv<W: std::io::Write>(writer: W, network: &Network, dataset: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(network.variables().iter().map(|v| v.name()))?;
    for e in dataset.examples() {
        w.write_record(e.values().iter().enumerate().map(|(v, x)| match x {
            Some(x) => network.variable(v).states()[*x].as_str(),
            None => MISSING,
        }))?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Reads a dataset; columns may come in any order but must name every variable once.
/// `origin` labels parse errors.
pub fn read_csv<R: std::io::Read>(reader: R, network: &Network, origin: &Path) -> Result<Dataset> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = r.headers()?.clone();
    let mut columns = Vec::with_capacity(header.len());
    let mut seen = vec![false; network.len()];
    for name in header.iter() {
        let v = network
            .index_of(name)
            .ok_or_else(|| Error::parse(origin, 1, format!("unknown variable {name}")))?;
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::parse(origin, 1, format!("duplicate column {name}")));
        }
        columns.push(v);
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::parse(
            origin,
            1,
            format!("missing column for {}", network.variable(v).name()),
        ));
    }
    let mut examples = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut values = vec![None; network.len()];
        for (field, &v) in record.iter().zip(&columns) {
            if field != MISSING {
                let x = network.variable(v).state_index(field).ok_or_else(|| {
                    Error::parse(
                        origin,
                        line,
                        format!("unknown state {field} of {}", network.variable(v).name()),
                    )
                })?;
                values[v] = Some(x);
            }
        }
        examples.push(Evidence::from_values(values));
    }
    Dataset::new(network, examples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Variable;

    fn net() -> Network {
        let vars = vec![
            Variable::new("E", vec!["e1".into(), "e2".into()]).unwrap(),
            Variable::new("B", vec!["b1".into(), "b2".into()]).unwrap(),
            Variable::new("A", vec!["a1".into(), "a2".into()]).unwrap(),
            Variable::new("C", vec!["c1".into(), "c2".into()]).unwrap(),
        ];
        Network::new("ebac", vars, vec![vec![], vec![], vec![0, 1], vec![2]]).unwrap()
    }

    const TABLE: &str = "E,B,A,C\ne1,b1,a1,?\n?,b2,a2,?\ne1,b2,a2,c1\n";

    #[test]
    fn reads_missing_markers() {
        let net = net();
        let data = read_csv(TABLE.as_bytes(), &net, Path::new("t.csv")).unwrap();
        assert_eq!(data.len(), 3);
        assert_eq!(
            data.examples()[1],
            Evidence::from_values(vec![None, Some(1), Some(1), None])
        );
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let net = net();
        let data = read_csv(TABLE.as_bytes(), &net, Path::new("t.csv")).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &net, &data).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), TABLE);
    }

    #[test]
    fn reordered_columns() {
        let net = net();
        let data = read_csv("C,A,B,E\n?,a2,b1,e2\n".as_bytes(), &net, Path::new("t.csv")).unwrap();
        assert_eq!(
            data.examples()[0],
            Evidence::from_values(vec![Some(1), Some(0), Some(1), None])
        );
    }

    #[test]
    fn errors_carry_line() {
        let net = net();
        match read_csv(
            "E,B,A,C\ne1,b1,a1,c1\ne1,b9,a1,c1\n".as_bytes(),
            &net,
            Path::new("t.csv"),
        ) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_csv("E,B,A\n".as_bytes(), &net, Path::new("t.csv")).is_err());
    }
}
