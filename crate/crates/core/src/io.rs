//! File formats. Node indices are 1-based on disk and 0-based in memory.

use std::io::{Read, Write};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::complex::{Cochain, Geometry, SimplicialComplex};
use crate::error::{Error, Result};
use crate::hodgelets::Dictionary;
use crate::sparse::SparsityCurve;

/// On-disk complex: `{"n_nodes", "edges", "triangles"}` with 1-based
/// ascending vertex lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub n_nodes: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub triangles: Vec<[usize; 3]>,
}

impl From<&SimplicialComplex> for ComplexFile {
    fn from(x: &SimplicialComplex) -> Self {
        ComplexFile {
            n_nodes: x.n_nodes(),
            edges: x.edges().iter().map(|e| e.map(|v| v + 1)).collect(),
            triangles: x.triangles().iter().map(|t| t.map(|v| v + 1)).collect(),
        }
    }
}

impl ComplexFile {
    pub fn to_complex(&self) -> Result<SimplicialComplex> {
        let edges: Vec<Vec<usize>> = self.edges.iter().map(|e| e.to_vec()).collect();
        let triangles: Vec<Vec<usize>> = self.triangles.iter().map(|t| t.to_vec()).collect();
        SimplicialComplex::from_simplices(self.n_nodes, &edges, &triangles)
    }
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn read_json<R: Read, T: for<'de> Deserialize<'de>>(r: R) -> Result<T> {
    Ok(serde_json::from_reader(r)?)
}

pub fn write_complex<W: Write>(w: W, complex: &SimplicialComplex) -> Result<()> {
    write_json(w, &ComplexFile::from(complex))
}

pub fn read_complex<R: Read>(r: R) -> Result<SimplicialComplex> {
    read_json::<_, ComplexFile>(r)?.to_complex()
}

/// CSV `node,x,y`.
pub fn write_geometry<W: Write>(w: W, geometry: &Geometry) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["node", "x", "y"])?;
    for (i, p) in geometry.positions.iter().enumerate() {
        out.write_record([(i + 1).to_string(), p[0].to_string(), p[1].to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_geometry<R: Read>(r: R) -> Result<Geometry> {
    #[derive(Deserialize)]
    struct Row {
        node: usize,
        x: f64,
        y: f64,
    }
    let mut rows: Vec<Row> = csv::Reader::from_reader(r)
        .deserialize()
        .collect::<std::result::Result<_, _>>()?;
    rows.sort_by_key(|r| r.node);
    for (i, row) in rows.iter().enumerate() {
        if row.node != i + 1 {
            return Err(Error::Parse(format!("geometry rows must cover nodes 1..{}", rows.len())));
        }
    }
    Ok(Geometry::new(rows.into_iter().map(|r| [r.x, r.y]).collect()))
}

/// CSV `edge,value` with edges written `i-j`, `i < j`.
pub fn write_cochain<W: Write>(w: W, complex: &SimplicialComplex, f: &Cochain) -> Result<()> {
    if f.len() != complex.n_edges() {
        return Err(Error::DimensionMismatch { expected: complex.n_edges(), got: f.len() });
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["edge", "value"])?;
    for (&[i, j], v) in complex.edges().iter().zip(f.values.iter()) {
        out.write_record([format!("{}-{}", i + 1, j + 1), v.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an edge cochain; unlisted edges are zero and `j-i` rows are
/// negated onto `i-j`.
pub fn read_cochain<R: Read>(r: R, complex: &SimplicialComplex) -> Result<Cochain> {
    let mut values = DVector::zeros(complex.n_edges());
    for record in csv::Reader::from_reader(r).records() {
        let record = record?;
        let (Some(edge), Some(value)) = (record.get(0), record.get(1)) else {
            return Err(Error::Parse("cochain rows need edge and value".into()));
        };
        let bad = || Error::Parse(format!("bad edge label {edge:?}"));
        let (a, b) = edge.split_once('-').ok_or_else(bad)?;
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad value {value:?}")))?;
        if a == 0 || b == 0 {
            return Err(bad());
        }
        let e = complex.edge_id(a - 1, b - 1).ok_or_else(bad)?;
        values[e] += if a < b { value } else { -value };
    }
    Ok(Cochain::edge_flow(values))
}

/// CSV `index,eigenvalue`, 1-based.
pub fn write_spectrum<W: Write>(w: W, eigenvalues: &[f64]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "eigenvalue"])?;
    for (i, l) in eigenvalues.iter().enumerate() {
        out.write_record([(i + 1).to_string(), l.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// CSV `part,m,j,coefficient`.
pub fn write_coefficients<W: Write>(
    w: W,
    dictionary: &Dictionary,
    coefficients: &DVector<f64>,
) -> Result<()> {
    if coefficients.len() != dictionary.len() {
        return Err(Error::DimensionMismatch { expected: dictionary.len(), got: coefficients.len() });
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["part", "m", "j", "coefficient"])?;
    for (label, c) in dictionary.labels().iter().zip(coefficients.iter()) {
        out.write_record([
            label.part.to_string(),
            label.m.to_string(),
            label.j.to_string(),
            c.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// CSV `epsilon_rel,<name>...`; unreached tolerances are left blank.
pub fn write_curve<W: Write>(w: W, curve: &SparsityCurve) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["epsilon_rel".to_string()];
    header.extend(curve.names.iter().cloned());
    out.write_record(&header)?;
    for (eps, row) in curve.epsilons.iter().zip(&curve.counts) {
        let mut record = vec![eps.to_string()];
        record.extend(row.iter().map(|c| c.map_or(String::new(), |c| c.to_string())));
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

/// CSV `representation,L`.
pub fn write_scores<W: Write>(w: W, scores: &[(String, f64)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["representation", "L"])?;
    for (name, l) in scores {
        out.write_record([name.clone(), l.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hodgelets::standard_dictionary;
    use nalgebra::dvector;

    fn filled() -> SimplicialComplex {
        SimplicialComplex::new(3, Vec::<[usize; 2]>::new(), [[0, 1, 2]]).unwrap()
    }

    #[test]
    fn complex_round_trip() {
        let x = filled();
        let mut buf = Vec::new();
        write_complex(&mut buf, &x).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"n_nodes\": 3"));
        let file: ComplexFile = read_json(buf.as_slice()).unwrap();
        assert_eq!(file.edges, vec![[1, 2], [1, 3], [2, 3]]);
        assert_eq!(read_complex(buf.as_slice()).unwrap(), x);

        let bad = r#"{"n_nodes": 2, "edges": [[1, 3]]}"#;
        assert!(read_complex(bad.as_bytes()).is_err());
    }

    #[test]
    fn geometry_round_trip() {
        let g = Geometry::new(vec![[0.0, 0.5], [1.0 / 3.0, -2.0]]);
        let mut buf = Vec::new();
        write_geometry(&mut buf, &g).unwrap();
        assert!(buf.starts_with(b"node,x,y\n1,0,0.5\n"));
        assert_eq!(read_geometry(buf.as_slice()).unwrap(), g);
        assert!(read_geometry("node,x,y\n2,0,0\n".as_bytes()).is_err());
    }

    #[test]
    fn cochain_round_trip_and_orientation() {
        let x = filled();
        let f = Cochain::edge_flow(dvector![1.5, -2.0, 0.1]);
        let mut buf = Vec::new();
        write_cochain(&mut buf, &x, &f).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "edge,value\n1-2,1.5\n1-3,-2\n2-3,0.1\n");
        assert_eq!(read_cochain(buf.as_slice(), &x).unwrap(), f);
        let reversed = read_cochain("edge,value\n3-1,2\n".as_bytes(), &x).unwrap();
        assert_eq!(reversed.values, dvector![0.0, -2.0, 0.0]);
        assert!(read_cochain("edge,value\n1-4,2\n".as_bytes(), &x).is_err());
    }

    #[test]
    fn tables() {
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &[0.0, 3.0]).unwrap();
        assert_eq!(buf, b"index,eigenvalue\n1,0\n2,3\n");

        let d = standard_dictionary(2);
        let mut buf = Vec::new();
        write_coefficients(&mut buf, &d, &dvector![1.0, -0.25]).unwrap();
        assert_eq!(buf, b"part,m,j,coefficient\nbasis,1,1,1\nbasis,1,2,-0.25\n");

        let curve = SparsityCurve {
            names: vec!["fourier".into(), "joint".into()],
            epsilons: vec![0.1, 1.0],
            counts: vec![vec![Some(3), None], vec![Some(0), Some(0)]],
        };
        let mut buf = Vec::new();
        write_curve(&mut buf, &curve).unwrap();
        assert_eq!(buf, b"epsilon_rel,fourier,joint\n0.1,3,\n1,0,0\n");

        let mut buf = Vec::new();
        write_scores(&mut buf, &[("separate".into(), 0.5)]).unwrap();
        assert_eq!(buf, b"representation,L\nseparate,0.5\n");
    }
}
