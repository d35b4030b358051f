//! The 21-feature structural signature and its CSV form.
//!
//! | features | meaning |
//! |----------|---------|
//! | f1, f2   | node and arc counts |
//! | f3..f8   | nodes with 1, 2, 3, 4, 5 and 6+ neighbours |
//! | f9..f13  | arcs labelled L, P, T, X, S |
//! | f14..f18 | nodes per relative-length interval |
//! | f19..f21 | arcs per relative-angle interval |
//!
//! A CSV row is the 21 integers followed by the class label, comma separated,
//! no spaces, no header: `8,11,0,5,1,1,1,0,6,0,3,0,2,1,0,3,2,2,2,1,8,002`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::arg::AttributedRelationalGraph;
use crate::error::{Error, Result};

pub const N_FEATURES: usize = 21;

/// Upper bounds of the relative-length intervals; the last interval is closed.
pub const LENGTH_EDGES: [f64; 4] = [0.2, 0.4, 0.6, 0.8];
/// Upper bounds (degrees) of the relative-angle intervals; the last interval is closed.
pub const ANGLE_EDGES: [f64; 2] = [30.0, 60.0];

/// Index of the half-open interval `[edges[i-1], edges[i])` containing `x`.
fn interval_index(x: f64, edges: &[f64]) -> usize {
    edges.iter().take_while(|&&e| x >= e).count()
}

pub fn length_interval(relative_length: f64) -> usize {
    interval_index(relative_length, &LENGTH_EDGES)
}

pub fn angle_interval(relative_angle: f64) -> usize {
    interval_index(relative_angle, &ANGLE_EDGES)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub features: [u32; N_FEATURES],
    pub label: Option<String>,
}

impl Signature {
    pub fn new(features: [u32; N_FEATURES], label: Option<String>) -> Self {
        Signature { features, label }
    }

    /// Feature by its 1-based name, `f(1)` being the node count.
    pub fn f(&self, k: usize) -> u32 {
        self.features[k - 1]
    }

    fn sum(&self, range: std::ops::RangeInclusive<usize>) -> u32 {
        range.map(|k| self.f(k)).sum()
    }

    /// Checks the four bookkeeping identities every computed signature satisfies.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Invariant(format!("signature identity {what} does not hold")));
        if self.f(1) != self.sum(14..=18) {
            return fail("f1 = f14+..+f18");
        }
        if self.f(2) != self.sum(9..=13) {
            return fail("f2 = f9+..+f13");
        }
        if self.f(2) != self.sum(19..=21) {
            return fail("f2 = f19+f20+f21");
        }
        if self.sum(3..=8) > self.f(1) {
            return fail("f3+..+f8 <= f1");
        }
        Ok(())
    }

    /// Squared Euclidean distance between raw feature vectors.
    pub fn distance_sq(&self, other: &Signature) -> f64 {
        self.features
            .iter()
            .zip(&other.features)
            .map(|(&a, &b)| {
                let d = a as f64 - b as f64;
                d * d
            })
            .sum()
    }

    /// CSV row without the trailing newline. Fails when the label is unset.
    pub fn to_csv_row(&self) -> Result<String> {
        let label = self
            .label
            .as_deref()
            .ok_or_else(|| Error::invalid("cannot write a signature without a label"))?;
        check_label(label)?;
        let mut row = String::new();
        for v in &self.features {
            let _ = write!(row, "{v},");
        }
        row.push_str(label);
        Ok(row)
    }

    /// Parses one CSV row; `line` is only used in error messages.
    pub fn from_csv_row(row: &str, line: usize) -> Result<Self> {
        let fields: Vec<&str> = row.trim_end_matches(['\r', '\n']).split(',').collect();
        if fields.len() != N_FEATURES + 1 {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", N_FEATURES + 1, fields.len()),
            ));
        }
        let mut features = [0u32; N_FEATURES];
        for (slot, tok) in features.iter_mut().zip(&fields) {
            *slot = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("feature {tok:?} is not a non-negative integer")))?;
        }
        let label = fields[N_FEATURES];
        if label.is_empty() {
            return Err(Error::parse(line, "empty class label"));
        }
        Ok(Signature::new(features, Some(label.to_string())))
    }
}

/// Labels are opaque tokens; they only need to survive the CSV and model formats.
pub fn check_label(label: &str) -> Result<()> {
    if label.is_empty() || label.contains([',', '\n', '\r']) || label.contains(char::is_whitespace) {
        return Err(Error::invalid(format!("class label {label:?} must be a non-empty token without commas or whitespace")));
    }
    Ok(())
}

/// Computes the signature of an ARG; the label is left unset.
pub fn compute_signature(arg: &AttributedRelationalGraph) -> Signature {
    let mut f = [0u32; N_FEATURES];
    f[0] = arg.nodes.len() as u32;
    f[1] = arg.arcs.len() as u32;
    for d in arg.degrees() {
        if d >= 1 {
            f[2 + d.min(6) - 1] += 1;
        }
    }
    for arc in &arg.arcs {
        f[8 + arc.label.index()] += 1;
        f[18 + angle_interval(arc.relative_angle)] += 1;
    }
    for node in &arg.nodes {
        f[13 + length_interval(node.relative_length)] += 1;
    }
    Signature::new(f, None)
}

pub fn write_csv<W: Write>(rows: &[Signature], mut sink: W) -> Result<()> {
    for s in rows {
        writeln!(sink, "{}", s.to_csv_row()?)?;
    }
    Ok(())
}

/// Reads signature rows. Blank lines are skipped; row numbers in errors are 1-based.
pub fn read_csv<R: BufRead>(source: R) -> Result<Vec<Signature>> {
    let mut out = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(Signature::from_csv_row(&line, i + 1)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arg::{build_arg, ArgArc, ArgConfig, ArgNode, Junction};
    use crate::geometry::VectorSymbol;

    const ROW_A: &str = "8,11,0,5,1,1,1,0,6,0,3,0,2,1,0,3,2,2,2,1,8,002";
    /// `ROW_B` with one range feature dropped.
    const ROW_B_SHORT: &str = "4,5,0,2,2,0,0,0,2,0,3,0,0,0,0,0,4,0,1,4,016";
    const ROW_B: &str = "4,5,0,2,2,0,0,0,2,0,3,0,0,0,0,0,0,4,0,1,4,016";

    #[test]
    fn interval_conventions() {
        assert_eq!(length_interval(0.0), 0);
        assert_eq!(length_interval(0.19999), 0);
        assert_eq!(length_interval(0.2), 1);
        assert_eq!(length_interval(0.8), 4);
        assert_eq!(length_interval(1.0), 4);
        assert_eq!(angle_interval(0.0), 0);
        assert_eq!(angle_interval(29.9), 0);
        assert_eq!(angle_interval(30.0), 1);
        assert_eq!(angle_interval(60.0), 2);
        assert_eq!(angle_interval(90.0), 2);
    }

    /// Hand-built graph: degrees {5,4,3,2,2,2,2,2}, labels L x6 T x3 S x2.
    #[test]
    fn hand_built_graph_matches_reference_row() {
        let lengths = [0.1, 0.45, 0.5, 0.55, 0.65, 0.7, 0.9, 1.0];
        let nodes = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| ArgNode { primitive_id: i as u32, relative_length: l })
            .collect();
        // A=0 .. H=7
        let edges = [
            (0, 1, Junction::L, 10.0),
            (0, 2, Junction::L, 20.0),
            (0, 3, Junction::L, 45.0),
            (0, 4, Junction::L, 70.0),
            (0, 5, Junction::L, 80.0),
            (1, 2, Junction::L, 90.0),
            (1, 6, Junction::T, 90.0),
            (1, 7, Junction::T, 65.0),
            (2, 3, Junction::T, 75.0),
            (4, 5, Junction::S, 62.0),
            (6, 7, Junction::S, 88.0),
        ];
        let arcs = edges
            .iter()
            .map(|&(a, b, label, angle)| ArgArc { node_a: a, node_b: b, relative_angle: angle, label })
            .collect();
        let g = AttributedRelationalGraph { nodes, arcs };
        let mut expected = Signature::from_csv_row(ROW_A, 1).unwrap();
        expected.label = None;
        assert_eq!(compute_signature(&g), expected);
    }

    #[test]
    fn single_segment_signature() {
        let s = VectorSymbol::from_segments(&[((0.0, 0.0), (3.0, 4.0))]).unwrap();
        let sig = compute_signature(&build_arg(&s, &ArgConfig::default()));
        let mut want = [0u32; N_FEATURES];
        want[0] = 1;
        want[17] = 1;
        assert_eq!(sig.features, want);
    }

    #[test]
    fn plus_sign_signature() {
        let s = VectorSymbol::from_segments(&[((0.0, 1.0), (2.0, 1.0)), ((1.0, 0.0), (1.0, 2.0))]).unwrap();
        let sig = compute_signature(&build_arg(&s, &ArgConfig::default()));
        assert_eq!(sig.features, [2, 1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 2, 0, 0, 1]);
        sig.validate().unwrap();
    }

    #[test]
    fn reference_rows_satisfy_identities_and_round_trip() {
        for row in [ROW_A, ROW_B] {
            let sig = Signature::from_csv_row(row, 1).unwrap();
            sig.validate().unwrap();
            assert_eq!(sig.to_csv_row().unwrap(), row);
        }
    }

    #[test]
    fn short_row_is_rejected() {
        assert!(matches!(Signature::from_csv_row(ROW_B_SHORT, 3), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn csv_errors_name_the_row() {
        assert!(read_csv("".as_bytes()).unwrap().is_empty());
        let text = format!("{ROW_B}\n1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,x\n");
        match read_csv(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let short = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20,016";
        match read_csv(short.as_bytes()) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 1);
                assert!(msg.contains("22"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(Signature::from_csv_row("-1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,a", 1).is_err());
    }

    #[test]
    fn write_requires_label() {
        let sig = Signature::new([0; N_FEATURES], None);
        let mut buf = Vec::new();
        assert!(write_csv(&[sig], &mut buf).is_err());
    }

    #[test]
    fn validator_catches_each_identity() {
        let good = Signature::from_csv_row(ROW_B, 1).unwrap();
        for (k, delta) in [(1usize, 1i64), (2, 1), (19, 1), (3, 5)] {
            let mut bad = good.clone();
            bad.features[k - 1] = (bad.features[k - 1] as i64 + delta) as u32;
            assert!(bad.validate().is_err(), "feature f{k}");
        }
    }
}
