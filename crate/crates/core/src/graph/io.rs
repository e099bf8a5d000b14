//! Edge-list and positions text formats.
//!
//! Edge list: first data line is the node count `n`, then one `i j` or
//! `i j w` line per undirected edge (0-based). Blank lines and lines whose
//! first non-space character is `#` are ignored. Positions: `n` lines of
//! `x y`.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_field<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{tok}`") })
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = data_lines(text);
    let (first, header) =
        lines.next().ok_or(Error::Parse { line: 0, msg: "missing node count".into() })?;
    let n: usize = parse_field(header, first, "node count")?;

    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (line, content) in lines {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if !(2..=3).contains(&toks.len()) {
            return Err(Error::Parse { line, msg: format!("expected `i j [w]`, got `{content}`") });
        }
        let i: usize = parse_field(toks[0], line, "node index")?;
        let j: usize = parse_field(toks[1], line, "node index")?;
        let w: f64 = match toks.get(2) {
            Some(t) => parse_field(t, line, "weight")?,
            None => 1.0,
        };
        if i >= n || j >= n {
            return Err(Error::Parse {
                line,
                msg: format!("node index {} exceeds declared count {n}", i.max(j)),
            });
        }
        if i == j {
            return Err(Error::Parse { line, msg: format!("self-loop on node {i}") });
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::Parse { line, msg: format!("weight {w} is not positive") });
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::Parse { line, msg: format!("duplicate edge ({i}, {j})") });
        }
        edges.push((i, j, w));
    }
    Graph::new(n, edges, false)
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "{}", g.n())?;
    for e in g.edges() {
        if e.weight == 1.0 {
            writeln!(out, "{} {}", e.source, e.target)?;
        } else {
            writeln!(out, "{} {} {}", e.source, e.target, e.weight)?;
        }
    }
    Ok(())
}

pub fn parse_positions(text: &str, n: usize) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::with_capacity(n);
    for (line, content) in data_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(Error::Parse { line, msg: format!("expected `x y`, got `{content}`") });
        }
        out.push([
            parse_field(toks[0], line, "coordinate")?,
            parse_field(toks[1], line, "coordinate")?,
        ]);
    }
    if out.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: out.len() });
    }
    Ok(out)
}

pub fn load_positions(path: impl AsRef<Path>, n: usize) -> Result<Vec<[f64; 2]>> {
    parse_positions(&std::fs::read_to_string(path)?, n)
}

pub fn write_positions<W: Write>(positions: &[[f64; 2]], mut out: W) -> Result<()> {
    for p in positions {
        writeln!(out, "{} {}", p[0], p[1])?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    #[test]
    fn parses_path_graph() {
        let g = parse_edge_list("3\n0 1\n1 2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(g.weight(0, 2), None);
    }

    #[test]
    fn comments_blank_lines_and_weights() {
        let g = parse_edge_list("# header\n\n4\n0 1 0.5\n  # inline\n2 3\n").unwrap();
        assert_eq!(g.weight(1, 0), Some(0.5));
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn rejects_self_loop_with_line_number() {
        match parse_edge_list("3\n0 1\n2 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates_in_either_orientation() {
        assert!(matches!(parse_edge_list("3\n0 1\n1 0\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn rejects_out_of_range_and_garbage() {
        assert!(matches!(parse_edge_list("2\n0 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("2\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("2\n0 1 2 3\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn weighted_round_trip_is_exact() {
        let g = generate(&GraphSpec::RandomGeometric { n: 60, radius: 0.3, weighted: true }, 2)
            .unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.edges(), g.edges());

        let mut pos = Vec::new();
        write_positions(g.positions().unwrap(), &mut pos).unwrap();
        let parsed = parse_positions(std::str::from_utf8(&pos).unwrap(), 60).unwrap();
        assert_eq!(parsed.as_slice(), g.positions().unwrap());
    }

    #[test]
    fn positions_count_must_match() {
        assert!(parse_positions("0.1 0.2\n", 2).is_err());
    }
}
