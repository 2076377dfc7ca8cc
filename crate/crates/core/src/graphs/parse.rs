use std::path::Path;

use super::{build_complete, build_path, cartesian_product_within, check_budget, Family, Graph};
use crate::error::{Error, Result};

/// Parses the edge-list format: a header `n m`, then `m` lines `u v`.
/// Blank lines and anything after `#` are ignored.
pub fn parse_edge_list(text: &str, source: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, header) = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let [n, m] = parse_pair(header, line_no)?;
    if n == 0 {
        return Err(Error::Parse("edge list declares zero vertices".into()));
    }

    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        let [u, v] = parse_pair(line, line_no)?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::from_edges(n, &edges, Family::File(source.to_string()))
}

fn parse_pair(line: &str, line_no: usize) -> Result<[usize; 2]> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse(format!("line {line_no}: expected two integers, got `{line}`")));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("line {line_no}: `{s}` is not a nonnegative integer")))
    };
    Ok([parse(fields[0])?, parse(fields[1])?])
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_edge_list(&text, &path.display().to_string())
}

/// Parses `path:N`, `complete:N`, `cube:D`, `product:<spec>,<spec>` (right
/// associative) and `file:<path>`.
pub fn parse_graph_spec(spec: &str, max_vertices: usize) -> Result<Graph> {
    let spec = spec.trim();
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("graph spec `{spec}` has no `kind:` prefix")))?;
    let number = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("`{s}` is not a nonnegative integer in `{spec}`")))
    };
    match kind {
        "path" => {
            let n = number(rest)?;
            check_budget(n, max_vertices)?;
            build_path(n)
        }
        "complete" => {
            let n = number(rest)?;
            check_budget(n, max_vertices)?;
            build_complete(n)
        }
        "cube" => {
            let d = u32::try_from(number(rest)?).map_err(|_| Error::Parse("dimension too large".into()))?;
            super::build_hypercube_within(d, max_vertices)
        }
        "product" => {
            let (left, right) = split_product(rest)?;
            let g = parse_graph_spec(left, max_vertices)?;
            let h = if right.contains(',') && !right.starts_with("product:") {
                parse_graph_spec(&format!("product:{right}"), max_vertices)?
            } else {
                parse_graph_spec(right, max_vertices)?
            };
            cartesian_product_within(&g, &h, max_vertices)
        }
        "file" => {
            let g = read_edge_list(Path::new(rest))?;
            check_budget(g.vertex_count(), max_vertices)?;
            Ok(g)
        }
        other => Err(Error::Parse(format!("unknown graph kind `{other}`"))),
    }
}

fn split_product(rest: &str) -> Result<(&str, &str)> {
    let (left, right) = rest
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("product needs two factors, got `{rest}`")))?;
    if left.trim().is_empty() || right.trim().is_empty() {
        return Err(Error::Parse(format!("empty product factor in `{rest}`")));
    }
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::DEFAULT_VERTEX_BUDGET;
    use std::io::Write;

    #[test]
    fn edge_list_with_comments() {
        let text = "# triangle plus tail\n4 4\n0 1\n1 2\n\n2 0 # closing edge\n2 3\n";
        let g = parse_edge_list(text, "mem").unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.distance(0, 3), 2);
        assert_eq!(g.label(), "file:mem");
    }

    #[test]
    fn edge_list_errors() {
        assert!(matches!(parse_edge_list("", "x"), Err(Error::Parse(_))));
        assert!(matches!(parse_edge_list("3 1\n0 1\n", "x"), Err(Error::Disconnected)));
        assert!(matches!(parse_edge_list("2 2\n0 1\n", "x"), Err(Error::Parse(_))));
        assert!(matches!(parse_edge_list("2 1\n0 x\n", "x"), Err(Error::Parse(_))));
        assert!(matches!(parse_edge_list("2 1\n0 1 2\n", "x"), Err(Error::Parse(_))));
    }

    #[test]
    fn specs() {
        let b = DEFAULT_VERTEX_BUDGET;
        assert_eq!(parse_graph_spec("path:4", b).unwrap().vertex_count(), 4);
        assert_eq!(parse_graph_spec("complete:5", b).unwrap().edge_count(), 10);
        assert_eq!(parse_graph_spec("cube:3", b).unwrap().edge_count(), 12);
        let g = parse_graph_spec("product:cube:1,cube:2", b).unwrap();
        assert_eq!(g.cube_dimension(), Some(3));
        assert_eq!(g.adjacency(), crate::graphs::build_hypercube(3).unwrap().adjacency());

        let g = parse_graph_spec("product:path:2,path:2,path:2", b).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.label(), "product:path:2,product:path:2,path:2");
        assert_eq!(g.cube_dimension(), Some(3));

        assert!(matches!(parse_graph_spec("cube:13", b), Err(Error::ResourceLimit(_))));
        assert!(matches!(parse_graph_spec("cube:x", b), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_spec("wheel:5", b), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_spec("product:path:2", b), Err(Error::Parse(_))));
        assert!(matches!(parse_graph_spec("path:0", b), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn file_spec() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "3 2\n0 1\n1 2").unwrap();
        let spec = format!("file:{}", f.path().display());
        let g = parse_graph_spec(&spec, DEFAULT_VERTEX_BUDGET).unwrap();
        assert_eq!(g.distance(0, 2), 2);
        assert!(parse_graph_spec("file:/nonexistent/graph.txt", DEFAULT_VERTEX_BUDGET).is_err());
    }
}
