//! The edge-list text format.
//!
//! ```text
//! # comment
//! a b 2.5        edge a-b with conductance 2.5
//! b c            unit conductance
//! @coord a 0 1   embedding of vertex a
//! @wired c       c stands for the exterior
//! ```
//!
//! Vertex tokens are arbitrary words, numbered in order of first
//! appearance. Blank lines and anything after `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;
use wsf_core::{Embedding, Network};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Network(#[from] wsf_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A parsed graph file: the network and the token of each vertex.
#[derive(Clone, Debug)]
pub struct GraphFile {
    pub network: Network,
    pub names: Vec<String>,
}

impl GraphFile {
    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Resolves a comma-separated list of vertex tokens.
    pub fn vertices(&self, list: &str) -> Result<Vec<usize>, String> {
        list.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                self.vertex(t)
                    .ok_or_else(|| format!("unknown vertex `{t}`"))
            })
            .collect()
    }
}

pub fn read_graph(path: &Path) -> Result<GraphFile, FormatError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn parse_graph(text: &str) -> Result<GraphFile, FormatError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut intern = |tok: &str, names: &mut Vec<String>| -> usize {
        *index.entry(tok.to_string()).or_insert_with(|| {
            names.push(tok.to_string());
            names.len() - 1
        })
    };
    let mut edges = Vec::new();
    let mut coords: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut wired = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| FormatError::Syntax { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "@coord" => {
                if toks.len() < 3 {
                    return Err(err(
                        "@coord needs a vertex and at least one coordinate".into()
                    ));
                }
                let v = intern(toks[1], &mut names);
                let xs = toks[2..]
                    .iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| err(format!("bad coordinate `{t}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                coords.push((v, xs));
            }
            "@wired" => {
                if toks.len() != 2 {
                    return Err(err("@wired takes exactly one vertex".into()));
                }
                if wired.is_some() {
                    return Err(err("a second @wired line".into()));
                }
                wired = Some(intern(toks[1], &mut names));
            }
            d if d.starts_with('@') => return Err(err(format!("unknown directive `{d}`"))),
            _ => {
                let c = match toks.len() {
                    2 => 1.0,
                    3 => toks[2]
                        .parse::<f64>()
                        .map_err(|_| err(format!("bad conductance `{}`", toks[2])))?,
                    _ => return Err(err("expected `u v [c]`".into())),
                };
                let u = intern(toks[0], &mut names);
                let v = intern(toks[1], &mut names);
                edges.push((u, v, c));
            }
        }
    }
    let mut network = Network::new(names.len(), edges)?;
    if let Some((_, first)) = coords.first() {
        let dim = first.len();
        let mut emb = Embedding::new(dim, names.len());
        for (v, xs) in &coords {
            if xs.len() != dim {
                return Err(FormatError::Syntax {
                    line: 0,
                    message: format!(
                        "vertex `{}` has {} coordinates, expected {dim}",
                        names[*v],
                        xs.len()
                    ),
                });
            }
            emb.set(*v, xs);
        }
        network = network.with_embedding(emb)?;
    }
    if let Some(w) = wired {
        network = network.with_wired(w)?;
    }
    Ok(GraphFile { network, names })
}

/// Writes a network in the edge-list format, naming vertex `v` by `names[v]`
/// or by its index.
pub fn write_graph(net: &Network, names: Option<&[String]>) -> String {
    let name = |v: usize| names.map_or_else(|| v.to_string(), |n| n[v].clone());
    let mut out = String::new();
    for e in net.edges() {
        writeln!(out, "{} {} {}", name(e.tail), name(e.head), e.conductance).unwrap();
    }
    for v in 0..net.vertex_count() {
        if let Some(p) = net.point(v) {
            write!(out, "@coord {}", name(v)).unwrap();
            for x in p {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
    }
    if let Some(w) = net.wired() {
        writeln!(out, "@wired {}", name(w)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_line_kinds() {
        let g = parse_graph(
            "# a triangle\n a b 2\n b c   # unit\n\n c a 0.5\n @coord a 0 0\n @coord b 1 0\n @wired c\n",
        )
        .unwrap();
        assert_eq!(g.names, ["a", "b", "c"]);
        let net = &g.network;
        assert_eq!(net.edge_count(), 3);
        assert_eq!(net.edge(1).conductance, 1.0);
        assert_eq!(net.wired(), Some(2));
        assert_eq!(net.point(1), Some(&[1.0, 0.0][..]));
        assert_eq!(g.vertices("a, c").unwrap(), vec![0, 2]);
        assert!(g.vertices("z").is_err());
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_graph("a b 1\na b x\n").unwrap_err();
        assert!(e.to_string().starts_with("line 2"), "{e}");
        assert!(parse_graph("a a 1\n").is_err());
        assert!(parse_graph("@frob a\n").is_err());
        assert!(parse_graph("a b 1 2\n").is_err());
    }

    #[test]
    fn round_trip() {
        let g =
            parse_graph("x y 2\ny z 3\n@coord x 0\n@coord y 1\n@coord z 2\n@wired z\n").unwrap();
        let text = write_graph(&g.network, Some(&g.names));
        let h = parse_graph(&text).unwrap();
        assert_eq!(h.names, g.names);
        assert_eq!(h.network.edges(), g.network.edges());
        assert_eq!(h.network.wired(), g.network.wired());
        assert_eq!(h.network.point(2), Some(&[2.0][..]));
    }
}
