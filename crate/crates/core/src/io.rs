//! Edge-list text format for multiplex networks.
//!
//! One network per file: a header `# nodes=<N> layers=<L>` followed by lines
//! `<layer_id> <src> <dst> [weight]` with 0-based ids. Undirected edges are
//! listed once; the default weight is 1.0. Duplicate `(layer, src, dst)`
//! entries are rejected, counting `(src, dst)` and `(dst, src)` as the same
//! edge.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{MxError, Result};
use crate::multiplex::{AdjacencyMatrix, MultiplexNetwork};

/// Parses the edge-list format from a string.
pub fn parse_multiplex(text: &str) -> Result<MultiplexNetwork> {
    let mut lines = text.lines().enumerate();

    let (n, num_layers) = loop {
        match lines.next() {
            Some((idx, line)) => {
                let trimmed = line.trim();
                if trimmed.is_empty() {
                    continue;
                }
                break parse_header(idx + 1, trimmed)?;
            }
            None => {
                return Err(MxError::Parse {
                    line: 0,
                    message: "missing header line".into(),
                })
            }
        }
    };

    let mut weights = vec![Array2::<f64>::zeros((n, n)); num_layers];
    let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();

    for (idx, line) in lines {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(MxError::Parse {
                line: line_no,
                message: format!("expected `<layer> <src> <dst> [weight]`, got {} fields", fields.len()),
            });
        }
        let layer = parse_field::<usize>(line_no, fields[0], "layer id")?;
        let src = parse_field::<usize>(line_no, fields[1], "source node")?;
        let dst = parse_field::<usize>(line_no, fields[2], "target node")?;
        let weight = if fields.len() == 4 {
            parse_field::<f64>(line_no, fields[3], "weight")?
        } else {
            1.0
        };

        if layer >= num_layers {
            return Err(MxError::Parse {
                line: line_no,
                message: format!("layer {layer} out of range (header declared {num_layers})"),
            });
        }
        if src >= n || dst >= n {
            return Err(MxError::Parse {
                line: line_no,
                message: format!("node out of range (header declared {n} nodes)"),
            });
        }
        if src == dst {
            return Err(MxError::Parse {
                line: line_no,
                message: format!("self-loop at node {src}"),
            });
        }
        let key = (layer, src.min(dst), src.max(dst));
        if !seen.insert(key) {
            return Err(MxError::Parse {
                line: line_no,
                message: format!("duplicate edge ({layer}, {src}, {dst})"),
            });
        }
        weights[layer][[src, dst]] = weight;
        weights[layer][[dst, src]] = weight;
    }

    let layers = weights
        .into_iter()
        .map(AdjacencyMatrix::new)
        .collect::<Result<Vec<_>>>()?;
    MultiplexNetwork::new(layers)
}

/// Serializes a network in the edge-list format.
pub fn write_multiplex(net: &MultiplexNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nodes={} layers={}", net.n(), net.num_layers());
    for (layer_id, layer) in net.layers().iter().enumerate() {
        for (src, dst, w) in layer.edges() {
            if w == 1.0 {
                let _ = writeln!(out, "{layer_id} {src} {dst}");
            } else {
                let _ = writeln!(out, "{layer_id} {src} {dst} {w}");
            }
        }
    }
    out
}

/// Reads and parses a multiplex edge-list file.
pub fn read_multiplex_file(path: &Path) -> Result<MultiplexNetwork> {
    let text = std::fs::read_to_string(path)?;
    parse_multiplex(&text)
}

/// Writes a multiplex network to an edge-list file.
pub fn write_multiplex_file(path: &Path, net: &MultiplexNetwork) -> Result<()> {
    std::fs::write(path, write_multiplex(net))?;
    Ok(())
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let body = line.strip_prefix('#').ok_or_else(|| MxError::Parse {
        line: line_no,
        message: "header must start with `# nodes=<N> layers=<L>`".into(),
    })?;
    let mut nodes = None;
    let mut layers = None;
    for token in body.split_whitespace() {
        if let Some(v) = token.strip_prefix("nodes=") {
            nodes = Some(parse_field::<usize>(line_no, v, "nodes")?);
        } else if let Some(v) = token.strip_prefix("layers=") {
            layers = Some(parse_field::<usize>(line_no, v, "layers")?);
        }
    }
    match (nodes, layers) {
        (Some(n), Some(l)) if n > 0 && l > 0 => Ok((n, l)),
        _ => Err(MxError::Parse {
            line: line_no,
            message: "header must declare positive nodes= and layers=".into(),
        }),
    }
}

fn parse_field<T: std::str::FromStr>(line_no: usize, text: &str, what: &str) -> Result<T> {
    text.parse().map_err(|_| MxError::Parse {
        line: line_no,
        message: format!("invalid {what}: `{text}`"),
    })
}
