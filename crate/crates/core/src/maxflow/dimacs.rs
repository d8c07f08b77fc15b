//! DIMACS max-flow text format (1-based node ids).
//!
//! ```text
//! p max <nodes> <arcs>
//! n <id> s
//! n <id> t
//! a <from> <to> <capacity>
//! ```

use std::fmt::Write as _;

use super::{Arc, FlowNetwork};
use crate::error::{Error, Result};

pub fn write_dimacs(net: &FlowNetwork) -> String {
    let mut out = String::with_capacity(16 * net.arcs.len() + 64);
    let _ = writeln!(out, "p max {} {}", net.node_count, net.arcs.len());
    let _ = writeln!(out, "n {} s", net.source + 1);
    let _ = writeln!(out, "n {} t", net.sink + 1);
    for a in &net.arcs {
        let _ = writeln!(out, "a {} {} {}", a.from + 1, a.to + 1, a.capacity);
    }
    out
}

pub fn parse_dimacs(text: &str) -> Result<FlowNetwork> {
    let mut problem: Option<(usize, usize)> = None;
    let mut source = None;
    let mut sink = None;
    let mut arcs = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let err = |message: String| Error::Dimacs { line: line_no, message };
        let mut tok = line.split_whitespace();
        let Some(kind) = tok.next() else { continue };
        let fields: Vec<&str> = tok.collect();
        let node = |s: &str, n: usize| -> Result<usize> {
            let id: usize = s.parse().map_err(|_| err(format!("bad node id `{s}`")))?;
            if id == 0 || id > n {
                return Err(err(format!("node id {id} out of range 1..={n}")));
            }
            Ok(id - 1)
        };
        match kind {
            "c" => {}
            "p" => {
                if problem.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                if fields.len() != 3 || fields[0] != "max" {
                    return Err(err("expected `p max <nodes> <arcs>`".into()));
                }
                let n = fields[1].parse().map_err(|_| err("bad node count".into()))?;
                let m = fields[2].parse().map_err(|_| err("bad arc count".into()))?;
                problem = Some((n, m));
            }
            "n" => {
                let (n, _) = problem.ok_or_else(|| err("node line before problem line".into()))?;
                if fields.len() != 2 {
                    return Err(err("expected `n <id> s|t`".into()));
                }
                let id = node(fields[0], n)?;
                match fields[1] {
                    "s" => source = Some(id),
                    "t" => sink = Some(id),
                    other => return Err(err(format!("unknown terminal `{other}`"))),
                }
            }
            "a" => {
                let (n, _) = problem.ok_or_else(|| err("arc line before problem line".into()))?;
                if fields.len() != 3 {
                    return Err(err("expected `a <from> <to> <cap>`".into()));
                }
                let from = node(fields[0], n)?;
                let to = node(fields[1], n)?;
                let capacity: i64 = fields[2]
                    .parse()
                    .map_err(|_| err(format!("bad capacity `{}`", fields[2])))?;
                if capacity < 0 {
                    return Err(err("negative capacity".into()));
                }
                arcs.push(Arc { from, to, capacity });
            }
            other => return Err(err(format!("unknown line type `{other}`"))),
        }
    }

    let last = text.lines().count();
    let (n, m) = problem.ok_or(Error::Dimacs { line: last, message: "missing problem line".into() })?;
    let (source, sink) = match (source, sink) {
        (Some(s), Some(t)) if s != t => (s, t),
        _ => {
            return Err(Error::Dimacs {
                line: last,
                message: "need distinct source and sink".into(),
            })
        }
    };
    if arcs.len() != m {
        return Err(Error::Dimacs {
            line: last,
            message: format!("problem line declares {m} arcs, found {}", arcs.len()),
        });
    }
    Ok(FlowNetwork { node_count: n, source, sink, arcs })
}
