//! Line-oriented instance files.
//!
//! ```text
//! mpbs v1
//! node <id> <FL> <CAP>
//! arc <id> <origin> <target> <weight>
//! ```
//!
//! Rationals are written `p/q` or as plain integers; UTF-8 with LF endings.
//! All node lines precede all arc lines.

use super::{Arc, MpbsInstance};
use crate::rat::{format_rat, parse_rat};
use crate::{Error, Result};
use std::path::Path;

pub fn write_instance_string(inst: &MpbsInstance) -> String {
    let mut out = String::from("mpbs v1\n");
    for &u in &inst.graph.nodes {
        out.push_str(&format!(
            "node {} {} {}\n",
            u,
            format_rat(inst.fl(u)),
            format_rat(inst.cap(u))
        ));
    }
    for a in &inst.graph.arcs {
        out.push_str(&format!(
            "arc {} {} {} {}\n",
            a.id,
            a.origin,
            a.target,
            format_rat(&a.weight)
        ));
    }
    out
}

pub fn write_instance(inst: &MpbsInstance, path: &Path) -> Result<()> {
    std::fs::write(path, write_instance_string(inst))?;
    Ok(())
}

pub fn read_instance_str(text: &str, path: &str) -> Result<MpbsInstance> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "mpbs v1")) => {}
        Some((i, other)) => {
            return Err(err(i + 1, format!("expected header 'mpbs v1', got '{other}'")))
        }
        None => return Err(err(1, "empty file".into())),
    }

    let mut nodes = Vec::new();
    let mut windows = Vec::new();
    let mut arcs: Vec<Arc> = Vec::new();
    let mut seen_arc = false;
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "node" => {
                if seen_arc {
                    return Err(err(lineno, "node line after arc lines".into()));
                }
                if fields.len() != 4 {
                    return Err(err(lineno, "expected: node <id> <FL> <CAP>".into()));
                }
                let id: u32 = fields[1]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad node id '{}'", fields[1])))?;
                let fl = parse_rat(fields[2])
                    .ok_or_else(|| err(lineno, format!("bad rational '{}'", fields[2])))?;
                let cap = parse_rat(fields[3])
                    .ok_or_else(|| err(lineno, format!("bad rational '{}'", fields[3])))?;
                nodes.push(id);
                windows.push((id, fl, cap));
            }
            "arc" => {
                seen_arc = true;
                if fields.len() != 5 {
                    return Err(err(
                        lineno,
                        "expected: arc <id> <origin> <target> <weight>".into(),
                    ));
                }
                let id: u32 = fields[1]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad arc id '{}'", fields[1])))?;
                if id as usize != arcs.len() {
                    return Err(err(
                        lineno,
                        format!("arc ids must be contiguous: expected {}, got {}", arcs.len(), id),
                    ));
                }
                let origin: u32 = fields[2]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad node id '{}'", fields[2])))?;
                let target: u32 = fields[3]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad node id '{}'", fields[3])))?;
                let weight = parse_rat(fields[4])
                    .ok_or_else(|| err(lineno, format!("bad rational '{}'", fields[4])))?;
                arcs.push(Arc {
                    id,
                    origin,
                    target,
                    weight,
                });
            }
            other => return Err(err(lineno, format!("unknown directive '{other}'"))),
        }
    }

    let attrs = windows
        .into_iter()
        .map(|(u, fl, cap)| (u, super::NodeAttrs::window(fl, cap)))
        .collect();
    Ok(MpbsInstance::new(super::RMultigraph { nodes, arcs, attrs }))
}

pub fn read_instance(path: &Path) -> Result<MpbsInstance> {
    let text = std::fs::read_to_string(path)?;
    read_instance_str(&text, &path.display().to_string())
}
