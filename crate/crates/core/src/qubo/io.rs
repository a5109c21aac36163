//! QUBO text files.
//!
//! ```text
//! qubo v1
//! vars <n_logical> <n_slack>
//! offset <rational>
//! label <idx> logical <arc>
//! label <idx> slack <node> <tag> <k>
//! <i> <j> <rational>
//! ```
//!
//! Coefficient triples satisfy `i <= j`; slack tags carry no whitespace.

use super::{Qubo, VarLabel};
use crate::rat::{format_rat, parse_rat};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

pub fn write_qubo_string(q: &Qubo) -> String {
    let mut out = String::from("qubo v1\n");
    out.push_str(&format!("vars {} {}\n", q.n_logical(), q.n_slack()));
    out.push_str(&format!("offset {}\n", format_rat(&q.offset)));
    for (idx, l) in q.labels().iter().enumerate() {
        match l {
            VarLabel::Logical(arc) => out.push_str(&format!("label {idx} logical {arc}\n")),
            VarLabel::Slack { node, tag, index } => {
                out.push_str(&format!("label {idx} slack {node} {tag} {index}\n"))
            }
        }
    }
    for (i, j, c) in q.terms() {
        out.push_str(&format!("{i} {j} {}\n", format_rat(c)));
    }
    out
}

pub fn write_qubo(q: &Qubo, path: &Path) -> Result<()> {
    std::fs::write(path, write_qubo_string(q))?;
    Ok(())
}

pub fn read_qubo_str(text: &str, path: &str) -> Result<Qubo> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_string(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "qubo v1")) => {}
        Some((i, other)) => {
            return Err(err(i + 1, format!("expected header 'qubo v1', got '{other}'")))
        }
        None => return Err(err(1, "empty file".into())),
    }

    let mut declared: Option<(usize, usize)> = None;
    let mut offset = None;
    let mut labels: Vec<Option<VarLabel>> = Vec::new();
    let mut coeffs = BTreeMap::new();
    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match f[0] {
            "vars" => {
                if f.len() != 3 {
                    return Err(err(lineno, "expected: vars <n_logical> <n_slack>".into()));
                }
                let nl = f[1].parse().map_err(|_| err(lineno, "bad count".into()))?;
                let ns = f[2].parse().map_err(|_| err(lineno, "bad count".into()))?;
                declared = Some((nl, ns));
                labels = vec![None; nl + ns];
            }
            "offset" => {
                if f.len() != 2 {
                    return Err(err(lineno, "expected: offset <rational>".into()));
                }
                offset =
                    Some(parse_rat(f[1]).ok_or_else(|| {
                        err(lineno, format!("bad rational '{}'", f[1]))
                    })?);
            }
            "label" => {
                let idx: usize = f
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(lineno, "bad label index".into()))?;
                if idx >= labels.len() {
                    return Err(err(lineno, format!("label index {idx} out of range")));
                }
                let label = match f.get(2) {
                    Some(&"logical") if f.len() == 4 => {
                        let arc = f[3]
                            .parse()
                            .map_err(|_| err(lineno, "bad arc id".into()))?;
                        VarLabel::Logical(arc)
                    }
                    Some(&"slack") if f.len() == 6 => VarLabel::Slack {
                        node: f[3]
                            .parse()
                            .map_err(|_| err(lineno, "bad node id".into()))?,
                        tag: f[4].to_string(),
                        index: f[5]
                            .parse()
                            .map_err(|_| err(lineno, "bad slack index".into()))?,
                    },
                    _ => {
                        return Err(err(
                            lineno,
                            "expected: label <idx> logical <arc> | label <idx> slack <node> <tag> <k>"
                                .into(),
                        ))
                    }
                };
                if labels[idx].is_some() {
                    return Err(err(lineno, format!("label {idx} declared twice")));
                }
                labels[idx] = Some(label);
            }
            _ => {
                if f.len() != 3 {
                    return Err(err(lineno, "expected: <i> <j> <rational>".into()));
                }
                let a: usize = f[0]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad index '{}'", f[0])))?;
                let b: usize = f[1]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad index '{}'", f[1])))?;
                if a > b || b >= labels.len() {
                    return Err(err(lineno, format!("bad coefficient key ({a}, {b})")));
                }
                let c = parse_rat(f[2])
                    .ok_or_else(|| err(lineno, format!("bad rational '{}'", f[2])))?;
                if coeffs.insert((a, b), c).is_some() {
                    return Err(err(lineno, format!("duplicate coefficient ({a}, {b})")));
                }
            }
        }
    }

    let (nl, ns) = declared.ok_or_else(|| err(0, "missing vars line".into()))?;
    let labels: Vec<VarLabel> = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| err(0, format!("label {i} never declared"))))
        .collect::<Result<_>>()?;
    let q = Qubo::from_parts(labels, coeffs, offset.unwrap_or_default())?;
    if q.n_logical() != nl || q.n_slack() != ns {
        return Err(err(
            0,
            format!(
                "vars line says {nl}+{ns} but labels give {}+{}",
                q.n_logical(),
                q.n_slack()
            ),
        ));
    }
    Ok(q)
}

pub fn read_qubo(path: &Path) -> Result<Qubo> {
    let text = std::fs::read_to_string(path)?;
    read_qubo_str(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{embed_penalty, BlockIndex, QuadraticPenalty};
    use crate::rat::{rat, ratio};

    #[test]
    fn round_trip_exact() {
        let mut q = Qubo::new_logical(3);
        let mut bi = BlockIndex::default();
        q.add_term(0, 0, ratio(3, 2));
        q.add_term(1, 2, rat(-7));
        q.offset = ratio(-1, 3);
        let mut p = QuadraticPenalty::new(1, 2);
        p.add_term(0, p.s(0), rat(2));
        p.add_term(p.s(1), p.s(1), rat(-1));
        embed_penalty(&mut q, &mut bi, &p, &[2], 5, "cf", &rat(1)).unwrap();

        let text = write_qubo_string(&q);
        let back = read_qubo_str(&text, "mem").unwrap();
        assert_eq!(q, back);
        assert_eq!(back.coeff(0, 0), ratio(3, 2));
        let bi2 = BlockIndex::from_qubo(&back);
        assert_eq!(bi2.blocks.len(), 1);
        assert_eq!(bi2.blocks[&(5, "cf".to_string())].slack_vars, vec![3, 4]);
    }

    #[test]
    fn missing_header_is_an_error() {
        assert!(read_qubo_str("vars 1 0\n", "mem").is_err());
    }

    #[test]
    fn bad_triple_reports_line() {
        let text = "qubo v1\nvars 1 0\noffset 0\nlabel 0 logical 0\n0 0 oops\n";
        let e = read_qubo_str(text, "mem").unwrap_err();
        assert!(e.to_string().contains("mem:5"), "{e}");
    }
}
