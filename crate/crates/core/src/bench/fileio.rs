//! Instance file format and deterministic number formatting.
//!
//! The text format is line-oriented: a `nodes N` header, then `edge u v mu`,
//! `cap v c`, `server i v`, and `request i rate v1 v2 ... vk` records, with
//! `#` comments. Node tokens are names; indices are assigned in order of
//! first appearance. The catalog size is one past the largest object index
//! in the server records.

use super::BenchError;
use crate::model::{CacheNetwork, RequestClass};
use std::collections::HashMap;

/// Format a float with 9 significant digits, locale-independent, trimming
/// trailing zeros; large and small magnitudes fall back to scientific
/// notation.
pub fn fmt_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent parses");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if (-4..9).contains(&exp) {
        let mut out = String::new();
        if exp >= 0 {
            let point = exp as usize + 1;
            if point >= digits.len() {
                out.push_str(&digits);
                out.push_str(&"0".repeat(point - digits.len()));
            } else {
                out.push_str(&digits[..point]);
                out.push('.');
                out.push_str(&digits[point..]);
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp - 1) as usize));
            out.push_str(&digits);
        }
        trim_fraction(out)
    } else {
        let trimmed = trim_fraction(format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{trimmed}e{exp}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Serialize a network in the instance format. Edges print in index order,
/// so re-reading assigns the same structure (up to node renumbering by
/// first appearance).
pub fn write_instance(net: &CacheNetwork, header_comment: &str) -> String {
    let mut out = String::new();
    if !header_comment.is_empty() {
        for line in header_comment.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str(&format!("nodes {}\n", net.num_nodes()));
    for e in 0..net.num_edges() {
        let (u, v) = net.edge(e);
        out.push_str(&format!(
            "edge {} {} {}\n",
            net.node_name(u),
            net.node_name(v),
            fmt_g9(net.service_rate(e))
        ));
    }
    for v in 0..net.num_nodes() {
        if net.capacity(v) > 0 {
            out.push_str(&format!("cap {} {}\n", net.node_name(v), net.capacity(v)));
        }
    }
    for i in 0..net.catalog_size() {
        for &s in net.servers(i) {
            out.push_str(&format!("server {} {}\n", i, net.node_name(s)));
        }
    }
    for req in net.requests() {
        out.push_str(&format!("request {} {}", req.object, fmt_g9(req.rate)));
        for &v in &req.path {
            out.push(' ');
            out.push_str(net.node_name(v));
        }
        out.push('\n');
    }
    out
}

/// Parse the instance format.
pub fn parse_instance(text: &str) -> Result<CacheNetwork, BenchError> {
    let mut num_nodes: Option<usize> = None;
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut caps: HashMap<usize, usize> = HashMap::new();
    let mut servers: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut requests: Vec<(usize, f64, Vec<usize>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let mut content = raw;
        if let Some(pos) = content.find('#') {
            content = &content[..pos];
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let err = |msg: String| BenchError::Parse { line, msg };
        match tokens[0] {
            "nodes" => {
                if tokens.len() != 2 {
                    return Err(err("expected: nodes N".into()));
                }
                num_nodes = Some(
                    tokens[1]
                        .parse()
                        .map_err(|_| err(format!("bad node count '{}'", tokens[1])))?,
                );
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(err("expected: edge u v mu".into()));
                }
                let total = num_nodes
                    .ok_or_else(|| err("edge before nodes header".into()))?;
                let u = intern(&mut names, &mut index, tokens[1], total)
                    .map_err(&err)?;
                let v = intern(&mut names, &mut index, tokens[2], total)
                    .map_err(&err)?;
                let mu: f64 = tokens[3]
                    .parse()
                    .map_err(|_| err(format!("bad service rate '{}'", tokens[3])))?;
                edges.push((u, v, mu));
            }
            "cap" => {
                if tokens.len() != 3 {
                    return Err(err("expected: cap v c".into()));
                }
                let total = num_nodes.ok_or_else(|| err("cap before nodes header".into()))?;
                let v = intern(&mut names, &mut index, tokens[1], total)
                    .map_err(&err)?;
                let c: usize = tokens[2]
                    .parse()
                    .map_err(|_| err(format!("bad capacity '{}'", tokens[2])))?;
                caps.insert(v, c);
            }
            "server" => {
                if tokens.len() != 3 {
                    return Err(err("expected: server i v".into()));
                }
                let total = num_nodes.ok_or_else(|| err("server before nodes header".into()))?;
                let obj: usize = tokens[1]
                    .parse()
                    .map_err(|_| err(format!("bad object index '{}'", tokens[1])))?;
                let v = intern(&mut names, &mut index, tokens[2], total)
                    .map_err(&err)?;
                servers.entry(obj).or_default().push(v);
            }
            "request" => {
                if tokens.len() < 4 {
                    return Err(err("expected: request i rate v1 v2 ...".into()));
                }
                let total = num_nodes.ok_or_else(|| err("request before nodes header".into()))?;
                let obj: usize = tokens[1]
                    .parse()
                    .map_err(|_| err(format!("bad object index '{}'", tokens[1])))?;
                let rate: f64 = tokens[2]
                    .parse()
                    .map_err(|_| err(format!("bad rate '{}'", tokens[2])))?;
                let mut path = Vec::with_capacity(tokens.len() - 3);
                for t in &tokens[3..] {
                    path.push(intern(&mut names, &mut index, t, total).map_err(&err)?);
                }
                requests.push((obj, rate, path));
            }
            other => {
                return Err(err(format!("unknown record '{other}'")));
            }
        }
    }

    let n = num_nodes.ok_or(BenchError::Parse { line: 0, msg: "missing nodes header".into() })?;
    while names.len() < n {
        // Nodes never referenced by name keep numeric placeholders.
        let fresh = format!("_{}", names.len());
        index.insert(fresh.clone(), names.len());
        names.push(fresh);
    }
    let catalog = servers.keys().copied().max().map_or(0, |m| m + 1);
    let mut server_sets = vec![Vec::new(); catalog];
    for (obj, nodes) in servers {
        server_sets[obj] = nodes;
    }
    let capacities = (0..n).map(|v| caps.get(&v).copied().unwrap_or(0)).collect();
    let requests = requests
        .into_iter()
        .map(|(obj, rate, path)| RequestClass::new(obj, path, rate))
        .collect();
    Ok(CacheNetwork::new(names, edges, capacities, catalog, server_sets, requests)?)
}

fn intern(
    names: &mut Vec<String>,
    index: &mut HashMap<String, usize>,
    token: &str,
    total: usize,
) -> Result<usize, String> {
    if let Some(&i) = index.get(token) {
        return Ok(i);
    }
    if names.len() >= total {
        return Err(format!(
            "node '{token}' exceeds the declared node count {total}"
        ));
    }
    names.push(token.to_string());
    index.insert(token.to_string(), names.len() - 1);
    Ok(names.len() - 1)
}
