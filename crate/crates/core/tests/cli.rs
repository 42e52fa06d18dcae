mod support;

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn fg(args: &[&str], stdin: &str, color: bool) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_fg"))
        .args(args)
        .env("FG_COLOR", if color { "1" } else { "0" })
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn text(b: &[u8]) -> &str {
    std::str::from_utf8(b).unwrap()
}

const LOOP: &str = "int count(int a) { while (a < 3) a++; return a; }";

#[test]
fn exit_codes() {
    assert_eq!(fg(&["cfg", "-"], LOOP, false).status.code(), Some(0));
    assert_eq!(fg(&["cfg", "-"], "int m( {", false).status.code(), Some(2));
    assert_eq!(
        fg(&["cfg", "/no/such/file.mj"], "", false).status.code(),
        Some(2)
    );
    assert_eq!(fg(&["frobnicate"], "", false).status.code(), Some(2));
    assert_eq!(fg(&["--help"], "", false).status.code(), Some(0));
}

#[test]
fn emit_and_validate_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("count.mj");
    std::fs::write(&src, LOOP).unwrap();
    let src = src.to_str().unwrap();
    let emitted = fg(&["validate", src, "--emit"], "", false);
    assert_eq!(emitted.status.code(), Some(0));
    let spec = text(&emitted.stdout).to_string();
    assert!(spec.starts_with("validate count\n"), "{spec}");

    let clean = fg(&["validate", src, "--spec", "-"], &spec, false);
    assert_eq!(clean.status.code(), Some(0));
    assert!(clean.stdout.is_empty());

    let bogus = format!("{spec}dfNext : \"return a;\" --> \"a++;\"\n");
    let out = fg(&["validate", src, "--spec", "-"], &bogus, false);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(text(&out.stdout), "Data missing link: return a; ==> a++;\n");

    let colored = fg(&["validate", src, "--spec", "-"], &bogus, true);
    assert_eq!(
        text(&colored.stdout),
        "\x1b[33mData missing link: \x1b[0mreturn a; ==> a++;\n"
    );
}

#[test]
fn spec_errors_exit_2() {
    let out = fg(
        &["validate", "-", "--spec", "/no/such.validate"],
        LOOP,
        false,
    );
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.validate");
    std::fs::write(
        &spec,
        "validate count\ndfNext : \"a\" --> \"b\"\ncfNext : \"a\" --> \"b\"\n",
    )
    .unwrap();
    let out = fg(
        &["validate", "-", "--spec", spec.to_str().unwrap()],
        LOOP,
        false,
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("3:1"), "{}", text(&out.stderr));
}

#[test]
fn warnings_go_to_stderr() {
    let out = fg(
        &["dfg", "-", "--json"],
        "int m(int a) { return a; a = a + 1; }",
        false,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stderr).starts_with("warning: use of `a`"));
    serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap();
}

/// The DOT output must be accepted by a parser for the Graphviz grammar,
/// with the same nodes and edges as the JSON rendering.
#[test]
fn dot_parses_with_graphviz_grammar() {
    for (stem, src) in support::corpus() {
        let dot = text(&fg(&["dfg", "-", "--dot"], &src, false).stdout).to_string();
        let json: serde_json::Value =
            serde_json::from_slice(&fg(&["dfg", "-", "--json"], &src, false).stdout).unwrap();
        let ast = dot_parser::ast::Graph::try_from(dot.as_str())
            .unwrap_or_else(|e| panic!("{stem}: {e}\n{dot}"));
        let graph = dot_parser::canonical::Graph::from(ast);
        let instrs = json["nodes"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|n| {
                !["Loop", "If", "Label", "Block", "Var", "Param"]
                    .contains(&n["kind"].as_str().unwrap())
            })
            .count();
        assert_eq!(graph.nodes.set.len(), instrs, "{stem}");
        let edges =
            json["cfNext"].as_array().unwrap().len() + json["dfNext"].as_array().unwrap().len();
        assert_eq!(graph.edges.set.len(), edges, "{stem}");
    }
}

/// Structural check of `--dot` output: every statement is a node
/// declaration or an edge between declared nodes, braces balance, and the
/// edge count matches the JSON rendering.
#[test]
fn dot_is_well_formed() {
    for (stem, src) in support::corpus() {
        let dot = text(&fg(&["dfg", "-", "--dot"], &src, false).stdout).to_string();
        let json: serde_json::Value =
            serde_json::from_slice(&fg(&["dfg", "-", "--json"], &src, false).stdout).unwrap();
        let lines: Vec<&str> = dot.lines().collect();
        assert!(
            lines[0].starts_with("digraph \"") && lines[0].ends_with(" {"),
            "{stem}"
        );
        assert_eq!(*lines.last().unwrap(), "}");
        assert_eq!(lines[1], "  node [shape=box];");
        let mut declared = std::collections::HashSet::new();
        let (mut solid, mut dashed) = (0, 0);
        for line in &lines[2..lines.len() - 1] {
            let body = line.trim().strip_suffix(';').unwrap();
            let ids = quoted(body);
            if body.contains(" -> ") {
                assert_eq!(ids.len(), 2, "{line}");
                assert!(
                    declared.contains(&ids[0]) && declared.contains(&ids[1]),
                    "{line}"
                );
                if body.ends_with("[style=dashed]") {
                    dashed += 1;
                } else {
                    solid += 1;
                }
            } else {
                assert!(body.contains("[label="), "{line}");
                assert!(declared.insert(ids[0].clone()), "duplicate node {line}");
            }
        }
        assert_eq!(solid, json["cfNext"].as_array().unwrap().len(), "{stem}");
        assert_eq!(dashed, json["dfNext"].as_array().unwrap().len(), "{stem}");
    }
}

/// Double-quoted strings in a DOT statement, unescaped.
fn quoted(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '"' {
            continue;
        }
        let mut cur = String::new();
        loop {
            match chars.next().expect("unterminated string") {
                '\\' => cur.push(chars.next().unwrap()),
                '"' => break,
                c => cur.push(c),
            }
        }
        out.push(cur);
    }
    out
}
