//! `batch`: a manifest `{"entries": [{"args": [...], "expect": 0}]}` run in
//! parallel. Relative `--in` paths resolve against the manifest directory.
//! `QUIVMOD_THREADS` caps the worker count.

use std::path::Path;

use quivmod::{Error, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{Input, Report};

pub const THREADS_ENV: &str = "QUIVMOD_THREADS";

struct Entry {
    args: Vec<String>,
    expect: i32,
}

fn parse_manifest(v: &Value, base: &Path) -> Result<Vec<Entry>> {
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("manifest needs an \"entries\" list".into()))?;
    entries
        .iter()
        .map(|e| {
            let raw = e
                .get("args")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("entry needs an \"args\" list".into()))?;
            let mut args = raw
                .iter()
                .map(|a| a.as_str().map(String::from).ok_or_else(|| Error::Parse("args must be strings".into())))
                .collect::<Result<Vec<_>>>()?;
            for i in 1..args.len() {
                if args[i - 1] == "--in" && args[i] != "-" && Path::new(&args[i]).is_relative() {
                    args[i] = base.join(&args[i]).to_string_lossy().into_owned();
                }
            }
            let expect = match e.get("expect") {
                None => 0,
                Some(x) => x.as_i64().ok_or_else(|| Error::Parse("\"expect\" must be an integer".into()))? as i32,
            };
            Ok(Entry { args, expect })
        })
        .collect()
}

pub(crate) fn run_manifest(input: &Input) -> Result<Report> {
    let path = input.input.as_deref().ok_or_else(|| Error::Parse("batch needs --in <manifest>".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid manifest: {e}")))?;
    let base = Path::new(path).parent().unwrap_or(Path::new("."));
    let entries = parse_manifest(&v, base)?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
    let results: Vec<(i32, String)> = pool.install(|| {
        entries
            .par_iter()
            .map(|e| {
                let mut argv = vec!["quivmod".to_string()];
                argv.extend(e.args.iter().cloned());
                let out = crate::run(argv, &mut std::io::empty());
                (out.code, out.stdout)
            })
            .collect()
    });

    let mut passed = 0;
    let mut worst = 0;
    let mut rows = Vec::with_capacity(entries.len());
    for (i, (e, (code, stdout))) in entries.iter().zip(results).enumerate() {
        let pass = code == e.expect;
        if pass {
            passed += 1;
        } else {
            worst = worst.max(if code == 2 { 2 } else { 1 });
        }
        let mut row = json!({"index": i, "args": e.args, "expect": e.expect, "code": code, "pass": pass});
        if !pass {
            row["output"] = serde_json::from_str(&stdout).unwrap_or(Value::String(stdout));
        }
        rows.push(row);
    }
    let total = rows.len();
    let out = json!({"entries": rows, "total": total, "passed": passed, "failed": total - passed});
    Ok(Report { value: out, code: worst })
}
