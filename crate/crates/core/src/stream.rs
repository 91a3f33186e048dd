//! Update-stream format and execution.
//!
//! Streams are ASCII, newline-delimited, space-separated: a header line
//! `n <count>` followed by `+ u v` (insert), `- u v` (delete), `? v`
//! (colour query) and `!` (validate now). Execution answers each query with
//! `v <flattened colour>`, aborts on any propriety violation, and leaves a
//! key-value stats document behind.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use thiserror::Error;

use crate::engine::QueryError;
use crate::graph::{GraphError, VertexId};
use crate::label::ColourLabel;
use crate::runner::{RunConfig, Runner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamOp {
    Insert(VertexId, VertexId),
    Delete(VertexId, VertexId),
    Query(VertexId),
    Validate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateStream {
    pub n: usize,
    pub ops: Vec<StreamOp>,
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("illegal update at line {line}: {source}")]
    Illegal { line: usize, source: GraphError },
    #[error("query failed at line {line}: {source}")]
    Query { line: usize, source: QueryError },
    #[error("propriety violation on edge {{{u}, {v}}} at epoch {epoch}")]
    Propriety { u: VertexId, v: VertexId, epoch: u64 },
    #[error("bad workload parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl UpdateStream {
    pub fn parse(text: &str) -> Result<Self, StreamError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| StreamError::Parse { line: 1, msg: "empty stream".into() })?;
        let n = parse_header(header)?;
        let mut ops = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let mut tok = line.split_whitespace();
            let op = match tok.next() {
                None => {
                    return Err(StreamError::Parse { line: lineno, msg: "blank line".into() })
                }
                Some("+") => {
                    let (u, v) = parse_pair(&mut tok, lineno, n)?;
                    StreamOp::Insert(u, v)
                }
                Some("-") => {
                    let (u, v) = parse_pair(&mut tok, lineno, n)?;
                    StreamOp::Delete(u, v)
                }
                Some("?") => {
                    let v = parse_vertex(&mut tok, lineno, n)?;
                    StreamOp::Query(v)
                }
                Some("!") => StreamOp::Validate,
                Some(other) => {
                    return Err(StreamError::Parse {
                        line: lineno,
                        msg: format!("unknown operation '{other}'"),
                    })
                }
            };
            if tok.next().is_some() {
                return Err(StreamError::Parse { line: lineno, msg: "trailing tokens".into() });
            }
            ops.push(op);
        }
        Ok(UpdateStream { n, ops })
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, StreamError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.ops.len() * 12 + 16);
        let _ = writeln!(out, "n {}", self.n);
        for op in &self.ops {
            match *op {
                StreamOp::Insert(u, v) => {
                    let _ = writeln!(out, "+ {u} {v}");
                }
                StreamOp::Delete(u, v) => {
                    let _ = writeln!(out, "- {u} {v}");
                }
                StreamOp::Query(v) => {
                    let _ = writeln!(out, "? {v}");
                }
                StreamOp::Validate => {
                    let _ = writeln!(out, "!");
                }
            }
        }
        out
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), StreamError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_header(line: &str) -> Result<usize, StreamError> {
    let mut tok = line.split_whitespace();
    match (tok.next(), tok.next(), tok.next()) {
        (Some("n"), Some(count), None) => count
            .parse()
            .map_err(|_| StreamError::Parse { line: 1, msg: format!("bad vertex count '{count}'") }),
        _ => Err(StreamError::Parse { line: 1, msg: "expected header 'n <count>'".into() }),
    }
}

fn parse_vertex<'a>(
    tok: &mut impl Iterator<Item = &'a str>,
    line: usize,
    n: usize,
) -> Result<VertexId, StreamError> {
    let raw = tok
        .next()
        .ok_or_else(|| StreamError::Parse { line, msg: "missing vertex".into() })?;
    let v: VertexId = raw
        .parse()
        .map_err(|_| StreamError::Parse { line, msg: format!("bad vertex '{raw}'") })?;
    if (v as usize) >= n {
        return Err(StreamError::Parse { line, msg: format!("vertex {v} out of range") });
    }
    Ok(v)
}

fn parse_pair<'a>(
    tok: &mut impl Iterator<Item = &'a str>,
    line: usize,
    n: usize,
) -> Result<(VertexId, VertexId), StreamError> {
    let u = parse_vertex(tok, line, n)?;
    let v = parse_vertex(tok, line, n)?;
    Ok((u, v))
}

/// Ordered key-value stats document; one datum per line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    entries: Vec<(String, String)>,
}

impl RunStats {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} {v}");
        }
        out
    }

    /// The document without wall-clock lines; byte-identical across replays
    /// of the same (stream, config).
    pub fn deterministic_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            if !k.starts_with("wall_") {
                let _ = writeln!(out, "{k} {v}");
            }
        }
        out
    }
}

#[derive(Debug)]
pub struct RunOutput {
    /// One entry per `?` op: the queried vertex and its label.
    pub answers: Vec<(VertexId, ColourLabel)>,
    pub stats: RunStats,
}

pub fn run_stream(path: impl AsRef<Path>, cfg: &RunConfig) -> Result<RunOutput, StreamError> {
    let stream = UpdateStream::read_file(path)?;
    run_ops(&stream, cfg)
}

pub fn run_ops(stream: &UpdateStream, cfg: &RunConfig) -> Result<RunOutput, StreamError> {
    let mut runner = Runner::new(stream.n, cfg);
    let mut answers = Vec::new();
    let mut updates = 0u64;
    let mut validations = 0u64;
    let mut palette_used_max = 0usize;
    let mut max_colour = 0u64;
    let mut max_component = 0usize;
    let mut max_out_degree = 0u32;
    let mut wall_update = std::time::Duration::ZERO;
    let mut wall_query = std::time::Duration::ZERO;
    let mut wall_validate = std::time::Duration::ZERO;
    for (idx, op) in stream.ops.iter().enumerate() {
        let line = idx + 2;
        match *op {
            StreamOp::Insert(u, v) => {
                let t = Instant::now();
                runner.insert_edge(u, v).map_err(|source| StreamError::Illegal { line, source })?;
                wall_update += t.elapsed();
                updates += 1;
            }
            StreamOp::Delete(u, v) => {
                let t = Instant::now();
                runner.delete_edge(u, v).map_err(|source| StreamError::Illegal { line, source })?;
                wall_update += t.elapsed();
                updates += 1;
            }
            StreamOp::Query(v) => {
                let t = Instant::now();
                let label =
                    runner.colour(v).map_err(|source| StreamError::Query { line, source })?;
                wall_query += t.elapsed();
                answers.push((v, label));
            }
            StreamOp::Validate => {
                let t = Instant::now();
                let report =
                    runner.validate().map_err(|source| StreamError::Query { line, source })?;
                wall_validate += t.elapsed();
                validations += 1;
                if !report.proper {
                    let (u, v) = report.violating_edge.expect("improper report names an edge");
                    return Err(StreamError::Propriety { u, v, epoch: runner.graph().epoch() });
                }
                palette_used_max = palette_used_max.max(report.palette_used);
                max_colour = max_colour.max(report.max_colour);
                max_out_degree = max_out_degree.max(report.max_out_degree);
                if let Some((size, _)) = report.component_size_histogram.last() {
                    max_component = max_component.max(*size);
                }
            }
        }
    }
    let mut stats = RunStats::default();
    stats.push("engine", runner.dispatcher().cfg.engine.name());
    stats.push("seed", cfg.seed);
    stats.push("delta", cfg.delta);
    stats.push("base_threshold", runner.dispatcher().cfg.engine_cfg.base_threshold);
    stats.push("direct_threshold", runner.dispatcher().cfg.direct_threshold);
    stats.push("repartition_period", runner.dispatcher().cfg.repartition_period);
    stats.push(
        "rebuild_period",
        cfg.rebuild_period.map(|p| p.to_string()).unwrap_or_else(|| "auto".into()),
    );
    stats.push("n", stream.n);
    stats.push("updates", updates);
    stats.push("queries", answers.len());
    stats.push("validations", validations);
    stats.push("final_epoch", runner.graph().epoch());
    stats.push("final_m", runner.graph().m());
    stats.push("alpha_hat", runner.orientation().alpha_hat());
    stats.push("max_out_degree", max_out_degree.max(runner.orientation().dmax()));
    stats.push("palette_used", palette_used_max);
    stats.push("max_colour", max_colour);
    stats.push("max_residual_component", max_component);
    let better = runner.better_stats();
    stats.push("proposals_total", better.proposals_made);
    stats.push("outcomes_required", better.outcomes_required);
    stats.push("outcome_weight", better.outcome_weight);
    stats.push("max_badness", better.max_badness_seen);
    if let Some(bound) = runner.dispatcher().routed_palette_bound(runner.graph(), runner.orientation())
    {
        stats.push("routed_palette_bound", bound);
    }
    stats.push("wall_update_ms", wall_update.as_millis());
    stats.push("wall_query_ms", wall_query.as_millis());
    stats.push("wall_validate_ms", wall_validate.as_millis());
    Ok(RunOutput { answers, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatcher::EngineChoice;

    #[test]
    fn parse_and_format_round_trip() {
        let text = "n 4\n+ 0 1\n+ 1 2\n? 2\n!\n- 0 1\n";
        let s = UpdateStream::parse(text).unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(s.ops.len(), 5);
        assert_eq!(s.to_text(), text);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            UpdateStream::parse("n x\n"),
            Err(StreamError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            UpdateStream::parse("n 3\n* 0 1\n"),
            Err(StreamError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            UpdateStream::parse("n 3\n+ 0 7\n"),
            Err(StreamError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            UpdateStream::parse("n 3\n+ 0 1 2\n"),
            Err(StreamError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn two_vertex_stream_yields_distinct_colours() {
        let s = UpdateStream::parse("n 2\n+ 0 1\n? 0\n? 1\n").unwrap();
        for engine in
            [EngineChoice::Det, EngineChoice::RandSimple, EngineChoice::RandBetter, EngineChoice::AutoMin]
        {
            let out = run_ops(&s, &RunConfig::with_engine(engine, 5)).unwrap();
            assert_eq!(out.answers.len(), 2);
            assert_ne!(out.answers[0].1.value, out.answers[1].1.value, "{engine:?}");
        }
    }

    #[test]
    fn delete_before_insert_is_illegal_with_line_number() {
        let s = UpdateStream::parse("n 3\n- 0 1\n").unwrap();
        match run_ops(&s, &RunConfig::default()) {
            Err(StreamError::Illegal { line: 2, source: GraphError::MissingEdge(0, 1) }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let params = crate::gen::GenParams {
            validate_every: 500,
            ..crate::gen::GenParams::new(crate::gen::WorkloadKind::Gnm, 300, 2000, 9)
        };
        let s = crate::gen::gen_workload(&params).unwrap();
        let cfg = RunConfig::with_engine(EngineChoice::RandSimple, 123);
        let a = run_ops(&s, &cfg).unwrap();
        let b = run_ops(&s, &cfg).unwrap();
        let colours_a: Vec<u64> = a.answers.iter().map(|(_, l)| l.value).collect();
        let colours_b: Vec<u64> = b.answers.iter().map(|(_, l)| l.value).collect();
        assert_eq!(colours_a, colours_b);
        assert_eq!(a.stats.deterministic_text(), b.stats.deterministic_text());
    }

    #[test]
    fn validation_runs_and_stats_fill_in() {
        let s = UpdateStream::parse("n 6\n+ 0 1\n+ 1 2\n+ 2 0\n!\n? 0\n").unwrap();
        let out = run_ops(&s, &RunConfig::with_engine(EngineChoice::Det, 1)).unwrap();
        assert_eq!(out.stats.get("validations"), Some("1"));
        assert_eq!(out.stats.get("updates"), Some("3"));
        assert!(out.stats.get("palette_used").unwrap().parse::<usize>().unwrap() >= 3);
    }
}
