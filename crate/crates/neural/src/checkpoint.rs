//! Plain-text checkpoint container. Values are written with Rust's shortest
//! round-trip float formatting, so a save/load cycle is bit exact.

use std::io::{BufRead, Write};

use crate::error::{NeuralError, Result};
use crate::model::{DnnInput, ModelKind, ModelSpec, Network};
use crate::tensor::Tensor;

const MAGIC: &str = "ssdenoise-checkpoint 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub network: Network,
    pub seed: u64,
    pub steps: u64,
}

impl Checkpoint {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let spec = self.network.spec();
        writeln!(w, "{MAGIC}")?;
        let kind = match spec.kind {
            ModelKind::Dnn => "dnn",
            ModelKind::Lstm => "lstm",
        };
        writeln!(w, "kind {kind}")?;
        let hidden: Vec<String> = spec.hidden_sizes.iter().map(|h| h.to_string()).collect();
        writeln!(w, "hidden {}", hidden.join(","))?;
        writeln!(w, "lookback {}", spec.lookback)?;
        writeln!(w, "input {}", spec.input_width)?;
        writeln!(w, "output {}", spec.output_width)?;
        let dnn_input = match spec.dnn_input {
            DnnInput::LastCycle => "last",
            DnnInput::Window => "window",
        };
        writeln!(w, "dnn_input {dnn_input}")?;
        match spec.arch {
            Some(a) => writeln!(w, "arch {a}")?,
            None => writeln!(w, "arch custom")?,
        }
        writeln!(w, "seed {}", self.seed)?;
        writeln!(w, "steps {}", self.steps)?;
        for (name, t) in self.network.param_names().iter().zip(self.network.params()) {
            let shape: Vec<String> = t.shape().iter().map(|d| d.to_string()).collect();
            writeln!(w, "tensor {name} {}", shape.join(","))?;
            let mut line = String::with_capacity(t.len() * 20);
            for (i, v) in t.as_slice().iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&v.to_string());
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().map(|(i, l)| l.map(|l| (i + 1, l)));
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some(Ok(v)) => Ok(v),
                Some(Err(e)) => Err(e.into()),
                None => Err(NeuralError::Checkpoint {
                    line: 0,
                    reason: format!("truncated file, expected {what}"),
                }),
            }
        };
        let bad = |line: usize, reason: String| NeuralError::Checkpoint { line, reason };

        let (n, magic) = next("header")?;
        if magic.trim() != MAGIC {
            return Err(bad(n, format!("unknown header {magic:?}")));
        }
        let mut field = |key: &str| -> Result<(usize, String)> {
            let (n, line) = next(key)?;
            match line.split_once(' ') {
                Some((k, v)) if k == key => Ok((n, v.trim().to_string())),
                _ => Err(bad(n, format!("expected `{key} ...`, found {line:?}"))),
            }
        };
        let (n, kind) = field("kind")?;
        let kind = match kind.as_str() {
            "dnn" => ModelKind::Dnn,
            "lstm" => ModelKind::Lstm,
            other => return Err(bad(n, format!("unknown kind {other:?}"))),
        };
        let (n, hidden) = field("hidden")?;
        let hidden_sizes = parse_list(&hidden).map_err(|e| bad(n, e))?;
        let lookback = parse_num(field("lookback")?)?;
        let input_width = parse_num(field("input")?)?;
        let output_width = parse_num(field("output")?)?;
        let (n, dnn_input) = field("dnn_input")?;
        let dnn_input = match dnn_input.as_str() {
            "last" => DnnInput::LastCycle,
            "window" => DnnInput::Window,
            other => return Err(bad(n, format!("unknown dnn_input {other:?}"))),
        };
        let (n, arch) = field("arch")?;
        let arch = match arch.as_str() {
            "custom" => None,
            a => Some(a.parse::<u8>().map_err(|e| bad(n, e.to_string()))?),
        };
        let seed = parse_num(field("seed")?)?;
        let steps = parse_num(field("steps")?)?;

        let spec = ModelSpec {
            kind,
            hidden_sizes,
            lookback,
            input_width,
            output_width,
            dnn_input,
            arch,
        };
        let mut network = Network::zeros(spec).map_err(|e| bad(n, e.to_string()))?;
        let names = network.param_names();
        for (name, param) in names.iter().zip(network.params_mut()) {
            let (n, header) = next("tensor header")?;
            let parts: Vec<&str> = header.split(' ').collect();
            if parts.len() != 3 || parts[0] != "tensor" || parts[1] != name {
                return Err(bad(n, format!("expected tensor {name}, found {header:?}")));
            }
            let shape = parse_list(parts[2]).map_err(|e| bad(n, e))?;
            if shape != param.shape() {
                return Err(bad(n, format!("tensor {name} has shape {shape:?}, expected {:?}", param.shape())));
            }
            let (n, values) = next("tensor values")?;
            let data = values
                .split(' ')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(n, e.to_string()))?;
            *param = Tensor::from_vec(&shape, data).map_err(|e| bad(n, e.to_string()))?;
        }
        Ok(Self { network, seed, steps })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}")))
        .collect()
}

fn parse_num<T: std::str::FromStr>((n, v): (usize, String)) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e: T::Err| NeuralError::Checkpoint {
        line: n,
        reason: format!("{v:?}: {e}"),
    })
}
