//! Loading sequences, kernels and models from files, stdin and flags.

use std::fs;
use std::io::Read;

use esamp::prefix::ValueKind;
use esamp::{GeneratorSpec, MixtureModel, NamedSequence, PartialKernel, SequencePrefix};

use crate::Usage;

/// Where a sequence prefix comes from. Exactly one source is set.
pub struct SequenceSource<'a> {
    pub file: Option<&'a str>,
    pub gen: Option<&'a str>,
    pub named: Option<&'a str>,
    pub n: Option<usize>,
    pub alphabet: Option<usize>,
}

impl SequenceSource<'_> {
    pub fn load(&self, kind: ValueKind) -> Result<SequencePrefix, Usage> {
        let x = if let Some(path) = self.file {
            let text = read_text(path)?;
            SequencePrefix::read_csv(text.as_bytes(), kind, self.alphabet)
                .map_err(|e| Usage::new(format!("{path}: {e}")))?
        } else if let Some(spec) = self.gen {
            let spec: GeneratorSpec = serde_json::from_str(spec)
                .map_err(|e| Usage::new(format!("--gen: {e}")))?;
            let x = spec.generate().map_err(|e| Usage::new(format!("--gen: {e}")))?;
            convert(x, kind, self.alphabet)?
        } else if let Some(name) = self.named {
            let seq = NamedSequence::from_name(name).ok_or_else(|| {
                let known: Vec<&str> = NamedSequence::ALL.iter().map(|s| s.name()).collect();
                Usage::new(format!("unknown sequence {name:?}; known: {}", known.join(", ")))
            })?;
            let n = self
                .n
                .ok_or_else(|| Usage::new("--named needs --n"))?;
            convert(seq.prefix(n).map_err(|e| Usage::new(e.to_string()))?, kind, self.alphabet)?
        } else {
            return Err(Usage::new("give one of --file, --gen or --named"));
        };
        match self.n {
            Some(n) if self.named.is_none() => x
                .truncated(n)
                .map_err(|e| Usage::new(e.to_string())),
            _ => Ok(x),
        }
    }
}

fn convert(x: SequencePrefix, kind: ValueKind, alphabet: Option<usize>) -> Result<SequencePrefix, Usage> {
    if x.kind() == kind && alphabet.is_none() {
        return Ok(x);
    }
    x.reinterpret(kind, alphabet)
        .map_err(|e| Usage::new(e.to_string()))
}

/// `-` reads stdin.
pub fn read_text(path: &str) -> Result<String, Usage> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Usage::new(format!("stdin: {e}")))?;
    } else {
        text = fs::read_to_string(path).map_err(|e| Usage::new(format!("{path}: {e}")))?;
    }
    Ok(text)
}

pub fn kernel(path: &str) -> Result<PartialKernel, Usage> {
    PartialKernel::from_json(&read_text(path)?).map_err(|e| Usage::new(format!("{path}: {e}")))
}

/// Inline JSON when the text starts with `{`, otherwise a path.
pub fn mixture(arg: &str) -> Result<MixtureModel, Usage> {
    let (origin, text) = if arg.trim_start().starts_with('{') {
        ("--model", arg.to_string())
    } else {
        (arg, read_text(arg)?)
    };
    serde_json::from_str(&text).map_err(|e| Usage::new(format!("{origin}: {e}")))
}
