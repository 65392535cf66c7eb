//! Codeword file format: JSON carrying {n, q, gamma, family, codewords},
//! each codeword a list of [ditstring, re, im] triples. Amplitudes are
//! printed with 17 significant digits so files round-trip bit-exactly.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use aqec::codes::{CodeSpace, Codeword, Family};
use aqec::dit::DitString;
use aqec::C64;

pub fn to_json_string(code: &CodeSpace) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"n\": {},\n", code.n));
    out.push_str(&format!("  \"q\": {},\n", code.q));
    out.push_str(&format!("  \"gamma\": {:.16e},\n", code.gamma));
    out.push_str(&format!("  \"family\": \"{}\",\n", code.family.tag()));
    out.push_str("  \"codewords\": [\n");
    let words = code.codewords();
    for (wi, word) in words.iter().enumerate() {
        out.push_str("    [\n");
        let terms: Vec<_> = word.terms().collect();
        for (ti, (dits, amp)) in terms.iter().enumerate() {
            out.push_str(&format!(
                "      [\"{}\", {:.16e}, {:.16e}]{}\n",
                dits,
                amp.re,
                amp.im,
                if ti + 1 < terms.len() { "," } else { "" }
            ));
        }
        out.push_str(&format!("    ]{}\n", if wi + 1 < words.len() { "," } else { "" }));
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn write_code(code: &CodeSpace, path: &Path) -> Result<()> {
    fs::write(path, to_json_string(code))
        .with_context(|| format!("writing codeword file {}", path.display()))
}

#[derive(Deserialize)]
struct RawCodeFile {
    n: usize,
    q: u8,
    gamma: f64,
    family: String,
    codewords: Vec<Vec<(String, f64, f64)>>,
}

pub fn from_json_str(text: &str) -> Result<CodeSpace> {
    let raw: RawCodeFile = serde_json::from_str(text).context("parsing codeword file")?;
    let family: Family = raw.family.parse()?;
    if raw.codewords.is_empty() {
        bail!("codeword file has no codewords");
    }
    let mut words = Vec::with_capacity(raw.codewords.len());
    for entries in &raw.codewords {
        let mut terms = Vec::with_capacity(entries.len());
        for (label, re, im) in entries {
            let dits = DitString::parse(label, raw.q)
                .map_err(|e| anyhow!("bad basis label {label}: {e}"))?;
            terms.push((dits, C64::new(*re, *im)));
        }
        words.push(Codeword::from_terms(raw.n, raw.q, &terms)?);
    }
    Ok(CodeSpace::new(family, raw.n, raw.q, raw.gamma, words)?)
}

pub fn read_code(path: &Path) -> Result<CodeSpace> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading codeword file {}", path.display()))?;
    from_json_str(&text)
}
