use std::collections::HashMap;
use std::path::Path;

use super::{TokenCounter, TokenizeError};
use crate::io;

/// Byte-pair-encoding model loaded from a vocabulary and an ordered merge list.
///
/// Segmentation starts from characters; characters missing from the
/// vocabulary become `<0xNN>` byte tokens when byte fallback is on. The
/// adjacent pair with the lowest merge rank is merged first (leftmost on ties)
/// until no rule applies.
#[derive(Debug, Clone)]
pub struct BpeModel {
    vocab: HashMap<String, u32>,
    merges: Vec<(String, String)>,
    ranks: HashMap<String, HashMap<String, usize>>,
    byte_fallback: bool,
}

pub(crate) fn byte_token(b: u8) -> String {
    format!("<0x{b:02X}>")
}

impl BpeModel {
    pub fn new(
        vocab: HashMap<String, u32>,
        merges: Vec<(String, String)>,
        byte_fallback: bool,
    ) -> Result<Self, TokenizeError> {
        let mut ranks: HashMap<String, HashMap<String, usize>> = HashMap::new();
        for (rank, (left, right)) in merges.iter().enumerate() {
            let merged = format!("{left}{right}");
            if !vocab.contains_key(&merged) {
                return Err(TokenizeError::MergeOutsideVocab {
                    left: left.clone(),
                    right: right.clone(),
                    merged,
                });
            }
            // keep the first (best) rank if a rule is listed twice
            ranks
                .entry(left.clone())
                .or_default()
                .entry(right.clone())
                .or_insert(rank);
        }
        Ok(BpeModel {
            vocab,
            merges,
            ranks,
            byte_fallback,
        })
    }

    /// Loads `token<TAB>id` vocabulary lines and `left<SPACE>right` merge lines.
    /// A leading `#version` line in the merges file is ignored.
    pub fn load(vocab_path: &Path, merges_path: &Path, byte_fallback: bool) -> Result<Self, TokenizeError> {
        let fmt_err = |path: &Path, line: usize, message: &str| TokenizeError::ModelFormat {
            path: path.display().to_string(),
            line,
            message: message.to_string(),
        };
        let mut vocab = HashMap::new();
        for (i, line) in io::read_text_lines(vocab_path)?.into_iter().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (tok, id) = line
                .rsplit_once('\t')
                .ok_or_else(|| fmt_err(vocab_path, i + 1, "expected token<TAB>id"))?;
            let id: u32 = id
                .trim()
                .parse()
                .map_err(|_| fmt_err(vocab_path, i + 1, "id is not an unsigned integer"))?;
            vocab.insert(tok.to_string(), id);
        }
        let mut merges = Vec::new();
        for (i, line) in io::read_text_lines(merges_path)?.into_iter().enumerate() {
            if line.is_empty() || (i == 0 && line.starts_with("#version")) {
                continue;
            }
            let (l, r) = line
                .split_once(' ')
                .ok_or_else(|| fmt_err(merges_path, i + 1, "expected left<SPACE>right"))?;
            merges.push((l.to_string(), r.to_string()));
        }
        Self::new(vocab, merges, byte_fallback)
    }

    pub fn byte_fallback(&self) -> bool {
        self.byte_fallback
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    fn rank(&self, left: &str, right: &str) -> Option<usize> {
        self.ranks.get(left).and_then(|m| m.get(right)).copied()
    }

    fn initial_symbols(&self, text: &str) -> Result<Vec<String>, TokenizeError> {
        let mut symbols = Vec::with_capacity(text.len());
        let mut buf = [0u8; 4];
        for ch in text.chars() {
            let s: &str = ch.encode_utf8(&mut buf);
            if self.vocab.contains_key(s) {
                symbols.push(s.to_string());
            } else if self.byte_fallback {
                symbols.extend(s.bytes().map(byte_token));
            } else {
                return Err(TokenizeError::Coverage { ch, code: ch as u32 });
            }
        }
        Ok(symbols)
    }

    /// Segments `text` into BPE symbols.
    pub fn encode(&self, text: &str) -> Result<Vec<String>, TokenizeError> {
        let mut symbols = self.initial_symbols(text)?;
        loop {
            let best = symbols
                .windows(2)
                .enumerate()
                .filter_map(|(i, w)| self.rank(&w[0], &w[1]).map(|r| (r, i)))
                .min();
            let Some((_, i)) = best else { break };
            let right = symbols.remove(i + 1);
            symbols[i].push_str(&right);
        }
        Ok(symbols)
    }

    /// Number of symbols produced by [`encode`](Self::encode).
    pub fn bpe_count(&self, text: &str) -> Result<usize, TokenizeError> {
        Ok(self.encode(text)?.len())
    }
}

impl TokenCounter for BpeModel {
    fn name(&self) -> &str {
        "bpe"
    }

    fn count(&self, text: &str) -> Result<usize, TokenizeError> {
        self.bpe_count(text)
    }
}
