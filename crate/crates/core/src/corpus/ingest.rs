use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use super::{validate_code, CorpusError, MonoRecord, ParallelRecord};
use crate::io::{self, IoError};

/// Records read from a file together with the number of skipped blank lines or pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ingested<R> {
    pub records: Vec<R>,
    pub blank_skipped: usize,
}

/// Streaming reader yielding one [`MonoRecord`] per non-blank line.
pub struct MonoStream {
    reader: BufReader<File>,
    path: PathBuf,
    lang: String,
    source: String,
    line: usize,
    blank_skipped: usize,
}

impl MonoStream {
    pub fn open(path: &Path, lang: &str, source: &str) -> Result<Self, CorpusError> {
        validate_code(lang)?;
        Ok(MonoStream {
            reader: io::open(path)?,
            path: path.to_path_buf(),
            lang: lang.to_string(),
            source: source.to_string(),
            line: 0,
            blank_skipped: 0,
        })
    }

    /// Blank lines skipped so far.
    pub fn blank_skipped(&self) -> usize {
        self.blank_skipped
    }
}

impl Iterator for MonoStream {
    type Item = Result<MonoRecord, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let mut buf = Vec::new();
            match self.reader.read_until(b'\n', &mut buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(IoError::io(&self.path, e).into())),
            }
            self.line += 1;
            io::strip_terminator(&mut buf);
            let text = match String::from_utf8(buf) {
                Ok(t) => t,
                Err(_) => {
                    return Some(Err(IoError::Utf8 {
                        path: self.path.clone(),
                        line: self.line,
                    }
                    .into()))
                }
            };
            if text.trim().is_empty() {
                self.blank_skipped += 1;
                continue;
            }
            return Some(Ok(MonoRecord {
                lang: self.lang.clone(),
                text,
                source: self.source.clone(),
            }));
        }
    }
}

/// Reads a one-segment-per-line text file. Blank lines are skipped and counted;
/// text is otherwise kept byte-for-byte.
pub fn ingest_mono(path: &Path, lang: &str, source: &str) -> Result<Ingested<MonoRecord>, CorpusError> {
    let mut stream = MonoStream::open(path, lang, source)?;
    let mut records = Vec::new();
    for r in stream.by_ref() {
        records.push(r?);
    }
    Ok(Ingested {
        records,
        blank_skipped: stream.blank_skipped(),
    })
}

/// Where bitext comes from.
#[derive(Debug, Clone, Copy)]
pub enum ParallelSource<'a> {
    /// One file, two tab-separated columns, no header.
    Tsv(&'a Path),
    /// Two line-aligned files.
    Aligned { src: &'a Path, tgt: &'a Path },
}

pub fn ingest_parallel(
    input: ParallelSource<'_>,
    src_lang: &str,
    tgt_lang: &str,
    source: &str,
) -> Result<Ingested<ParallelRecord>, CorpusError> {
    validate_code(src_lang)?;
    validate_code(tgt_lang)?;
    if src_lang == tgt_lang {
        return Err(CorpusError::SameLanguage(src_lang.to_string()));
    }
    let pairs: Vec<(String, String)> = match input {
        ParallelSource::Tsv(path) => {
            let mut pairs = Vec::new();
            for (i, line) in io::read_text_lines(path)?.into_iter().enumerate() {
                if line.trim().is_empty() {
                    pairs.push((String::new(), String::new()));
                    continue;
                }
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 2 {
                    return Err(CorpusError::Format {
                        path: path.display().to_string(),
                        line: i + 1,
                        fields: fields.len(),
                    });
                }
                pairs.push((fields[0].to_string(), fields[1].to_string()));
            }
            pairs
        }
        ParallelSource::Aligned { src, tgt } => {
            let s = io::read_text_lines(src)?;
            let t = io::read_text_lines(tgt)?;
            if s.len() != t.len() {
                return Err(CorpusError::Alignment {
                    src: src.display().to_string(),
                    tgt: tgt.display().to_string(),
                    src_lines: s.len(),
                    tgt_lines: t.len(),
                });
            }
            s.into_iter().zip(t).collect()
        }
    };

    let mut records = Vec::with_capacity(pairs.len());
    let mut blank_skipped = 0;
    for (src, tgt) in pairs {
        if src.trim().is_empty() || tgt.trim().is_empty() {
            blank_skipped += 1;
            continue;
        }
        records.push(ParallelRecord {
            src_lang: src_lang.to_string(),
            tgt_lang: tgt_lang.to_string(),
            src,
            tgt,
            source: source.to_string(),
        });
    }
    Ok(Ingested {
        records,
        blank_skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &tempfile::TempDir, name: &str, content: &[u8]) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, content).unwrap();
        p
    }

    #[test]
    fn mono_skips_blank_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "m.txt", "kamisaraki\n\nwaliki\n".as_bytes());
        let got = ingest_mono(&p, "aym", "test").unwrap();
        assert_eq!(got.records.len(), 2);
        assert_eq!(got.blank_skipped, 1);
        assert_eq!(got.records[1].text, "waliki");
    }

    #[test]
    fn mono_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "m.txt", b"");
        let got = ingest_mono(&p, "aym", "test").unwrap();
        assert!(got.records.is_empty());
        assert_eq!(got.blank_skipped, 0);
    }

    #[test]
    fn mono_keeps_inner_whitespace_and_strips_one_terminator() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "m.txt", b"  padded \t\r\nlast");
        let got = ingest_mono(&p, "aym", "s").unwrap();
        assert_eq!(got.records[0].text, "  padded \t");
        assert_eq!(got.records[1].text, "last");
    }

    #[test]
    fn mono_decode_error_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "m.txt", b"a\nb\n\xc3\x28\n");
        let err = ingest_mono(&p, "aym", "s").unwrap_err();
        assert!(err.to_string().contains(":3:"), "{err}");
    }

    #[test]
    fn mono_rejects_bad_code() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "m.txt", b"a\n");
        assert!(ingest_mono(&p, "AYM", "s").is_err());
    }

    #[test]
    fn aligned_files() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(&dir, "s.txt", b"uno\ndos\ntres\n");
        let t = write(&dir, "t.txt", b"maya\npaya\nkimsa\n");
        let got = ingest_parallel(ParallelSource::Aligned { src: &s, tgt: &t }, "spa", "aym", "x").unwrap();
        assert_eq!(got.records.len(), 3);
        assert_eq!(got.records[2].tgt, "kimsa");
    }

    #[test]
    fn aligned_mismatch_reports_counts() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(&dir, "s.txt", b"1\n2\n3\n");
        let t = write(&dir, "t.txt", b"1\n2\n3\n4\n");
        let err = ingest_parallel(ParallelSource::Aligned { src: &s, tgt: &t }, "spa", "aym", "x").unwrap_err();
        assert!(err.to_string().contains("3 vs 4"), "{err}");
    }

    #[test]
    fn tsv_field_count_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "p.tsv", b"a\tb\nc\td\te\n");
        match ingest_parallel(ParallelSource::Tsv(&p), "spa", "aym", "x").unwrap_err() {
            CorpusError::Format { line, fields, .. } => {
                assert_eq!(line, 2);
                assert_eq!(fields, 3);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn tsv_blank_side_is_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "p.tsv", b"a\tb\nc\t\n\n");
        let got = ingest_parallel(ParallelSource::Tsv(&p), "spa", "aym", "x").unwrap();
        assert_eq!(got.records.len(), 1);
        assert_eq!(got.blank_skipped, 2);
    }

    #[test]
    fn same_language_pair_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "p.tsv", b"a\tb\n");
        assert!(ingest_parallel(ParallelSource::Tsv(&p), "spa", "spa", "x").is_err());
    }
}
