//! Reader and writer for SMART-style record files and relevance judgments.
//!
//! Records start at a `.I <id>` line. `.T` (title) and `.W` (body) sections
//! are collected into the record text; every other dot-letter section is
//! skipped. Qrels are whitespace-separated `query_id doc_id [code ...]`
//! lines; a judgment with a code below 1 is treated as not relevant.

use crate::error::{Error, Result};
use crate::ingest::{Collection, QrelSet, RawDocument, RawQuery};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Record {
    id: u32,
    title: String,
    body: String,
    start_line: usize,
}

impl Record {
    fn text(&self) -> String {
        match (self.title.is_empty(), self.body.is_empty()) {
            (true, true) => String::new(),
            (false, true) => self.title.clone(),
            (true, false) => self.body.clone(),
            (false, false) => format!("{} {}", self.title, self.body),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Title,
    Body,
    Skipped,
}

/// A marker is a line whose first two characters are '.' plus one uppercase
/// ASCII letter, optionally followed by whitespace and arguments.
fn marker_of(line: &str) -> Option<char> {
    let bytes = line.as_bytes();
    if bytes.len() < 2 || bytes[0] != b'.' || !bytes[1].is_ascii_uppercase() {
        return None;
    }
    if bytes.len() == 2 || bytes[2].is_ascii_whitespace() {
        Some(bytes[1] as char)
    } else {
        None
    }
}

fn parse_records(input: &str) -> Result<Vec<Record>> {
    let mut records: Vec<Record> = Vec::new();
    let mut current: Option<Record> = None;
    let mut section = Section::Skipped;

    for (idx, raw_line) in input.lines().enumerate() {
        let line_no = idx + 1;
        match marker_of(raw_line) {
            Some('I') => {
                if let Some(rec) = current.take() {
                    records.push(rec);
                }
                let rest = raw_line[2..].trim();
                let id: u32 = rest.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("record marker needs an integer id, got {rest:?}"),
                })?;
                if id == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "record ids must be positive".into(),
                    });
                }
                current = Some(Record {
                    id,
                    title: String::new(),
                    body: String::new(),
                    start_line: line_no,
                });
                section = Section::Skipped;
            }
            Some('T') => section = Section::Title,
            Some('W') => section = Section::Body,
            Some(_) => section = Section::Skipped,
            None => {
                let content = raw_line.trim();
                if content.is_empty() {
                    continue;
                }
                let Some(rec) = current.as_mut() else {
                    continue; // preamble text before the first record
                };
                let target = match section {
                    Section::Title => &mut rec.title,
                    Section::Body => &mut rec.body,
                    Section::Skipped => continue,
                };
                if !target.is_empty() {
                    target.push(' ');
                }
                target.push_str(content);
            }
        }
    }
    if let Some(rec) = current.take() {
        records.push(rec);
    }
    Ok(records)
}

pub fn parse_smart_docs(input: &str, collection: &Collection) -> Result<Vec<RawDocument>> {
    let records = parse_records(input)?;
    let mut docs = Vec::with_capacity(records.len());
    let mut seen = std::collections::HashSet::new();
    for rec in records {
        let text = rec.text();
        if text.is_empty() {
            return Err(Error::Parse {
                line: rec.start_line,
                message: format!("document {} has no title or body text", rec.id),
            });
        }
        if !seen.insert(rec.id) {
            return Err(Error::Parse {
                line: rec.start_line,
                message: format!("duplicate document id {}", rec.id),
            });
        }
        docs.push(RawDocument {
            id: rec.id,
            collection: collection.clone(),
            text,
        });
    }
    Ok(docs)
}

pub fn parse_smart_queries(input: &str, collection: &Collection) -> Result<Vec<RawQuery>> {
    let records = parse_records(input)?;
    let mut queries = Vec::with_capacity(records.len());
    let mut seen = std::collections::HashSet::new();
    for rec in records {
        let text = rec.text();
        if text.is_empty() {
            return Err(Error::Parse {
                line: rec.start_line,
                message: format!("query {} has no text", rec.id),
            });
        }
        if !seen.insert(rec.id) {
            return Err(Error::Parse {
                line: rec.start_line,
                message: format!("duplicate query id {}", rec.id),
            });
        }
        queries.push(RawQuery {
            id: rec.id,
            collection: collection.clone(),
            text,
        });
    }
    Ok(queries)
}

/// Serialize documents back to record form: one `.I` / `.W` pair each.
/// Parsing the output reproduces the input records exactly.
pub fn write_smart_docs(docs: &[RawDocument]) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str(&format!(".I {}\n.W\n{}\n", doc.id, doc.text));
    }
    out
}

pub fn parse_qrels(input: &str) -> Result<QrelSet> {
    let mut set = QrelSet::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                message: "expected at least a query id and a doc id".into(),
            });
        }
        let query_id: u32 = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("query id {:?} is not an integer", fields[0]),
        })?;
        let doc_id: u32 = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("doc id {:?} is not an integer", fields[1]),
        })?;
        let relevant = match fields.get(2) {
            None => true,
            Some(code) => {
                let value: f64 = code.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("relevance code {code:?} is not numeric"),
                })?;
                value >= 1.0
            }
        };
        if relevant {
            set.insert(query_id, doc_id);
        }
    }
    Ok(set)
}
