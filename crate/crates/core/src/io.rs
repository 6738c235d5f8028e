//! Set files: UTF-8 text with one decimal integer per line, or a JSON array.
//!
//! Input order is arbitrary and duplicates are tolerated; [`ParsedSet`]
//! reports how many were dropped. Blank lines are skipped.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::intset::IntSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetFormat {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedSet {
    pub set: IntSet,
    pub duplicates: usize,
}

/// Parses either format; input whose first non-blank character is `[` is JSON.
pub fn parse_set(input: &str) -> Result<ParsedSet> {
    let values = if input.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<i64>>(input)?
    } else {
        parse_lines(input)?
    };
    let total = values.len();
    let set = IntSet::from_vec(values);
    Ok(ParsedSet {
        duplicates: total - set.len(),
        set,
    })
}

fn parse_lines(input: &str) -> Result<Vec<i64>> {
    input
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let t = l.trim();
            t.parse::<i64>().map_err(|_| Error::Parse {
                line: i + 1,
                content: t.to_string(),
            })
        })
        .collect()
}

pub fn read_set<R: Read>(mut reader: R) -> Result<ParsedSet> {
    let mut buf = String::new();
    reader.read_to_string(&mut buf)?;
    parse_set(&buf)
}

pub fn read_set_file(path: impl AsRef<Path>) -> Result<ParsedSet> {
    read_set(std::fs::File::open(path)?)
}

pub fn write_set<W: Write>(mut writer: W, set: &IntSet, format: SetFormat) -> Result<()> {
    match format {
        SetFormat::Text => {
            for x in set {
                writeln!(writer, "{x}")?;
            }
        }
        SetFormat::Json => {
            serde_json::to_writer(&mut writer, set)?;
            writeln!(writer)?;
        }
    }
    Ok(())
}

pub fn write_set_file(path: impl AsRef<Path>, set: &IntSet, format: SetFormat) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_set(file, set, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_with_duplicates_and_blanks() {
        let p = parse_set("5\n-3\n\n  5 \n12\n").unwrap();
        assert_eq!(p.set, IntSet::from([-3, 5, 12]));
        assert_eq!(p.duplicates, 1);
    }

    #[test]
    fn json_array() {
        let p = parse_set(" [3, 1, 3, -2]").unwrap();
        assert_eq!(p.set, IntSet::from([-2, 1, 3]));
        assert_eq!(p.duplicates, 1);
    }

    #[test]
    fn bad_line_is_reported_with_its_number() {
        match parse_set("1\n2\nx7\n") {
            Err(Error::Parse { line, content }) => assert_eq!((line, content.as_str()), (3, "x7")),
            other => panic!("{other:?}"),
        }
        assert!(parse_set("[1, 2.5]").is_err());
    }

    #[test]
    fn round_trip_both_formats() {
        let s = IntSet::from([-10, 0, 7, 1 << 40]);
        for format in [SetFormat::Text, SetFormat::Json] {
            let mut buf = Vec::new();
            write_set(&mut buf, &s, format).unwrap();
            let back = parse_set(std::str::from_utf8(&buf).unwrap()).unwrap();
            assert_eq!(back.set, s);
            assert_eq!(back.duplicates, 0);
        }
    }
}
