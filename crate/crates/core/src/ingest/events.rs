use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One raw interaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub session_id: String,
    pub item_id: String,
    pub timestamp: i64,
}

/// A column selected by header name or by zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Name(String),
    Index(usize),
}

impl Column {
    /// Numeric strings select by position, anything else by header name.
    pub fn parse(s: &str) -> Column {
        match s.trim().parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.trim().to_string()),
        }
    }

    fn resolve(&self, header: &[&str]) -> Result<usize> {
        match self {
            Column::Index(i) if *i < header.len() => Ok(*i),
            Column::Index(i) => Err(Error::MissingColumn(format!("#{i}"))),
            Column::Name(name) => header
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::MissingColumn(name.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub session: Column,
    pub item: Column,
    pub timestamp: Column,
}

impl ColumnMapping {
    pub fn by_name(session: &str, item: &str, timestamp: &str) -> Self {
        ColumnMapping {
            session: Column::Name(session.into()),
            item: Column::Name(item.into()),
            timestamp: Column::Name(timestamp.into()),
        }
    }

    pub fn by_index(session: usize, item: usize, timestamp: usize) -> Self {
        ColumnMapping {
            session: Column::Index(session),
            item: Column::Index(item),
            timestamp: Column::Index(timestamp),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    /// One-based line number in the input, header included.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedEvents {
    pub events: Vec<Event>,
    pub errors: Vec<RowError>,
}

/// Parses tab-separated text with a header row.
///
/// A mapped column missing from the header is fatal. Rows that cannot be
/// parsed are skipped and reported in [`ParsedEvents::errors`].
pub fn parse_events<R: BufRead>(input: R, mapping: &ColumnMapping) -> Result<ParsedEvents> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::Data("input has no header row".into())),
    };
    let header = header.strip_suffix('\r').unwrap_or(&header).to_string();
    let columns: Vec<&str> = header.split('\t').collect();
    let session_col = mapping.session.resolve(&columns)?;
    let item_col = mapping.item.resolve(&columns)?;
    let time_col = mapping.timestamp.resolve(&columns)?;
    let width = session_col.max(item_col).max(time_col) + 1;

    let mut out = ParsedEvents::default();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < width {
            out.errors.push(RowError {
                line: line_no,
                reason: format!("expected at least {width} fields, found {}", fields.len()),
            });
            continue;
        }
        let session_id = fields[session_col].trim();
        let item_id = fields[item_col].trim();
        let raw_time = fields[time_col].trim();
        let timestamp = match raw_time.parse::<i64>() {
            Ok(t) if t >= 0 => t,
            Ok(t) => {
                out.errors.push(RowError {
                    line: line_no,
                    reason: format!("negative timestamp {t}"),
                });
                continue;
            }
            Err(_) => {
                out.errors.push(RowError {
                    line: line_no,
                    reason: format!("unparsable timestamp {raw_time:?}"),
                });
                continue;
            }
        };
        if session_id.is_empty() || item_id.is_empty() {
            out.errors.push(RowError {
                line: line_no,
                reason: "empty session or item id".into(),
            });
            continue;
        }
        out.events.push(Event {
            session_id: session_id.to_string(),
            item_id: item_id.to_string(),
            timestamp,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maps_fields_by_index() {
        let input = "s\ti\tt\ns1\titemA\t100\n";
        let parsed = parse_events(input.as_bytes(), &ColumnMapping::by_index(0, 1, 2)).unwrap();
        assert_eq!(
            parsed.events,
            vec![Event {
                session_id: "s1".into(),
                item_id: "itemA".into(),
                timestamp: 100
            }]
        );
        assert!(parsed.errors.is_empty());
    }

    #[test]
    fn bad_timestamp_skips_row() {
        let input = "s\ti\tt\ns1\titemA\tabc\ns1\titemB\t5\n";
        let parsed = parse_events(input.as_bytes(), &ColumnMapping::by_index(0, 1, 2)).unwrap();
        assert_eq!(parsed.events.len(), 1);
        assert_eq!(parsed.errors.len(), 1);
        assert_eq!(parsed.errors[0].line, 2);
    }

    #[test]
    fn header_only_is_empty() {
        let parsed = parse_events(
            "session\titem\tts\n".as_bytes(),
            &ColumnMapping::by_name("session", "item", "ts"),
        )
        .unwrap();
        assert!(parsed.events.is_empty());
        assert!(parsed.errors.is_empty());
    }

    #[test]
    fn missing_column_is_fatal() {
        let err = parse_events(
            "session\titem\n".as_bytes(),
            &ColumnMapping::by_name("session", "item", "ts"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "ts"));
    }

    #[test]
    fn columns_resolve_by_name_in_any_order() {
        let input = "ts\titem\tsession\n7\tx\tu\n";
        let parsed = parse_events(
            input.as_bytes(),
            &ColumnMapping::by_name("session", "item", "ts"),
        )
        .unwrap();
        assert_eq!(parsed.events[0].session_id, "u");
        assert_eq!(parsed.events[0].timestamp, 7);
    }

    #[test]
    fn negative_timestamp_rejected() {
        let parsed = parse_events(
            "a\tb\tc\ns\ti\t-1\n".as_bytes(),
            &ColumnMapping::by_index(0, 1, 2),
        )
        .unwrap();
        assert!(parsed.events.is_empty());
        assert_eq!(parsed.errors.len(), 1);
    }
}
