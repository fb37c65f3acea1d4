/// A data line of a tab-separated file, with its 1-based line number.
pub(crate) struct Row<'a> {
    pub line: usize,
    pub fields: Vec<&'a str>,
}

/// Splits `source` into a header row and data rows, skipping blank lines and
/// `#` comments. Returns `None` for the header when the file has no data lines.
pub(crate) fn rows(source: &str) -> (Option<Row<'_>>, Vec<Row<'_>>) {
    let mut header = None;
    let mut body = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let row = Row {
            line: idx + 1,
            fields: line.split('\t').collect(),
        };
        if header.is_none() {
            header = Some(row);
        } else {
            body.push(row);
        }
    }
    (header, body)
}

pub(crate) fn header_matches(row: &Row<'_>, expected: &[&str]) -> bool {
    row.fields.len() == expected.len()
        && row
            .fields
            .iter()
            .zip(expected)
            .all(|(a, b)| a.trim().eq_ignore_ascii_case(b))
}
