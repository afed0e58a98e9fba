use std::collections::HashMap;
use std::fmt::Write;

use super::{
    check_absorbing, check_label, content_lines, into_validation, parse_count, split_fields, Field,
    InputError,
};
use crate::table::TransitionCountTable;

/// Parses the generic count format, tabular or keyed.
pub fn parse_counts(text: &str) -> Result<TransitionCountTable, InputError> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let Some(&(first_no, first)) = lines.first() else {
        return Err(InputError::parse(1, 1, "no state rows found"));
    };
    let table = if first.contains(':') {
        parse_keyed(&lines)?
    } else if split_fields(first)[0].text.eq_ignore_ascii_case("state") {
        parse_tabular(&lines)?
    } else {
        return Err(InputError::parse(
            first_no,
            1,
            "expected a `state, ...` header or a `label: key=count, ...` row",
        ));
    };
    check_absorbing(&table)?;
    Ok(table)
}

fn parse_tabular(lines: &[(usize, &str)]) -> Result<TransitionCountTable, InputError> {
    let (header_no, header) = lines[0];
    let fields = split_fields(header);
    let mut dests: Vec<String> = Vec::new();
    let mut has_total = false;
    let mut saw_absorb = false;
    for f in &fields[1..] {
        if saw_absorb {
            if f.text.eq_ignore_ascii_case("n") && !has_total {
                has_total = true;
                continue;
            }
            return Err(InputError::parse(
                header_no,
                f.column,
                format!("unexpected column {:?} after `absorb`", f.text),
            ));
        }
        if f.text.eq_ignore_ascii_case("absorb") {
            saw_absorb = true;
        } else {
            let label = check_label(*f, header_no)?;
            if dests.contains(&label) {
                return Err(InputError::parse(
                    header_no,
                    f.column,
                    format!("destination {label:?} listed twice"),
                ));
            }
            dests.push(label);
        }
    }
    if !saw_absorb {
        return Err(InputError::parse(
            header_no,
            header.len().max(1),
            "header must end with an `absorb` column",
        ));
    }
    if dests.is_empty() {
        return Err(InputError::parse(header_no, 1, "header names no states"));
    }

    let k = dests.len();
    let width = 1 + k + 1 + usize::from(has_total);
    let mut rows: Vec<Option<(Vec<u64>, Option<u64>)>> = vec![None; k];
    for &(no, line) in &lines[1..] {
        let fields = split_fields(line);
        if fields.len() != width {
            let col = fields.get(width).map_or(line.len().max(1), |f| f.column);
            return Err(InputError::parse(
                no,
                col,
                format!("expected {width} fields, found {}", fields.len()),
            ));
        }
        let label = check_label(fields[0], no)?;
        let Some(i) = dests.iter().position(|d| *d == label) else {
            return Err(InputError::parse(
                no,
                fields[0].column,
                format!("state {label:?} is not named in the header"),
            ));
        };
        if rows[i].is_some() {
            return Err(InputError::parse(
                no,
                fields[0].column,
                format!("state {label:?} has more than one row"),
            ));
        }
        let counts = fields[1..=k + 1]
            .iter()
            .map(|f| parse_count(*f, no))
            .collect::<Result<Vec<_>, _>>()?;
        let total = if has_total {
            Some(parse_count(fields[k + 2], no)?)
        } else {
            None
        };
        rows[i] = Some((counts, total));
    }
    let missing: Vec<String> = dests
        .iter()
        .zip(&rows)
        .filter(|(_, r)| r.is_none())
        .map(|(d, _)| format!("state {d:?} has no row"))
        .collect();
    if !missing.is_empty() {
        return Err(InputError::Validation(missing));
    }
    build(dests, rows.into_iter().flatten().collect())
}

fn parse_keyed(lines: &[(usize, &str)]) -> Result<TransitionCountTable, InputError> {
    struct Row<'a> {
        line: usize,
        label: String,
        entries: Vec<(Field<'a>, u64)>,
        absorb: u64,
        total: Option<u64>,
    }

    let mut rows = Vec::new();
    for &(no, line) in lines {
        let Some(colon) = line.find(':') else {
            return Err(InputError::parse(no, 1, "expected `label: key=count, ...`"));
        };
        let label = check_label(
            Field {
                text: line[..colon].trim(),
                column: 1 + line.len() - line.trim_start().len(),
            },
            no,
        )?;
        let mut row = Row {
            line: no,
            label,
            entries: Vec::new(),
            absorb: 0,
            total: None,
        };
        let rest = &line[colon + 1..];
        let mut seen_keys: Vec<&str> = Vec::new();
        for f in split_fields(rest) {
            let f = Field {
                column: f.column + colon + 1,
                ..f
            };
            if f.text.is_empty() {
                continue;
            }
            let Some((key, value)) = f.text.split_once('=') else {
                return Err(InputError::parse(
                    no,
                    f.column,
                    format!("expected key=count, found {:?}", f.text),
                ));
            };
            let key = key.trim();
            if seen_keys.contains(&key) {
                return Err(InputError::parse(
                    no,
                    f.column,
                    format!("key {key:?} repeated"),
                ));
            }
            seen_keys.push(key);
            let vf = Field {
                text: value.trim(),
                column: f.column + f.text.find('=').unwrap_or(0) + 1,
            };
            let count = parse_count(vf, no)?;
            if key == "absorb" {
                row.absorb = count;
            } else if key == "n" {
                row.total = Some(count);
            } else if let Some(dest) = key.strip_prefix("to_") {
                row.entries.push((
                    Field {
                        text: dest,
                        column: f.column,
                    },
                    count,
                ));
            } else {
                return Err(InputError::parse(
                    no,
                    f.column,
                    format!("unknown key {key:?}; expected to_<state>, absorb or n"),
                ));
            }
        }
        rows.push(row);
    }

    let labels: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
    let index: HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    if index.len() != labels.len() {
        let dup = rows
            .iter()
            .enumerate()
            .find(|(i, r)| labels[..*i].contains(&r.label))
            .map(|(_, r)| r)
            .expect("duplicate exists");
        return Err(InputError::parse(
            dup.line,
            1,
            format!("state {:?} has more than one row", dup.label),
        ));
    }
    let k = labels.len();
    let mut out = Vec::with_capacity(k);
    for r in &rows {
        let mut counts = vec![0; k + 1];
        for (dest, count) in &r.entries {
            let Some(&j) = index.get(dest.text) else {
                return Err(InputError::parse(
                    r.line,
                    dest.column,
                    format!("unknown destination state {:?}", dest.text),
                ));
            };
            counts[j] = *count;
        }
        counts[k] = r.absorb;
        out.push((counts, r.total));
    }
    build(labels, out)
}

fn build(
    labels: Vec<String>,
    rows: Vec<(Vec<u64>, Option<u64>)>,
) -> Result<TransitionCountTable, InputError> {
    let (counts, totals): (Vec<Vec<u64>>, Vec<Option<u64>>) = rows.into_iter().unzip();
    let totals: Vec<u64> = counts
        .iter()
        .zip(&totals)
        .map(|(c, t)| t.unwrap_or_else(|| c.iter().sum()))
        .collect();
    TransitionCountTable::with_totals(labels, counts, &totals).map_err(into_validation)
}

/// Writes `table` in canonical tabular form.
pub fn emit_generic(table: &TransitionCountTable) -> String {
    let mut out = String::from("state");
    for l in table.labels() {
        write!(out, ", {l}").unwrap();
    }
    out.push_str(", absorb, n\n");
    for (i, l) in table.labels().iter().enumerate() {
        out.push_str(l);
        for c in table.row(i) {
            write!(out, ", {c}").unwrap();
        }
        writeln!(out, ", {}", table.total(i)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_two_state() {
        let t = parse_counts("A: to_A=5, to_B=3, absorb=2\nB: to_B=4, absorb=6\n").unwrap();
        assert_eq!(t.labels(), &["A".to_string(), "B".to_string()]);
        assert_eq!(t.total(0), 10);
        assert_eq!(t.row(0), &[5, 3, 2]);
        assert_eq!(t.row(1), &[0, 4, 6]);
    }

    #[test]
    fn tabular_with_comments_and_totals() {
        let text = "# demo\nstate, A, B, absorb, n\n\nB, 0, 4, 6, 10  # second\nA, 5, 3, 2, 10\n";
        let t = parse_counts(text).unwrap();
        assert_eq!(t.labels()[0], "A");
        assert_eq!(t.row(1), &[0, 4, 6]);
    }

    #[test]
    fn stated_total_mismatch_is_validation_error() {
        let err = parse_counts("A: to_A=5, absorb=2, n=9").unwrap_err();
        assert!(matches!(err, InputError::Validation(_)), "{err}");
        let err = parse_counts("state, A, absorb, n\nA, 5, 2, 8").unwrap_err();
        assert!(matches!(err, InputError::Validation(_)), "{err}");
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_counts("state, A, absorb\nA, x, 2").unwrap_err() {
            InputError::Parse { line, column, .. } => assert_eq!((line, column), (2, 4)),
            e => panic!("{e}"),
        }
        match parse_counts("A: to_A=5, to_Q=1, absorb=2").unwrap_err() {
            InputError::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!(line, 1);
                assert_eq!(column, 12);
                assert!(message.contains("Q"));
            }
            e => panic!("{e}"),
        }
        match parse_counts("\n\nstate, A, absorb\nA, 1").unwrap_err() {
            InputError::Parse { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
        assert!(matches!(
            parse_counts("# nothing\n"),
            Err(InputError::Parse { .. })
        ));
        assert!(matches!(
            parse_counts("hello, 1"),
            Err(InputError::Parse { .. })
        ));
        assert!(matches!(
            parse_counts("A: foo=1"),
            Err(InputError::Parse { .. })
        ));
        assert!(matches!(
            parse_counts("state, A, B\nA, 1, 1"),
            Err(InputError::Parse { .. })
        ));
    }

    #[test]
    fn duplicate_and_missing_rows() {
        assert!(parse_counts("A: absorb=1\nA: absorb=2").is_err());
        assert!(parse_counts("state, A, absorb\nA, 1, 1\nA, 1, 1").is_err());
        assert!(matches!(
            parse_counts("state, A, B, absorb\nA, 1, 1, 1"),
            Err(InputError::Validation(_))
        ));
    }

    #[test]
    fn non_absorbing_table_rejected() {
        let err = parse_counts("A: to_A=3, to_B=1\nB: to_A=2").unwrap_err();
        match err {
            InputError::Validation(p) => assert_eq!(p.len(), 2, "{p:?}"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn emit_is_canonical() {
        let text = "B: absorb=3\nA: to_B=1, absorb=1\n";
        let t = parse_counts(text).unwrap();
        let canon = emit_generic(&t);
        assert_eq!(
            canon,
            "state, B, A, absorb, n\nB, 0, 0, 3, 3\nA, 1, 0, 1, 2\n"
        );
        assert_eq!(emit_generic(&parse_counts(&canon).unwrap()), canon);
    }
}
