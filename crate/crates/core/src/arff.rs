//! WEKA-compatible ARFF subset: `@relation`, nominal and numeric
//! `@attribute` declarations, `%` comments, `?` missing cells and
//! single-quoted tokens. Keywords are case-insensitive; attribute names and
//! nominal values are case-sensitive. Input accepts LF or CRLF; output is
//! always LF. Sparse, date, string and relational attributes are out of
//! scope.
//!
//! Parsing is all-or-nothing: any error leaves no partial dataset behind,
//! and `parse(write(d)) == d` for every dataset that passes validation.

use crate::dataset::{Attribute, AttributeKind, Cell, Dataset, Instance};
use crate::error::{Error, Result};

/// Parses ARFF text into a dataset. The last attribute becomes the class
/// attribute; use [`Dataset::set_class_index`] to override.
pub fn parse(text: &str) -> Result<Dataset> {
    let mut relation: Option<String> = None;
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut instances: Vec<Instance> = Vec::new();
    let mut in_data = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let lower = line.to_ascii_lowercase();
            let keyword = |k: &str| {
                lower.starts_with(k)
                    && line[k.len()..].chars().next().map_or(true, char::is_whitespace)
            };
            if keyword("@relation") {
                if relation.is_some() {
                    return Err(syntax(line_no, "duplicate @relation"));
                }
                if !attributes.is_empty() {
                    return Err(syntax(line_no, "@relation must precede @attribute"));
                }
                let rest = line["@relation".len()..].trim();
                let (name, tail) = take_token(rest, line_no)?;
                if !tail.trim().is_empty() {
                    return Err(syntax(line_no, "unexpected text after relation name"));
                }
                relation = Some(name);
            } else if keyword("@attribute") {
                if relation.is_none() {
                    return Err(syntax(line_no, "@attribute before @relation"));
                }
                let rest = line["@attribute".len()..].trim();
                attributes.push(parse_attribute(rest, line_no)?);
            } else if lower == "@data" {
                if relation.is_none() || attributes.is_empty() {
                    return Err(syntax(line_no, "@data before header is complete"));
                }
                in_data = true;
            } else {
                return Err(syntax(line_no, &format!("unrecognized line '{line}'")));
            }
        } else {
            if line.starts_with('{') {
                return Err(syntax(line_no, "sparse ARFF rows are not supported"));
            }
            instances.push(parse_row(line, &attributes, line_no)?);
        }
    }

    let relation = relation.ok_or_else(|| syntax(text.lines().count() + 1, "missing @relation"))?;
    if !in_data {
        return Err(syntax(text.lines().count() + 1, "missing @data section"));
    }
    Dataset::new(relation, attributes, instances)
}

fn syntax(line: usize, message: &str) -> Error {
    Error::ArffSyntax {
        line,
        message: message.to_string(),
    }
}

/// Reads one possibly-quoted token; returns (token, rest-of-line).
fn take_token(s: &str, line_no: usize) -> Result<(String, &str)> {
    let s = s.trim_start();
    if let Some(stripped) = s.strip_prefix('\'') {
        match stripped.find('\'') {
            Some(end) => Ok((stripped[..end].to_string(), &stripped[end + 1..])),
            None => Err(syntax(line_no, "unterminated quoted token")),
        }
    } else {
        let end = s
            .find(|c: char| c.is_whitespace())
            .unwrap_or(s.len());
        if end == 0 {
            return Err(syntax(line_no, "expected a token"));
        }
        Ok((s[..end].to_string(), &s[end..]))
    }
}

fn parse_attribute(rest: &str, line_no: usize) -> Result<Attribute> {
    let (name, tail) = take_token(rest, line_no)?;
    let spec = tail.trim();
    if spec.is_empty() {
        return Err(syntax(line_no, "attribute declaration is missing its type"));
    }
    if let Some(body) = spec.strip_prefix('{') {
        let body = body
            .strip_suffix('}')
            .ok_or_else(|| syntax(line_no, "unterminated nominal value list"))?;
        let values = split_csv(body, line_no)?;
        if values.is_empty() {
            return Err(syntax(line_no, "nominal attribute declares no values"));
        }
        Ok(Attribute {
            name,
            kind: AttributeKind::Nominal(values.into_iter().map(|v| v.text).collect()),
        })
    } else {
        match spec.to_ascii_lowercase().as_str() {
            "numeric" | "real" | "integer" => Ok(Attribute::numeric(name)),
            other => Err(syntax(
                line_no,
                &format!("unsupported attribute type '{other}'"),
            )),
        }
    }
}

struct Token {
    text: String,
    quoted: bool,
}

/// Splits a comma-separated list, honoring single quotes. Unquoted tokens
/// are trimmed; quoted tokens are taken verbatim.
fn split_csv(s: &str, line_no: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut field = String::new();
    let mut quoted = false;
    let mut chars = s.chars().peekable();

    loop {
        // leading whitespace before a field
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        if chars.peek() == Some(&'\'') {
            chars.next();
            quoted = true;
            let mut closed = false;
            for c in chars.by_ref() {
                if c == '\'' {
                    closed = true;
                    break;
                }
                field.push(c);
            }
            if !closed {
                return Err(syntax(line_no, "unterminated quoted value"));
            }
            // consume whitespace up to the next comma or end
            while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
                chars.next();
            }
            match chars.next() {
                None => {
                    out.push(Token {
                        text: std::mem::take(&mut field),
                        quoted,
                    });
                    break;
                }
                Some(',') => {
                    out.push(Token {
                        text: std::mem::take(&mut field),
                        quoted,
                    });
                    quoted = false;
                }
                Some(c) => {
                    return Err(syntax(
                        line_no,
                        &format!("unexpected '{c}' after quoted value"),
                    ))
                }
            }
        } else {
            let mut done = false;
            loop {
                match chars.next() {
                    None => {
                        done = true;
                        break;
                    }
                    Some(',') => break,
                    Some(c) => field.push(c),
                }
            }
            out.push(Token {
                text: field.trim().to_string(),
                quoted,
            });
            field.clear();
            quoted = false;
            if done {
                break;
            }
        }
    }
    // a fully empty list means "no fields", not one empty field
    if out.len() == 1 && out[0].text.is_empty() && !out[0].quoted {
        out.clear();
    }
    Ok(out)
}

fn parse_row(line: &str, attributes: &[Attribute], line_no: usize) -> Result<Instance> {
    let tokens = split_csv(line, line_no)?;
    if tokens.len() != attributes.len() {
        return Err(Error::RowArity {
            line: line_no,
            expected: attributes.len(),
            found: tokens.len(),
        });
    }
    let mut cells = Vec::with_capacity(tokens.len());
    for (token, attr) in tokens.iter().zip(attributes) {
        if !token.quoted && token.text == "?" {
            cells.push(Cell::Missing);
            continue;
        }
        match &attr.kind {
            AttributeKind::Nominal(_) => match attr.value_index(&token.text) {
                Some(v) => cells.push(Cell::Nominal(v)),
                None => {
                    return Err(Error::UndeclaredValue {
                        line: line_no,
                        attribute: attr.name.clone(),
                        value: token.text.clone(),
                    })
                }
            },
            AttributeKind::Numeric => match token.text.parse::<f64>() {
                Ok(x) if x.is_finite() => cells.push(Cell::Number(x)),
                _ => {
                    return Err(syntax(
                        line_no,
                        &format!(
                            "'{}' is not a finite number for attribute '{}'",
                            token.text, attr.name
                        ),
                    ))
                }
            },
        }
    }
    Ok(Instance::new(cells))
}

/// Serializes a dataset; the output re-parses to an equal dataset.
pub fn write(d: &Dataset) -> String {
    let mut out = String::new();
    out.push_str("@relation ");
    out.push_str(&quote(&d.relation));
    out.push('\n');
    for a in &d.attributes {
        out.push_str("@attribute ");
        out.push_str(&quote(&a.name));
        match &a.kind {
            AttributeKind::Numeric => out.push_str(" numeric"),
            AttributeKind::Nominal(values) => {
                out.push_str(" {");
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&quote(v));
                }
                out.push('}');
            }
        }
        out.push('\n');
    }
    out.push_str("@data\n");
    for inst in &d.instances {
        for (i, cell) in inst.cells.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            match cell {
                Cell::Missing => out.push('?'),
                Cell::Number(x) => out.push_str(&format!("{x}")),
                Cell::Nominal(v) => {
                    let label = &d.attributes[i].values().expect("nominal cell")[*v];
                    out.push_str(&quote(label));
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Quotes a token when the bare form would not survive re-parsing.
fn quote(s: &str) -> String {
    let needs = s.is_empty()
        || s == "?"
        || s.starts_with('{')
        || s.starts_with('%')
        || s.chars().any(|c| c.is_whitespace() || c == ',' || c == '}');
    if needs {
        format!("'{s}'")
    } else {
        s.to_string()
    }
}
