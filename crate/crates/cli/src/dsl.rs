//! Text forms for shapes and functions.
//!
//! ```text
//! shape    := interval:a=<x>,b=<x>
//!           | ball:n=<k>,r=<x>,c=<x>,<x>,...
//!           | box:lo=<x>,...;hi=<x>,...
//!           | boxunion:<box>|<box>|...        (each <box> with or without "box:")
//! function := tent:n=<k>[,res=<x>]
//!           | bump:n=<k>,r=<x>[,res=<x>]
//!           | cutoff:shape=<shape>,eps=<x>[,res=<x>]
//!           | file:<path>  or a bare path to a grid file
//! ```
//!
//! Fields are separated by `,` or `;`. A field without `=` continues the
//! list value of the field before it, so `c=0,0` is one two-entry field.
//! `res` is cells per unit length for `tent` and `bump` and cells per
//! `eps` for `cutoff`.

use std::fmt;
use std::path::Path;

use fracap_core::besov::{build_cutoff, bump, tent, SampledFunction, MIN_CELLS_PER_EPS};
use fracap_core::{AxisBox, Shape};

/// A rejected DSL string; `position` is a byte offset into `input`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub input: String,
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(input: &str, position: usize, message: impl Into<String>) -> Self {
        ParseError { input: input.to_owned(), position: position.min(input.len()), message: message.into() }
    }

    /// 1-based character column of the error.
    pub fn column(&self) -> usize {
        self.input[..self.position].chars().count() + 1
    }

    /// The message with the input and a caret under the offending column.
    pub fn annotated(&self) -> String {
        format!("{self}\n  {}\n  {}^", self.input, " ".repeat(self.column() - 1))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.column(), self.message)
    }
}

impl std::error::Error for ParseError {}

type Parsed<T> = Result<T, ParseError>;

struct Field {
    key: String,
    at: usize,
    values: Vec<(String, usize)>,
}

/// Key-value fields of `full[start..end]`.
struct Fields<'a> {
    full: &'a str,
    start: usize,
    kind: &'static str,
    fields: Vec<Field>,
}

impl<'a> Fields<'a> {
    fn parse(full: &'a str, start: usize, end: usize, kind: &'static str, allowed: &[&str]) -> Parsed<Self> {
        let body = &full[start..end];
        let mut fields: Vec<Field> = Vec::new();
        if !body.trim().is_empty() {
            let mut offset = start;
            for token in body.split([',', ';']) {
                let at = offset + (token.len() - token.trim_start().len());
                offset += token.len() + 1;
                let token = token.trim();
                if token.is_empty() {
                    return Err(ParseError::new(full, at, "empty field"));
                }
                match token.split_once('=') {
                    Some((k, v)) => {
                        let k = k.trim();
                        if !allowed.contains(&k) {
                            return Err(ParseError::new(
                                full,
                                at,
                                format!("unknown key '{k}' for {kind} (expected {})", allowed.join(", ")),
                            ));
                        }
                        if fields.iter().any(|f| f.key == k) {
                            return Err(ParseError::new(full, at, format!("duplicate key '{k}'")));
                        }
                        let vat = at + token.find('=').unwrap() + 1;
                        fields.push(Field { key: k.to_owned(), at, values: vec![(v.trim().to_owned(), vat)] });
                    }
                    None => match fields.last_mut() {
                        Some(f) => f.values.push((token.to_owned(), at)),
                        None => return Err(ParseError::new(full, at, format!("expected key=value, found '{token}'"))),
                    },
                }
            }
        }
        Ok(Fields { full, start, kind, fields })
    }

    fn get(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.key == key)
    }

    fn missing(&self, key: &str) -> ParseError {
        ParseError::new(self.full, self.start, format!("{} needs '{key}='", self.kind))
    }

    fn number(&self, (text, at): &(String, usize)) -> Parsed<f64> {
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseError::new(self.full, *at, format!("expected a number, found '{text}'"))),
        }
    }

    fn scalar(&self, key: &str) -> Parsed<Option<f64>> {
        let Some(f) = self.get(key) else { return Ok(None) };
        if f.values.len() != 1 {
            return Err(ParseError::new(self.full, f.at, format!("'{key}' takes a single number")));
        }
        self.number(&f.values[0]).map(Some)
    }

    fn required(&self, key: &str) -> Parsed<f64> {
        self.scalar(key)?.ok_or_else(|| self.missing(key))
    }

    fn list(&self, key: &str) -> Parsed<Option<Vec<f64>>> {
        let Some(f) = self.get(key) else { return Ok(None) };
        f.values.iter().map(|v| self.number(v)).collect::<Parsed<Vec<_>>>().map(Some)
    }

    fn dimension(&self, key: &str) -> Parsed<Option<usize>> {
        let Some(f) = self.get(key) else { return Ok(None) };
        match f.values.as_slice() {
            [(text, at)] => match text.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Some(n)),
                _ => Err(ParseError::new(self.full, *at, format!("expected a positive integer, found '{text}'"))),
            },
            _ => Err(ParseError::new(self.full, f.at, format!("'{key}' takes a single integer"))),
        }
    }

    fn at(&self, key: &str) -> usize {
        self.get(key).map_or(self.start, |f| f.at)
    }
}

fn split_kind(full: &str, start: usize, end: usize) -> Parsed<(&str, usize)> {
    let text = &full[start..end];
    match text.find(':') {
        Some(i) => Ok((text[..i].trim(), start + i + 1)),
        None => Err(ParseError::new(full, start, "expected '<kind>:<fields>'")),
    }
}

fn core_error(full: &str, at: usize, e: fracap_core::Error) -> ParseError {
    let msg = match e {
        fracap_core::Error::InvalidArgument(m) | fracap_core::Error::Unsupported(m) => m,
        other => other.to_string(),
    };
    ParseError::new(full, at, msg)
}

fn box_fields(full: &str, start: usize, end: usize) -> Parsed<AxisBox> {
    let f = Fields::parse(full, start, end, "box", &["lo", "hi"])?;
    let lo = f.list("lo")?.ok_or_else(|| f.missing("lo"))?;
    let hi = f.list("hi")?.ok_or_else(|| f.missing("hi"))?;
    if lo.len() != hi.len() {
        return Err(ParseError::new(full, f.at("hi"), format!("lo has {} entries but hi has {}", lo.len(), hi.len())));
    }
    AxisBox::new(lo, hi).map_err(|e| core_error(full, start, e))
}

fn shape_at(full: &str, start: usize, end: usize) -> Parsed<Shape> {
    let (kind, body) = split_kind(full, start, end)?;
    let built = match kind {
        "interval" => {
            let f = Fields::parse(full, body, end, "interval", &["a", "b"])?;
            Shape::interval(f.required("a")?, f.required("b")?)
        }
        "ball" => {
            let f = Fields::parse(full, body, end, "ball", &["n", "r", "c"])?;
            let r = f.scalar("r")?.unwrap_or(1.0);
            let c = match (f.dimension("n")?, f.list("c")?) {
                (Some(n), Some(c)) if c.len() != n => {
                    return Err(ParseError::new(full, f.at("c"), format!("centre has {} entries but n = {n}", c.len())))
                }
                (_, Some(c)) => c,
                (Some(n), None) => vec![0.0; n],
                (None, None) => return Err(ParseError::new(full, body, "ball needs 'n=' or 'c='")),
            };
            Shape::ball(c, r)
        }
        "box" => {
            let b = box_fields(full, body, end)?;
            Shape::axis_box(b.lo().to_vec(), b.hi().to_vec())
        }
        "boxunion" => {
            let mut boxes = Vec::new();
            let mut offset = body;
            for part in full[body..end].split('|') {
                let (s, e) = (offset, offset + part.len());
                offset = e + 1;
                let trimmed = part.trim_start();
                let s = s + (part.len() - trimmed.len());
                let s = if trimmed.starts_with("box:") { s + 4 } else { s };
                boxes.push(box_fields(full, s, e)?);
            }
            Shape::box_union(boxes)
        }
        "" => return Err(ParseError::new(full, start, "missing shape kind")),
        other => {
            return Err(ParseError::new(
                full,
                start,
                format!("unknown shape kind '{other}' (expected interval, ball, box, boxunion)"),
            ))
        }
    };
    built.map_err(|e| core_error(full, start, e))
}

/// Parses a shape such as `ball:n=2,r=1,c=0,0`.
pub fn parse_shape(input: &str) -> Parsed<Shape> {
    shape_at(input, 0, input.len())
}

/// Default resolution, in cells across the support, of `tent` and `bump`.
fn default_cells(n: usize) -> f64 {
    match n {
        1 => 2048.0,
        2 => 64.0,
        _ => 16.0,
    }
}

fn resolution(f: &Fields, default: f64) -> Parsed<f64> {
    match f.scalar("res")? {
        Some(r) if r > 0.0 => Ok(r),
        Some(_) => Err(ParseError::new(f.full, f.at("res"), "res must be positive")),
        None => Ok(default),
    }
}

fn read_grid(full: &str, at: usize, path: &str) -> Parsed<SampledFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::new(full, at, format!("cannot read grid file '{path}': {e}")))?;
    let f = SampledFunction::parse_grid(&text).map_err(|e| core_error(full, at, e))?;
    Ok(f.with_label(format!("file:{path}")))
}

/// Parses a function such as `cutoff:shape=box:lo=0,0;hi=1,1,eps=0.1`.
pub fn parse_function(input: &str) -> Parsed<SampledFunction> {
    let end = input.len();
    let Some(colon) = input.find(':') else {
        if Path::new(input.trim()).is_file() {
            return read_grid(input, 0, input.trim());
        }
        return Err(ParseError::new(input, 0, "expected '<kind>:<fields>' or the path of a grid file"));
    };
    let body = colon + 1;
    let built = match input[..colon].trim() {
        "tent" => {
            let f = Fields::parse(input, body, end, "tent", &["n", "res"])?;
            let n = f.dimension("n")?.ok_or_else(|| f.missing("n"))?;
            tent(n, resolution(&f, default_cells(n) / 2.0)?)
        }
        "bump" => {
            let f = Fields::parse(input, body, end, "bump", &["n", "r", "res"])?;
            let n = f.dimension("n")?.ok_or_else(|| f.missing("n"))?;
            let r = f.scalar("r")?.unwrap_or(1.0);
            bump(n, r, resolution(&f, default_cells(n) / (2.0 * r.abs().max(f64::MIN_POSITIVE)))?)
        }
        "cutoff" => {
            let text = &input[body..];
            if !text.starts_with("shape=") {
                return Err(ParseError::new(input, body, "cutoff needs 'shape=<shape>' first"));
            }
            let Some(k) = text.rfind(",eps=") else {
                return Err(ParseError::new(input, end, "cutoff needs ',eps=' after the shape"));
            };
            let shape = shape_at(input, body + 6, body + k)?;
            let f = Fields::parse(input, body + k + 1, end, "cutoff", &["eps", "res"])?;
            build_cutoff(&shape, f.required("eps")?, resolution(&f, MIN_CELLS_PER_EPS)?)
        }
        "file" | "grid" => return read_grid(input, body, input[body..].trim()),
        other => {
            if Path::new(input.trim()).is_file() {
                return read_grid(input, 0, input.trim());
            }
            return Err(ParseError::new(
                input,
                0,
                format!("unknown function kind '{other}' (expected tent, bump, cutoff, file)"),
            ));
        }
    };
    built.map_err(|e| core_error(input, 0, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_parse() {
        let s = parse_shape("interval:a=-1,b=1").unwrap();
        assert_eq!(s.exact_volume(), Some(2.0));
        let b = parse_shape("ball:n=2,r=1,c=0,0").unwrap();
        assert_eq!(b.dim(), 2);
        let b = parse_shape("ball:c=1,2,3").unwrap();
        assert_eq!(b.dim(), 3);
        let r = parse_shape("box:lo=0,0;hi=1,2").unwrap();
        assert_eq!(r.exact_volume(), Some(2.0));
        let u = parse_shape("boxunion:box:lo=0,0;hi=2,1|lo=0,1;hi=1,2").unwrap();
        assert_eq!(u.exact_volume(), Some(3.0));
    }

    #[test]
    fn errors_point_at_the_offending_text() {
        let e = parse_shape("ball:n=2,r=x").unwrap_err();
        assert_eq!(e.position, 11);
        assert!(e.message.contains("number"));
        let e = parse_shape("box:lo=0,0;hi=1").unwrap_err();
        assert_eq!(&e.input[e.position..], "hi=1");
        let e = parse_shape("ellipse:a=1").unwrap_err();
        assert_eq!(e.position, 0);
        let e = parse_shape("interval:a=0,c=1").unwrap_err();
        assert_eq!(&e.input[e.position..], "c=1");
        let e = parse_shape("interval:a=2,b=1").unwrap_err();
        assert_eq!(e.position, 0);
        let e = parse_shape("boxunion:lo=0;hi=1|lo=2;hi=q").unwrap_err();
        assert_eq!(&e.input[e.position..], "q");
        assert!(e.annotated().ends_with(&format!("{}^", " ".repeat(e.column() - 1))));
    }

    #[test]
    fn functions_parse() {
        let f = parse_function("tent:n=1").unwrap();
        assert_eq!(f.extents(), tent(1, 1024.0).unwrap().extents());
        let f = parse_function("tent:n=2,res=8").unwrap();
        assert_eq!(f.values(), tent(2, 8.0).unwrap().values());
        let f = parse_function("bump:n=2,r=2").unwrap();
        assert_eq!(f.dim(), 2);
        let f = parse_function("cutoff:shape=ball:n=2,r=1,c=0,0,eps=0.25").unwrap();
        assert!((f.max_abs() - 1.0).abs() < 1e-12);
        let f = parse_function("cutoff:shape=box:lo=0,0;hi=1,1,eps=0.5,res=10").unwrap();
        assert_eq!(f.spacing()[0], 0.05);
    }

    #[test]
    fn function_errors() {
        let e = parse_function("cutoff:shape=ball:n=2,r=?,eps=0.1").unwrap_err();
        assert_eq!(&e.input[e.position..], "?,eps=0.1");
        assert!(parse_function("cutoff:shape=ball:n=2").unwrap_err().message.contains("eps"));
        assert!(parse_function("wave:n=1").is_err());
        assert!(parse_function("tent:n=0").is_err());
        assert!(parse_function("file:/nonexistent/grid.txt").unwrap_err().message.contains("cannot read"));
    }
}
