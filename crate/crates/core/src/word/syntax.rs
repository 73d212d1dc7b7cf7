//! Text syntax for words.
//!
//! A word is a whitespace-separated sequence of tokens:
//!
//! * `v.x` is the element labelled `x` (or with index `x`) of the group at
//!   vertex `v`. Labels containing spaces are written as they print, e.g.
//!   `v1.(0 1 2)`, since whitespace inside parentheses does not split tokens.
//! * `e` and `e^-1` are the edge letter `e` and its inverse.
//! * Any token may carry an integer exponent `^k`.
//! * `1` is the identity.
//!
//! [`parse_word`] reads tokens as generators of the fundamental group at the
//! base: `v.x` is `x` transported to the base along the spanning tree and
//! `e` is the loop through the tree that crosses `e` once. For a closed path
//! printed by [`format_word`] this agrees with reading the tokens as a path,
//! so printed normal forms parse back to the same element.
//!
//! [`parse_path`] reads tokens strictly as a path from a given vertex.

use super::{Dir, FundamentalGroup, PathWord, Step, WordError};

/// Splits on whitespace outside parentheses.
fn tokens(text: &str) -> Result<Vec<&str>, WordError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(WordError::Syntax(format!("unbalanced ')' in {text:?}")));
                }
            }
            _ => {}
        }
        if ch.is_whitespace() && depth == 0 {
            if let Some(s) = start.take() {
                out.push(&text[s..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if depth != 0 {
        return Err(WordError::Syntax(format!("unbalanced '(' in {text:?}")));
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    Ok(out)
}

/// Splits a comma-separated list at parenthesis depth zero.
fn split_list(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}

enum Token {
    Element { vertex: usize, elem: usize },
    Edge { edge: usize },
    One,
}

/// Splits a trailing `^k` that sits outside parentheses.
fn split_exponent(tok: &str) -> Option<(&str, i64)> {
    let caret = tok.rfind('^')?;
    if tok[caret..].contains(')') {
        return None;
    }
    let k = tok[caret + 1..].parse::<i64>().ok()?;
    Some((&tok[..caret], k))
}

fn lookup_element(fg: &FundamentalGroup, v: usize, label: &str) -> Option<usize> {
    let g = fg.gog().vertex_group(v);
    g.find_element(label).or_else(|| {
        let inner = label.strip_prefix('(')?.strip_suffix(')')?;
        g.find_element(inner)
    })
}

fn resolve(fg: &FundamentalGroup, tok: &str) -> Option<Token> {
    if tok == "1" {
        return Some(Token::One);
    }
    let gog = fg.gog();
    if let Some((v, label)) = tok.split_once('.') {
        let vertex = gog.find_vertex(v)?;
        let elem = lookup_element(fg, vertex, label)?;
        return Some(Token::Element { vertex, elem });
    }
    gog.find_edge(tok).map(|edge| Token::Edge { edge })
}

/// Resolves a token, trying it whole first so labels such as `c3^2` work.
fn resolve_with_exponent(fg: &FundamentalGroup, tok: &str) -> Result<(Token, i64), WordError> {
    if let Some(t) = resolve(fg, tok) {
        return Ok((t, 1));
    }
    if let Some((body, k)) = split_exponent(tok) {
        if let Some(t) = resolve(fg, body) {
            return Ok((t, k));
        }
    }
    Err(WordError::Syntax(format!("unknown symbol {tok:?}")))
}

/// Parses a product of generators into a closed word at the base vertex.
pub fn parse_word(fg: &FundamentalGroup, text: &str) -> Result<PathWord, WordError> {
    let mut w = fg.empty_at(fg.base());
    for tok in tokens(text)? {
        let (token, k) = resolve_with_exponent(fg, tok)?;
        let piece = match token {
            Token::One => continue,
            Token::Element { vertex, elem } => fg.vertex_element(vertex, elem),
            Token::Edge { edge } => fg.edge_element(edge, Dir::Forward),
        };
        let piece = if k < 0 { fg.invert(&piece) } else { piece };
        for _ in 0..k.unsigned_abs() {
            w = fg.concat(&w, &piece);
        }
    }
    Ok(w)
}

/// Parses a comma-separated list of words.
pub fn parse_word_list(fg: &FundamentalGroup, text: &str) -> Result<Vec<PathWord>, WordError> {
    split_list(text).into_iter().map(|t| parse_word(fg, t)).collect()
}

/// Parses tokens strictly as a path starting at `start`: element tokens
/// must belong to the vertex the path is at, edge letters must leave it.
pub fn parse_path(fg: &FundamentalGroup, start: usize, text: &str) -> Result<PathWord, WordError> {
    let gog = fg.gog();
    let mut at = start;
    let mut head = gog.vertex_group(start).identity();
    let mut steps: Vec<Step> = Vec::new();
    for tok in tokens(text)? {
        let (token, k) = resolve_with_exponent(fg, tok)?;
        match token {
            Token::One => {}
            Token::Element { vertex, elem } => {
                if vertex != at {
                    return Err(WordError::TypeError(format!(
                        "{tok} belongs to {} but the path is at {}",
                        gog.vertex_name(vertex),
                        gog.vertex_name(at)
                    )));
                }
                let g = gog.vertex_group(at);
                let x = g.pow(elem, k);
                match steps.last_mut() {
                    Some(last) => last.elem = g.mul(last.elem, x),
                    None => head = g.mul(head, x),
                }
            }
            Token::Edge { edge } => {
                let dir = if k < 0 { Dir::Backward } else { Dir::Forward };
                for _ in 0..k.unsigned_abs() {
                    if fg.step_source(edge, dir) != at {
                        return Err(WordError::TypeError(format!(
                            "{tok} does not leave {}",
                            gog.vertex_name(at)
                        )));
                    }
                    at = fg.step_target(edge, dir);
                    steps.push(Step { edge, dir, elem: gog.vertex_group(at).identity() });
                }
            }
        }
    }
    fg.path_word(start, head, steps)
}

fn element_token(fg: &FundamentalGroup, v: usize, x: usize) -> String {
    let label = fg.gog().vertex_group(v).label(x);
    if label.contains(char::is_whitespace) && !label.starts_with('(') {
        format!("{}.({label})", fg.gog().vertex_name(v))
    } else {
        format!("{}.{label}", fg.gog().vertex_name(v))
    }
}

/// Prints a word as a path, omitting identity syllables; `1` if empty.
pub fn format_word(fg: &FundamentalGroup, w: &PathWord) -> String {
    let gog = fg.gog();
    let mut parts = Vec::new();
    if w.head() != gog.vertex_group(w.start()).identity() {
        parts.push(element_token(fg, w.start(), w.head()));
    }
    for s in w.steps() {
        let name = &gog.edge(s.edge).name;
        parts.push(match s.dir {
            Dir::Forward => name.clone(),
            Dir::Backward => format!("{name}^-1"),
        });
        let v = fg.step_target(s.edge, s.dir);
        if s.elem != gog.vertex_group(v).identity() {
            parts.push(element_token(fg, v, s.elem));
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}
