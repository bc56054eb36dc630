//! Penn-Treebank-style bracketed constituency trees.
//!
//! A tree is either a preterminal leaf `(TAG token)` or an internal node
//! `(LABEL child child ...)`. Parsing collapses the label-less outer wrapper
//! (`( (S ...) )`) and a `ROOT` wrapper with a single child, as found in
//! MNLI-shaped parse columns.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    EmptyInput,
    #[error("unbalanced parentheses at byte {0}")]
    UnbalancedParens(usize),
    #[error("empty label at byte {0}")]
    EmptyLabel(usize),
    #[error("unexpected token at byte {0}")]
    UnexpectedToken(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Body {
    Token(String),
    Children(Vec<ConstituencyTree>),
}

/// A labeled ordered tree. Leaves carry a part-of-speech tag and a token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstituencyTree {
    label: String,
    body: Body,
}

impl ConstituencyTree {
    /// Preterminal leaf such as `(NN movie)`.
    pub fn leaf(tag: impl Into<String>, token: impl Into<String>) -> Self {
        let tag = tag.into();
        assert!(!tag.is_empty(), "leaf tag must be non-empty");
        Self { label: tag, body: Body::Token(token.into()) }
    }

    /// Internal node. Panics on an empty label or empty child list.
    pub fn node(label: impl Into<String>, children: Vec<ConstituencyTree>) -> Self {
        let label = label.into();
        assert!(!label.is_empty(), "node label must be non-empty");
        assert!(!children.is_empty(), "internal node needs at least one child");
        Self { label, body: Body::Children(children) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.body, Body::Token(_))
    }

    pub fn token(&self) -> Option<&str> {
        match &self.body {
            Body::Token(t) => Some(t),
            Body::Children(_) => None,
        }
    }

    /// Children in order; empty for a leaf.
    pub fn children(&self) -> &[ConstituencyTree] {
        match &self.body {
            Body::Token(_) => &[],
            Body::Children(c) => c,
        }
    }

    /// Left-to-right leaf tokens.
    pub fn yield_tokens(&self) -> Vec<String> {
        self.leaves().map(|(_, tok)| tok.to_string()).collect()
    }

    /// Left-to-right `(tag, token)` pairs.
    pub fn leaves(&self) -> Leaves<'_> {
        Leaves { stack: vec![self] }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    /// Single-space bracketed form.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_into(&mut out);
        out
    }

    fn write_into(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.label);
        match &self.body {
            Body::Token(t) => {
                out.push(' ');
                out.push_str(t);
            }
            Body::Children(children) => {
                for c in children {
                    out.push(' ');
                    c.write_into(out);
                }
            }
        }
        out.push(')');
    }
}

impl fmt::Display for ConstituencyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl std::str::FromStr for ConstituencyTree {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_bracketed(s)
    }
}

pub struct Leaves<'a> {
    stack: Vec<&'a ConstituencyTree>,
}

impl<'a> Iterator for Leaves<'a> {
    type Item = (&'a str, &'a str);

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(t) = self.stack.pop() {
            match &t.body {
                Body::Token(tok) => return Some((&t.label, tok)),
                Body::Children(children) => self.stack.extend(children.iter().rev()),
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lexeme<'a> {
    Open(usize),
    Close(usize),
    Atom(usize, &'a str),
}

fn lex(text: &str) -> Vec<Lexeme<'_>> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push(Lexeme::Open(i));
                i += 1;
            }
            b')' => {
                out.push(Lexeme::Close(i));
                i += 1;
            }
            b if b.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !matches!(bytes[i], b'(' | b')') && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                out.push(Lexeme::Atom(start, &text[start..i]));
            }
        }
    }
    out
}

/// Parsed node before wrapper collapsing; the label may be empty.
struct RawNode {
    label: String,
    offset: usize,
    body: RawBody,
}

enum RawBody {
    Token(String),
    Children(Vec<RawNode>),
}

struct Parser<'a> {
    lexemes: Vec<Lexeme<'a>>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Lexeme<'a>> {
        self.lexemes.get(self.pos).copied()
    }

    fn node(&mut self) -> Result<RawNode, ParseError> {
        let open_at = match self.peek() {
            Some(Lexeme::Open(at)) => at,
            Some(Lexeme::Close(at)) => return Err(ParseError::UnbalancedParens(at)),
            Some(Lexeme::Atom(at, _)) => return Err(ParseError::UnexpectedToken(at)),
            None => return Err(ParseError::UnbalancedParens(self.end)),
        };
        self.pos += 1;
        let label = match self.peek() {
            Some(Lexeme::Atom(_, a)) => {
                self.pos += 1;
                a.to_string()
            }
            _ => String::new(),
        };
        match self.peek() {
            Some(Lexeme::Atom(_, tok)) => {
                self.pos += 1;
                if label.is_empty() {
                    return Err(ParseError::EmptyLabel(open_at));
                }
                match self.peek() {
                    Some(Lexeme::Close(_)) => self.pos += 1,
                    Some(Lexeme::Atom(at2, _)) | Some(Lexeme::Open(at2)) => {
                        return Err(ParseError::UnexpectedToken(at2))
                    }
                    None => return Err(ParseError::UnbalancedParens(self.end)),
                }
                Ok(RawNode { label, offset: open_at, body: RawBody::Token(tok.to_string()) })
            }
            Some(Lexeme::Close(at)) => {
                // "()" or "(X)": no children and no token.
                if label.is_empty() {
                    Err(ParseError::EmptyLabel(open_at))
                } else {
                    Err(ParseError::UnexpectedToken(at))
                }
            }
            None => Err(ParseError::UnbalancedParens(self.end)),
            Some(Lexeme::Open(_)) => {
                let mut children = Vec::new();
                loop {
                    match self.peek() {
                        Some(Lexeme::Open(_)) => children.push(self.node()?),
                        Some(Lexeme::Close(_)) => {
                            self.pos += 1;
                            break;
                        }
                        Some(Lexeme::Atom(at, _)) => return Err(ParseError::UnexpectedToken(at)),
                        None => return Err(ParseError::UnbalancedParens(self.end)),
                    }
                }
                Ok(RawNode { label, offset: open_at, body: RawBody::Children(children) })
            }
        }
    }
}

fn into_tree(raw: RawNode) -> Result<ConstituencyTree, ParseError> {
    if raw.label.is_empty() {
        return Err(ParseError::EmptyLabel(raw.offset));
    }
    Ok(match raw.body {
        RawBody::Token(t) => ConstituencyTree { label: raw.label, body: Body::Token(t) },
        RawBody::Children(children) => ConstituencyTree {
            label: raw.label,
            body: Body::Children(children.into_iter().map(into_tree).collect::<Result<_, _>>()?),
        },
    })
}

/// Parse one bracketed tree.
///
/// A label-less or `ROOT` outer wrapper around exactly one child is removed.
/// Error offsets are byte positions in `text`; a missing closing parenthesis
/// is reported at the end of input.
pub fn parse_bracketed(text: &str) -> Result<ConstituencyTree, ParseError> {
    let lexemes = lex(text);
    if lexemes.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let mut parser = Parser { lexemes, pos: 0, end: text.len() };
    let mut raw = parser.node()?;
    if let Some(extra) = parser.peek() {
        return Err(match extra {
            Lexeme::Close(at) => ParseError::UnbalancedParens(at),
            Lexeme::Open(at) | Lexeme::Atom(at, _) => ParseError::UnexpectedToken(at),
        });
    }
    loop {
        let is_wrapper = raw.label.is_empty() || raw.label == "ROOT";
        match raw.body {
            RawBody::Children(mut children) if is_wrapper && children.len() == 1 => {
                raw = children.pop().expect("one child");
            }
            body => {
                raw.body = body;
                break;
            }
        }
    }
    into_tree(raw)
}

/// Collapse every whitespace run to one space and trim the ends.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_sentence() {
        let t = parse_bracketed("(S (NP (DT the) (NN movie)) (VP (VBZ stars)))").unwrap();
        assert_eq!(t.label(), "S");
        assert_eq!(t.children().len(), 2);
        assert_eq!(t.yield_tokens(), ["the", "movie", "stars"]);
    }

    #[test]
    fn collapses_anonymous_wrapper() {
        let t = parse_bracketed("((S (NP (NN x))))").unwrap();
        assert_eq!(t.label(), "S");
        assert_eq!(t.serialize(), "(S (NP (NN x)))");
        let t = parse_bracketed("(ROOT (S (NP (NN x))))").unwrap();
        assert_eq!(t.label(), "S");
    }

    #[test]
    fn reports_unclosed_input_at_end() {
        assert_eq!(parse_bracketed("(S (NP"), Err(ParseError::UnbalancedParens(6)));
    }

    #[test]
    fn reports_extra_close() {
        assert_eq!(parse_bracketed("(NN x))"), Err(ParseError::UnbalancedParens(6)));
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(parse_bracketed(""), Err(ParseError::EmptyInput));
        assert_eq!(parse_bracketed("  \n\t"), Err(ParseError::EmptyInput));
        assert_eq!(parse_bracketed("()"), Err(ParseError::EmptyLabel(0)));
    }

    #[test]
    fn inner_label_less_node_is_rejected() {
        assert_eq!(parse_bracketed("(S ((NN x) (NN y)))"), Err(ParseError::EmptyLabel(3)));
        // A label-less root with two children is not a wrapper.
        assert_eq!(parse_bracketed("((NN x) (NN y))"), Err(ParseError::EmptyLabel(0)));
    }

    #[test]
    fn leaf_forms() {
        let t = parse_bracketed("(NN x)").unwrap();
        assert!(t.is_leaf());
        assert_eq!(t.yield_tokens(), ["x"]);
        assert_eq!(t.serialize(), "(NN x)");
        assert_eq!(
            ConstituencyTree::node(
                "NP",
                vec![ConstituencyTree::leaf("DT", "the"), ConstituencyTree::leaf("NN", "movie")]
            )
            .serialize(),
            "(NP (DT the) (NN movie))"
        );
    }

    #[test]
    fn yields_in_order() {
        let t = parse_bracketed("(S (NP (DT The) (NNS managers)) (VP (VBD heard)))").unwrap();
        assert_eq!(t.yield_tokens(), ["The", "managers", "heard"]);
        assert_eq!(t.leaf_count(), 3);
    }

    #[test]
    fn whitespace_is_normalized() {
        let messy = "  (S\n\t(NP   (NN x))\n  (VP (VBD ran)) )  ";
        let t = parse_bracketed(messy).unwrap();
        assert_eq!(t.serialize(), "(S (NP (NN x)) (VP (VBD ran)))");
    }

    #[test]
    fn treebank_escapes_pass_through() {
        let t = parse_bracketed("(NP (-LRB- -LRB-) (NN x) (-RRB- -RRB-))").unwrap();
        assert_eq!(t.yield_tokens(), ["-LRB-", "x", "-RRB-"]);
    }

    #[test]
    fn token_then_child_is_unexpected() {
        assert!(matches!(parse_bracketed("(NP x (NN y))"), Err(ParseError::UnexpectedToken(6))));
    }
}
