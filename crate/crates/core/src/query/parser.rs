use crate::corpus::{fold, normalize_term, tokenize};

use super::{NameResolver, Operand, Query, QueryError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    And,
    Or,
    Word(String),
    Int(usize),
    Quoted(String),
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> QueryError {
    QueryError::Syntax {
        offset,
        message: message.into(),
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '\'' | '\u{2019}' | '_')
}

fn lex(input: &str) -> Result<Vec<Spanned>, QueryError> {
    let mut out = Vec::new();
    let mut chars = input.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            out.push(Spanned { tok, offset });
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '"' {
            chars.next();
            let start = offset + 1;
            let mut end = None;
            for (i, ch) in chars.by_ref() {
                if ch == '"' {
                    end = Some(i);
                    break;
                }
            }
            let end = end.ok_or_else(|| syntax(offset, "unterminated quoted phrase"))?;
            out.push(Spanned {
                tok: Tok::Quoted(input[start..end].to_string()),
                offset,
            });
            continue;
        }
        if is_word_char(c) {
            let mut end = offset;
            while let Some(&(i, ch)) = chars.peek() {
                if !is_word_char(ch) {
                    break;
                }
                end = i + ch.len_utf8();
                chars.next();
            }
            let word = &input[offset..end];
            let tok = if word.bytes().all(|b| b.is_ascii_digit()) {
                Tok::Int(
                    word.parse()
                        .map_err(|_| syntax(offset, format!("integer {word} too large")))?,
                )
            } else if word.eq_ignore_ascii_case("and") {
                Tok::And
            } else if word.eq_ignore_ascii_case("or") {
                Tok::Or
            } else {
                Tok::Word(word.to_string())
            };
            out.push(Spanned { tok, offset });
            continue;
        }
        return Err(syntax(offset, format!("unexpected character {c:?}")));
    }
    out.push(Spanned {
        tok: Tok::Eof,
        offset: input.len(),
    });
    Ok(out)
}

struct Parser<'a, R: ?Sized> {
    toks: Vec<Spanned>,
    pos: usize,
    resolver: &'a R,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::And => "AND".into(),
        Tok::Or => "OR".into(),
        Tok::Word(w) => format!("{w:?}"),
        Tok::Int(k) => format!("{k}"),
        Tok::Quoted(q) => format!("\"{q}\""),
        Tok::Eof => "end of query".into(),
    }
}

/// Checks that a bare word is exactly one search token and returns it folded.
fn word_term(word: &str, offset: usize) -> Result<String, QueryError> {
    let folded = fold(word);
    if tokenize(word) != [folded.as_str()] {
        return Err(syntax(
            offset,
            format!("{word:?} is not a single search term; quote it to search a phrase"),
        ));
    }
    Ok(folded)
}

fn phrase_key(text: &str, offset: usize) -> Result<String, QueryError> {
    normalize_term(text).ok_or_else(|| syntax(offset, "quoted phrase contains no searchable word"))
}

impl<R: NameResolver + ?Sized> Parser<'_, R> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Spanned, QueryError> {
        let t = self.bump();
        if t.tok == want {
            Ok(t)
        } else {
            Err(syntax(
                t.offset,
                format!("expected {}, found {}", describe(&want), describe(&t.tok)),
            ))
        }
    }

    fn parse_or(&mut self) -> Result<Query, QueryError> {
        let mut parts = vec![self.parse_and()?];
        while self.peek().tok == Tok::Or {
            self.bump();
            parts.push(self.parse_and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Query::Or(parts)
        })
    }

    fn parse_and(&mut self) -> Result<Query, QueryError> {
        let mut parts = vec![self.parse_primary()?];
        while self.peek().tok == Tok::And {
            self.bump();
            parts.push(self.parse_primary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Query::And(parts)
        })
    }

    fn parse_primary(&mut self) -> Result<Query, QueryError> {
        let t = self.bump();
        match t.tok {
            Tok::LParen => {
                let q = self.parse_or()?;
                self.expect(Tok::RParen)?;
                Ok(q)
            }
            Tok::Quoted(text) => {
                let key = phrase_key(&text, t.offset)?;
                Ok(match Operand::from_key(key) {
                    Operand::Term(k) => Query::Term(k),
                    Operand::Phrase(k) => Query::Phrase(k),
                })
            }
            Tok::Word(w) if self.peek().tok == Tok::LParen => match w.to_lowercase().as_str() {
                "any" => {
                    self.bump();
                    let ops = self.parse_names()?;
                    self.expect(Tok::RParen)?;
                    Ok(Query::any_of(ops))
                }
                "atleast" => {
                    self.bump();
                    let kt = self.bump();
                    let Tok::Int(k) = kt.tok else {
                        return Err(syntax(
                            kt.offset,
                            format!("expected a count, found {}", describe(&kt.tok)),
                        ));
                    };
                    self.expect(Tok::Comma)?;
                    let ops = self.parse_names()?;
                    self.expect(Tok::RParen)?;
                    Query::at_least(k, ops)
                }
                _ => Err(syntax(t.offset, format!("unknown function {w:?}"))),
            },
            Tok::Word(w) => {
                let key = word_term(&w, t.offset)?;
                // A lone group name would otherwise be searched as a word.
                if self.resolver.group_members(&key).is_some() && !self.resolver.knows_term(&key) {
                    return Err(syntax(
                        t.offset,
                        format!("{w:?} is a group; write any({w}) or atleast(k, {w})"),
                    ));
                }
                Ok(Query::Term(key))
            }
            other => Err(syntax(
                t.offset,
                format!(
                    "expected a term, phrase, function or '(', found {}",
                    describe(&other)
                ),
            )),
        }
    }

    fn parse_names(&mut self) -> Result<Vec<Operand>, QueryError> {
        let mut ops = Vec::new();
        loop {
            let t = self.bump();
            match t.tok {
                Tok::Quoted(text) => ops.push(Operand::from_key(phrase_key(&text, t.offset)?)),
                Tok::Word(w) => {
                    if let Some(members) = self.resolver.group_members(&w) {
                        for m in members {
                            let key =
                                normalize_term(&m).ok_or_else(|| QueryError::UnknownName {
                                    name: m.clone(),
                                    offset: t.offset,
                                })?;
                            ops.push(Operand::from_key(key));
                        }
                    } else {
                        let key = word_term(&w, t.offset)?;
                        if !self.resolver.knows_term(&key) {
                            return Err(QueryError::UnknownName {
                                name: w,
                                offset: t.offset,
                            });
                        }
                        ops.push(Operand::Term(key));
                    }
                }
                other => {
                    return Err(syntax(
                        t.offset,
                        format!(
                            "expected a group, term or phrase, found {}",
                            describe(&other)
                        ),
                    ))
                }
            }
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                return Ok(ops);
            }
        }
    }
}

/// Parses `text`, expanding group names through `resolver`.
pub fn parse_query<R: NameResolver + ?Sized>(
    text: &str,
    resolver: &R,
) -> Result<Query, QueryError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        resolver,
    };
    let q = p.parse_or()?;
    let end = p.bump();
    if end.tok != Tok::Eof {
        return Err(syntax(
            end.offset,
            format!(
                "expected AND, OR or end of query, found {}",
                describe(&end.tok)
            ),
        ));
    }
    Ok(q)
}
