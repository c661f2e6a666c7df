use std::fmt;

use super::calendar::CalendarSequence;
use super::pe::{BoundedPe, Bpes, Pe, PeKind, Selector, SimplePe};
use super::TemporalError;

/// Text format, round-tripping byte for byte with the Display impls below:
///
/// ```text
/// bpes  := bpe (';' bpe)*                (empty string = empty BPES)
/// bpe   := '[' bound ',' bound ']' body
/// bound := '*' | integer
/// body  := '[' hour ',' hour ']'         simple daily range
///        | term ('+' term)* '>' n '.' name   periodic expression
/// term  := ('all' | '{' n (',' n)* '}') '.' name
/// ```
struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser { src, pos: 0 }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, TemporalError> {
        Err(TemporalError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> Result<(), TemporalError> {
        match self.peek() {
            Some(got) if got == c => {
                self.bump();
                Ok(())
            }
            Some(got) => self.fail(format!("expected `{c}`, found `{got}`")),
            None => self.fail(format!("expected `{c}`, found end of input")),
        }
    }

    fn integer(&mut self) -> Result<u64, TemporalError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return self.fail("expected an integer");
        }
        self.src[start..self.pos]
            .parse()
            .or_else(|_| self.fail("integer out of range"))
    }

    fn ident(&mut self) -> Result<&'a str, TemporalError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            self.bump();
        }
        if self.pos == start {
            return self.fail("expected a name");
        }
        Ok(&self.src[start..self.pos])
    }

    fn bound(&mut self) -> Result<Option<u64>, TemporalError> {
        if self.peek() == Some('*') {
            self.bump();
            Ok(None)
        } else {
            Ok(Some(self.integer()?))
        }
    }

    fn selector(&mut self) -> Result<Selector, TemporalError> {
        if self.peek() == Some('{') {
            self.bump();
            let mut items = Vec::new();
            loop {
                let n = self.integer()?;
                let n = u32::try_from(n).or_else(|_| self.fail("selector index out of range"))?;
                items.push(n);
                match self.peek() {
                    Some(',') => {
                        self.bump();
                    }
                    Some('}') => {
                        self.bump();
                        break;
                    }
                    _ => return self.fail("expected `,` or `}` in selector"),
                }
            }
            Ok(Selector::only(items))
        } else {
            let word = self.ident()?;
            if word == "all" {
                Ok(Selector::All)
            } else {
                self.fail(format!("expected `all` or `{{..}}`, found `{word}`"))
            }
        }
    }

    fn periodic(&mut self) -> Result<Pe, TemporalError> {
        let mut selectors = Vec::new();
        let mut names = Vec::new();
        loop {
            selectors.push(self.selector()?);
            self.eat('.')?;
            names.push(self.ident()?.to_string());
            match self.peek() {
                Some('+') => {
                    self.bump();
                }
                Some('>') => {
                    self.bump();
                    break;
                }
                _ => return self.fail("expected `+` or `>` after calendar name"),
            }
        }
        let duration = self.integer()?;
        self.eat('.')?;
        let unit = self.ident()?;
        let seq = CalendarSequence::new(&names)?;
        if unit != names.last().unwrap() {
            return self.fail(format!(
                "duration unit `{unit}` must be the innermost calendar"
            ));
        }
        Pe::new(seq, selectors, duration)
    }

    fn bounded_pe(&mut self) -> Result<BoundedPe, TemporalError> {
        self.eat('[')?;
        let begin = self.bound()?;
        self.eat(',')?;
        let end = self.bound()?;
        self.eat(']')?;
        let pe = if self.peek() == Some('[') {
            self.bump();
            let s = self.integer()?;
            self.eat(',')?;
            let e = self.integer()?;
            self.eat(']')?;
            let s = u8::try_from(s).or_else(|_| self.fail("hour out of range"))?;
            let e = u8::try_from(e).or_else(|_| self.fail("hour out of range"))?;
            PeKind::Simple(SimplePe::new(s, e)?)
        } else {
            PeKind::Periodic(self.periodic()?)
        };
        BoundedPe::new(begin, end, pe)
    }

    fn finish(&self) -> Result<(), TemporalError> {
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.fail("trailing input")
        }
    }
}

pub fn parse_bounded_pe(input: &str) -> Result<BoundedPe, TemporalError> {
    let mut p = Parser::new(input.trim());
    let bpe = p.bounded_pe()?;
    p.finish()?;
    Ok(bpe)
}

pub fn parse_pe(input: &str) -> Result<Pe, TemporalError> {
    let mut p = Parser::new(input.trim());
    let pe = p.periodic()?;
    p.finish()?;
    Ok(pe)
}

pub fn parse_bpes(input: &str) -> Result<Bpes, TemporalError> {
    let trimmed = input.trim();
    if trimmed.is_empty() {
        return Ok(Bpes::empty());
    }
    let mut members = Vec::new();
    for part in trimmed.split(';') {
        members.push(parse_bounded_pe(part)?);
    }
    Bpes::new(members)
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::All => write!(f, "all"),
            Selector::Only(items) => {
                write!(f, "{{")?;
                for (i, n) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{n}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Display for Pe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (sel, name)) in self.selectors().iter().zip(self.seq().names()).enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{sel}.{name}")?;
        }
        write!(f, ">{}.{}", self.duration(), self.seq().names().last().unwrap())
    }
}

impl fmt::Display for SimplePe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.start(), self.end())
    }
}

impl fmt::Display for BoundedPe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.begin() {
            None => write!(f, "[*,")?,
            Some(b) => write!(f, "[{b},")?,
        }
        match self.end() {
            None => write!(f, "*]")?,
            Some(e) => write!(f, "{e}]")?,
        }
        match self.pe() {
            PeKind::Simple(sp) => write!(f, "{sp}"),
            PeKind::Periodic(pe) => write!(f, "{pe}"),
        }
    }
}

impl fmt::Display for Bpes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.members().iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}
