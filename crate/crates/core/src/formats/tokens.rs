use crate::error::{Error, Position, Result};

/// Whitespace-separated tokens with line tracking. Lines starting with `c` are comments.
pub(crate) struct Tokens<'a> {
    input: &'a [u8],
    pos: usize,
    line: usize,
    at_line_start: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub text: &'a [u8],
    pub line: usize,
}

impl<'a> Token<'a> {
    pub fn int(&self) -> Result<i64> {
        parse_int(self.text).ok_or_else(|| {
            Error::parse(
                Position::Line(self.line),
                format!("expected an integer, found {:?}", String::from_utf8_lossy(self.text)),
            )
        })
    }

    pub fn is(&self, word: &[u8]) -> bool {
        self.text == word
    }
}

fn parse_int(text: &[u8]) -> Option<i64> {
    let (negative, digits) = match text.first()? {
        b'-' => (true, &text[1..]),
        _ => (false, text),
    };
    if digits.is_empty() {
        return None;
    }
    let mut value: i64 = 0;
    for &b in digits {
        if !b.is_ascii_digit() {
            return None;
        }
        value = value.checked_mul(10)?.checked_add((b - b'0') as i64)?;
    }
    Some(if negative { -value } else { value })
}

impl<'a> Tokens<'a> {
    pub fn new(input: &'a [u8]) -> Tokens<'a> {
        Tokens {
            input,
            pos: 0,
            line: 1,
            at_line_start: true,
        }
    }

    fn skip_line(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos] != b'\n' {
            self.pos += 1;
        }
    }
}

impl<'a> Iterator for Tokens<'a> {
    type Item = Token<'a>;

    fn next(&mut self) -> Option<Token<'a>> {
        loop {
            let &b = self.input.get(self.pos)?;
            if b == b'\n' {
                self.line += 1;
                self.pos += 1;
                self.at_line_start = true;
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'c' && self.at_line_start {
                self.skip_line();
            } else {
                break;
            }
        }
        let start = self.pos;
        while self.pos < self.input.len() && !self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.at_line_start = false;
        Some(Token {
            text: &self.input[start..self.pos],
            line: self.line,
        })
    }
}
