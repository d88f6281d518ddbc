//! Tokenizer for the supported AsmetaL subset.

use super::FrontendError;
use std::fmt;

/// Reserved words. Temporal operators (`g`, `f`, `u`, `v`) are plain
/// identifiers and only get their meaning inside `LTLSPEC` formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kw {
    Asm,
    Import,
    Export,
    Signature,
    Definitions,
    Domain,
    Enum,
    Abstract,
    Basic,
    Subsetof,
    Dynamic,
    Static,
    Derived,
    Controlled,
    Monitored,
    Function,
    Rule,
    Macro,
    Main,
    Default,
    Init,
    Agent,
    If,
    Then,
    Else,
    Endif,
    Switch,
    Case,
    Otherwise,
    Endswitch,
    Choose,
    Ifnone,
    Endchoose,
    In,
    With,
    Do,
    Forall,
    Endforall,
    Exists,
    Par,
    Endpar,
    Seq,
    Endseq,
    Let,
    Endlet,
    Skip,
    Program,
    SelfKw,
    True,
    False,
    Undef,
    And,
    Or,
    Not,
    Xor,
    Implies,
    Iff,
    Mod,
    Invariant,
    Over,
    Ltlspec,
}

impl Kw {
    fn from_word(w: &str) -> Option<Kw> {
        use Kw::*;
        Some(match w {
            "asm" => Asm,
            "import" => Import,
            "export" => Export,
            "signature" => Signature,
            "definitions" => Definitions,
            "domain" => Domain,
            "enum" => Enum,
            "abstract" => Abstract,
            "basic" => Basic,
            "subsetof" => Subsetof,
            "dynamic" => Dynamic,
            "static" => Static,
            "derived" => Derived,
            "controlled" => Controlled,
            "monitored" => Monitored,
            "function" => Function,
            "rule" => Rule,
            "macro" => Macro,
            "main" => Main,
            "default" => Default,
            "init" => Init,
            "agent" => Agent,
            "if" => If,
            "then" => Then,
            "else" => Else,
            "endif" => Endif,
            "switch" => Switch,
            "case" => Case,
            "otherwise" => Otherwise,
            "endswitch" => Endswitch,
            "choose" => Choose,
            "ifnone" => Ifnone,
            "endchoose" => Endchoose,
            "in" => In,
            "with" => With,
            "do" => Do,
            "forall" => Forall,
            "endforall" => Endforall,
            "exists" | "exist" => Exists,
            "par" => Par,
            "endpar" => Endpar,
            "seq" => Seq,
            "endseq" => Endseq,
            "let" => Let,
            "endlet" => Endlet,
            "skip" => Skip,
            "program" => Program,
            "self" => SelfKw,
            "true" => True,
            "false" => False,
            "undef" => Undef,
            "and" => And,
            "or" => Or,
            "not" => Not,
            "xor" => Xor,
            "implies" => Implies,
            "iff" => Iff,
            "mod" => Mod,
            "invariant" => Invariant,
            "over" => Over,
            "LTLSPEC" => Ltlspec,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Kw(Kw),
    Ident(String),
    /// Bound variable, `$` included.
    Var(String),
    Int(i64),
    Real(f64),
    Str(String),
    Assign,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Pipe,
    Arrow,
    DotDot,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Kw(k) => write!(f, "keyword `{}`", format!("{k:?}").to_lowercase()),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Var(s) => write!(f, "variable `{s}`"),
            Tok::Int(i) => write!(f, "integer `{i}`"),
            Tok::Real(r) => write!(f, "real `{r}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Eof => write!(f, "end of input"),
            other => {
                let s = match other {
                    Tok::Assign => ":=",
                    Tok::Eq => "=",
                    Tok::Neq => "!=",
                    Tok::Lt => "<",
                    Tok::Le => "<=",
                    Tok::Gt => ">",
                    Tok::Ge => ">=",
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Slash => "/",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrack => "[",
                    Tok::RBrack => "]",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Colon => ":",
                    Tok::Semi => ";",
                    Tok::Pipe => "|",
                    Tok::Arrow => "->",
                    Tok::DotDot => "..",
                    Tok::Dot => ".",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
}

/// Splits `source` into tokens. Comments (`//` and `/* */`) are dropped.
/// The returned vector always ends with an [`Tok::Eof`] token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let bytes = source.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut line_start = 0usize;

    while i < bytes.len() {
        let c = bytes[i];
        let col = (source[line_start..i].chars().count() + 1) as u32;
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            let (sl, sc) = (line, col);
            i += 2;
            loop {
                if i + 1 >= bytes.len() {
                    return Err(FrontendError::lex(sl, sc, "unterminated block comment"));
                }
                if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                    i += 2;
                    break;
                }
                if bytes[i] == b'\n' {
                    line += 1;
                    line_start = i + 1;
                }
                i += 1;
            }
            continue;
        }

        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &source[start..i];
            match Kw::from_word(word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word.to_string()),
            }
        } else if c == b'$' {
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if i == start + 1 {
                return Err(FrontendError::lex(line, col, "`$` must be followed by a name"));
            }
            Tok::Var(source[start..i].to_string())
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let is_real = bytes.get(i) == Some(&b'.')
                && bytes.get(i + 1).is_some_and(|d| d.is_ascii_digit());
            if is_real {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &source[start..i];
                Tok::Real(text.parse().map_err(|_| {
                    FrontendError::lex(line, col, format!("malformed real literal `{text}`"))
                })?)
            } else {
                let text = &source[start..i];
                Tok::Int(text.parse().map_err(|_| {
                    FrontendError::lex(line, col, format!("integer literal `{text}` out of range"))
                })?)
            }
        } else if c == b'"' || c == b'\'' {
            let quote = c;
            i += 1;
            let mut s = String::new();
            loop {
                match bytes.get(i) {
                    None | Some(b'\n') => {
                        return Err(FrontendError::lex(line, col, "unterminated string literal"))
                    }
                    Some(&q) if q == quote => {
                        i += 1;
                        break;
                    }
                    Some(b'\\') if i + 1 < bytes.len() => {
                        s.push(match bytes[i + 1] {
                            b'n' => '\n',
                            b't' => '\t',
                            other => other as char,
                        });
                        i += 2;
                    }
                    Some(_) => {
                        let ch = source[i..].chars().next().unwrap();
                        s.push(ch);
                        i += ch.len_utf8();
                    }
                }
            }
            Tok::Str(s)
        } else {
            let two = bytes.get(i + 1).copied();
            let (tok, len) = match (c, two) {
                (b':', Some(b'=')) => (Tok::Assign, 2),
                (b'!', Some(b'=')) => (Tok::Neq, 2),
                (b'<', Some(b'=')) => (Tok::Le, 2),
                (b'>', Some(b'=')) => (Tok::Ge, 2),
                (b'-', Some(b'>')) => (Tok::Arrow, 2),
                (b'.', Some(b'.')) => (Tok::DotDot, 2),
                (b'=', _) => (Tok::Eq, 1),
                (b'<', _) => (Tok::Lt, 1),
                (b'>', _) => (Tok::Gt, 1),
                (b'+', _) => (Tok::Plus, 1),
                (b'-', _) => (Tok::Minus, 1),
                (b'*', _) => (Tok::Star, 1),
                (b'/', _) => (Tok::Slash, 1),
                (b'(', _) => (Tok::LParen, 1),
                (b')', _) => (Tok::RParen, 1),
                (b'[', _) => (Tok::LBrack, 1),
                (b']', _) => (Tok::RBrack, 1),
                (b'{', _) => (Tok::LBrace, 1),
                (b'}', _) => (Tok::RBrace, 1),
                (b',', _) => (Tok::Comma, 1),
                (b':', _) => (Tok::Colon, 1),
                (b';', _) => (Tok::Semi, 1),
                (b'|', _) => (Tok::Pipe, 1),
                (b'.', _) => (Tok::Dot, 1),
                _ => {
                    let ch = source[i..].chars().next().unwrap();
                    return Err(FrontendError::lex(
                        line,
                        col,
                        format!("illegal character `{ch}`"),
                    ));
                }
            };
            i += len;
            tok
        };
        out.push(Token { tok, line, col, start, end: i });
    }
    let col = (source[line_start..].chars().count() + 1) as u32;
    out.push(Token { tok: Tok::Eof, line, col, start: source.len(), end: source.len() });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn update_tokens() {
        assert_eq!(
            kinds("foo:=2"),
            vec![Tok::Ident("foo".into()), Tok::Assign, Tok::Int(2), Tok::Eof]
        );
    }

    #[test]
    fn enum_domain_tokens() {
        assert_eq!(
            kinds("enum domain Light = {GREEN | RED}"),
            vec![
                Tok::Kw(Kw::Enum),
                Tok::Kw(Kw::Domain),
                Tok::Ident("Light".into()),
                Tok::Eq,
                Tok::LBrace,
                Tok::Ident("GREEN".into()),
                Tok::Pipe,
                Tok::Ident("RED".into()),
                Tok::RBrace,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn bound_variable() {
        assert_eq!(kinds("$x"), vec![Tok::Var("$x".into()), Tok::Eof]);
    }

    #[test]
    fn range_is_not_a_real() {
        assert_eq!(
            kinds("{1..3}"),
            vec![Tok::LBrace, Tok::Int(1), Tok::DotDot, Tok::Int(3), Tok::RBrace, Tok::Eof]
        );
    }

    #[test]
    fn comments_dropped_and_positions_tracked() {
        let toks = tokenize("// c\n  /* a\n b */ x").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("x".into()));
        assert_eq!((toks[0].line, toks[0].col), (3, 7));
    }

    #[test]
    fn illegal_character() {
        let e = tokenize("a # b").unwrap_err();
        assert_eq!((e.line, e.col), (1, 3));
    }
}
