//! Reader for the text produced by [`emit_bir_text`](super::emit_bir_text),
//! also usable for small hand-written systems.

use super::*;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}: {message}")]
pub struct ReadError {
    pub line: u32,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum T {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    Comment(String),
    Sym(&'static str),
    Eof,
}

const SYMBOLS: &[&str] = &[
    ":=", "==", "!=", "<=", ">=", "&&", "||", "<", ">", "!", "+", "-", "*", "/", "%", "^", "?", ":", "=",
    ";", ",", ".", "(", ")", "{", "}",
];

fn lex(text: &str) -> Result<Vec<(T, u32)>, ReadError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let err = |line, m: String| Err(ReadError { line, message: m });
    while i < b.len() {
        let c = b[i] as char;
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if text[i..].starts_with("//") {
            let end = text[i..].find('\n').map_or(text.len(), |n| i + n);
            out.push((T::Comment(text[i + 2..end].trim().to_string()), line));
            i = end;
        } else if text[i..].starts_with("/*") {
            let Some(n) = text[i + 2..].find("*/") else {
                return err(line, "unterminated block comment".into());
            };
            line += text[i..i + 2 + n].matches('\n').count() as u32;
            i += n + 4;
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let s = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$') {
                i += 1;
            }
            out.push((T::Ident(text[s..i].to_string()), line));
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            if i + 1 < b.len() && b[i] == b'.' && (b[i + 1] as char).is_ascii_digit() {
                i += 1;
                while i < b.len() && (b[i] as char).is_ascii_digit() {
                    i += 1;
                }
                out.push((T::Float(text[s..i].parse().unwrap()), line));
            } else {
                match text[s..i].parse() {
                    Ok(v) => out.push((T::Int(v), line)),
                    Err(_) => return err(line, format!("integer `{}` out of range", &text[s..i])),
                }
            }
        } else if c == '"' {
            let Some(n) = text[i + 1..].find('"') else {
                return err(line, "unterminated string".into());
            };
            out.push((T::Str(text[i + 1..i + 1 + n].to_string()), line));
            i += n + 2;
        } else if let Some(sym) = SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            out.push((T::Sym(sym), line));
            i += sym.len();
        } else {
            return err(line, format!("unexpected character `{c}`"));
        }
    }
    out.push((T::Eof, line));
    Ok(out)
}

pub fn read_bir_text(text: &str) -> Result<System, ReadError> {
    let toks = lex(text)?;
    let mut r = Reader { toks, i: 0, sys: System::default(), params: Vec::new(), props: Vec::new() };
    r.system()?;
    r.sys.check_well_formed().map_err(|m| ReadError { line: 0, message: m })?;
    Ok(r.sys)
}

struct Deferred {
    kind: DeferKind,
    pos: usize,
}

enum DeferKind {
    Property(String),
    Function(usize),
    VarInit(VarId),
    Thread(ThreadId),
}

struct Reader {
    toks: Vec<(T, u32)>,
    i: usize,
    sys: System,
    params: Vec<(String, Type)>,
    props: Vec<(String, Expr)>,
}

type R<T> = Result<T, ReadError>;

impl Reader {
    fn peek(&self) -> &T {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &T {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn line(&self) -> u32 {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> T {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<X>(&self, m: impl Into<String>) -> R<X> {
        Err(ReadError { line: self.line(), message: m.into() })
    }

    fn skip_comments(&mut self) {
        while matches!(self.peek(), T::Comment(_)) {
            self.bump();
        }
    }

    fn is_sym(&mut self, s: &str) -> bool {
        self.skip_comments();
        matches!(self.peek(), T::Sym(x) if *x == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> R<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {:?}", self.peek()))
        }
    }

    fn is_word(&mut self, w: &str) -> bool {
        self.skip_comments();
        matches!(self.peek(), T::Ident(x) if x == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn word(&mut self, w: &str) -> R<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {:?}", self.peek()))
        }
    }

    fn ident(&mut self) -> R<String> {
        self.skip_comments();
        match self.bump() {
            T::Ident(s) => Ok(s),
            other => self.err(format!("expected name, found {other:?}")),
        }
    }

    /// Comment directly following the previous token on the same line.
    fn trailing_comment(&mut self) -> Option<String> {
        let prev_line = self.toks[self.i.saturating_sub(1)].1;
        match self.peek().clone() {
            T::Comment(c) if self.line() == prev_line => {
                self.bump();
                Some(c)
            }
            _ => None,
        }
    }

    fn ty(&mut self) -> R<Type> {
        let name = self.ident()?;
        Ok(match name.as_str() {
            "boolean" => Type::Bool,
            "int" => Type::Int,
            "string" => Type::Str,
            "float" => Type::Float,
            "null" => Type::Null,
            "Seq" => {
                self.sym("<")?;
                let inner = self.ty()?;
                self.sym(">")?;
                Type::Seq(Box::new(inner))
            }
            _ => {
                if let Some(e) = self.sys.enums.iter().position(|e| e.name == name) {
                    Type::Enum(e)
                } else if let Some(a) = self.sys.aliases.iter().position(|a| a.name == name) {
                    Type::Alias(a)
                } else if let Some(r) = self.sys.records.iter().position(|r| r.name == name) {
                    Type::Record(r)
                } else {
                    return self.err(format!("unknown type `{name}`"));
                }
            }
        })
    }

    fn system(&mut self) -> R<()> {
        self.word("system")?;
        self.sys.name = self.ident()?;
        self.sym("{")?;
        let mut deferred = Vec::new();
        let mut threads: Vec<(String, bool, usize)> = Vec::new();
        loop {
            self.skip_comments();
            if self.eat_sym("}") {
                break;
            }
            if self.eat_word("fun") {
                let name = self.ident()?;
                let pos = self.i;
                if matches!(self.peek_at(5), T::Ident(w) if w == "LTL") {
                    deferred.push(Deferred { kind: DeferKind::Property(name), pos });
                } else {
                    self.sym("(")?;
                    let mut params = Vec::new();
                    while !self.eat_sym(")") {
                        let t = self.ty()?;
                        params.push((self.ident()?, t));
                        self.eat_sym(",");
                    }
                    self.word("returns")?;
                    let ret = self.ty()?;
                    self.sym("=")?;
                    self.sys.functions.push(FunDef { name, params, ret, body: Expr::bool(true) });
                    deferred.push(Deferred {
                        kind: DeferKind::Function(self.sys.functions.len() - 1),
                        pos: self.i,
                    });
                }
                self.skip_statement()?;
            } else if self.eat_word("enum") {
                let name = self.ident()?;
                self.sym("{")?;
                let mut elements = Vec::new();
                while !self.eat_sym("}") {
                    elements.push(self.ident()?);
                    self.eat_sym(",");
                }
                self.sys.enums.push(EnumDef { name, elements });
            } else if self.eat_word("typealias") {
                let name = self.ident()?;
                let base = self.ty()?;
                self.sym(";")?;
                let values = match self.trailing_comment() {
                    Some(c) if c.starts_with("values") => {
                        let body = c["values".len()..].trim();
                        let inner = body.trim_start_matches('{').trim_end_matches('}');
                        let mut sub = Reader {
                            toks: lex(inner)?,
                            i: 0,
                            sys: self.sys.clone(),
                            params: vec![],
                            props: vec![],
                        };
                        let mut vals = Vec::new();
                        while !matches!(sub.peek(), T::Eof) {
                            vals.push(sub.value()?);
                            sub.eat_sym(",");
                        }
                        vals
                    }
                    _ => Vec::new(),
                };
                self.sys.aliases.push(AliasDef { name, base, values });
            } else if self.eat_word("record") {
                let name = self.ident()?;
                self.sym("{")?;
                let mut fields = Vec::new();
                while !self.eat_sym("}") {
                    let ty = if self.is_word(&name) {
                        self.bump();
                        Type::Record(self.sys.records.len())
                    } else {
                        self.ty()?
                    };
                    let fname = self.ident()?;
                    self.sym(";")?;
                    let kind = self.kind_comment()?;
                    fields.push(FieldDef { name: fname, ty, kind });
                }
                self.sys.records.push(RecordDef { name, fields });
            } else if self.is_word("thread") || self.is_word("active") {
                let active = self.eat_word("active");
                self.word("thread")?;
                let name = self.ident()?;
                self.sym("(")?;
                self.sym(")")?;
                threads.push((name, active, self.i));
                self.skip_block()?;
            } else {
                let ty = self.ty()?;
                let name = self.ident()?;
                let init_pos = if self.eat_sym(":=") { Some(self.i) } else { None };
                if init_pos.is_some() {
                    self.skip_statement_no_comment()?;
                } else {
                    self.sym(";")?;
                }
                let kind = self.kind_comment()?;
                let id = self.sys.variables.len();
                self.sys.variables.push(VarDef { name: name.clone(), ty: ty.clone(), kind, init: None, owner: None });
                if let Some(pos) = init_pos {
                    deferred.push(Deferred { kind: DeferKind::VarInit(id), pos });
                }
                if let (Type::Record(r), VarKind::StaticConst) = (&ty, kind) {
                    let c = self.sys.constants.len();
                    let fields: Vec<FieldDef> = self.sys.records[*r].fields.clone();
                    let mut ids = Vec::new();
                    for (k, f) in fields.into_iter().enumerate() {
                        ids.push(self.sys.variables.len());
                        self.sys.variables.push(VarDef {
                            name: format!("{name}.{}", f.name),
                            ty: f.ty,
                            kind: f.kind,
                            init: None,
                            owner: Some((c, k)),
                        });
                    }
                    self.sys.constants.push(ConstDef { name, record: *r, var: id, fields: ids });
                }
            }
        }

        // the main thread is written last
        if let Some(main) = threads.pop() {
            threads.insert(0, main);
        }
        for (idx, (name, active, pos)) in threads.iter().enumerate() {
            self.sys.threads.push(ThreadDef {
                name: name.clone(),
                active_at_start: *active,
                locations: Vec::new(),
            });
            deferred.push(Deferred { kind: DeferKind::Thread(idx), pos: *pos });
        }

        let mut props = Vec::new();
        for d in deferred {
            self.i = d.pos;
            match d.kind {
                DeferKind::Function(f) => {
                    self.params = self.sys.functions[f].params.clone();
                    let body = self.expr()?;
                    self.params.clear();
                    self.sys.functions[f].body = body;
                }
                DeferKind::VarInit(v) => {
                    let val = self.value()?;
                    self.sys.variables[v].init = Some(val);
                }
                DeferKind::Property(name) => props.push(self.property(name)?),
                DeferKind::Thread(t) => self.thread_body(t)?,
            }
        }
        self.sys.properties = props;
        Ok(())
    }

    fn kind_comment(&mut self) -> R<VarKind> {
        match self.trailing_comment() {
            Some(c) => VarKind::from_comment(&c)
                .map_or_else(|| self.err(format!("unknown variable kind `{c}`")), Ok),
            None => Ok(VarKind::Controlled),
        }
    }

    fn skip_statement(&mut self) -> R<()> {
        self.skip_statement_no_comment()?;
        self.trailing_comment();
        Ok(())
    }

    fn skip_statement_no_comment(&mut self) -> R<()> {
        let mut depth = 0i32;
        loop {
            match self.bump() {
                T::Sym("(") | T::Sym("{") => depth += 1,
                T::Sym(")") | T::Sym("}") => depth -= 1,
                T::Sym(";") if depth == 0 => return Ok(()),
                T::Eof => return self.err("unexpected end of input"),
                _ => {}
            }
        }
    }

    fn skip_block(&mut self) -> R<()> {
        self.sym("{")?;
        let mut depth = 1;
        while depth > 0 {
            match self.bump() {
                T::Sym("{") => depth += 1,
                T::Sym("}") => depth -= 1,
                T::Eof => return self.err("unexpected end of input"),
                _ => {}
            }
        }
        Ok(())
    }

    fn property(&mut self, name: String) -> R<PropertyDef> {
        self.sym("(")?;
        self.sym(")")?;
        self.word("returns")?;
        self.word("boolean")?;
        self.sym("=")?;
        self.qualified("LTL", "temporalProperty")?;
        self.sym("(")?;
        self.qualified("Property", "createObservableDictionary")?;
        self.sym("(")?;
        self.props.clear();
        while !self.eat_sym(")") {
            self.qualified("Property", "createObservableKey")?;
            self.sym("(")?;
            let key = match self.bump() {
                T::Str(s) => s,
                other => return self.err(format!("expected key string, found {other:?}")),
            };
            self.sym(",")?;
            let e = self.expr()?;
            self.sym(")")?;
            self.props.push((key, e));
            self.eat_sym(",");
        }
        self.sym(",")?;
        let formula = self.ltl()?;
        self.sym(")")?;
        self.sym(";")?;
        let decl_text = self.trailing_comment().unwrap_or_else(|| name.clone());
        Ok(PropertyDef { name, decl_text, props: std::mem::take(&mut self.props), formula })
    }

    fn qualified(&mut self, a: &str, b: &str) -> R<()> {
        self.word(a)?;
        self.sym(".")?;
        self.word(b)
    }

    fn ltl(&mut self) -> R<Ltl> {
        if self.eat_word("true") {
            return Ok(Ltl::True);
        }
        if self.eat_word("false") {
            return Ok(Ltl::False);
        }
        self.word("LTL")?;
        self.sym(".")?;
        let op = self.ident()?;
        self.sym("(")?;
        let f = if op == "prop" {
            let key = match self.bump() {
                T::Str(s) => s,
                other => return self.err(format!("expected key string, found {other:?}")),
            };
            match self.props.iter().position(|(k, _)| *k == key) {
                Some(i) => Ltl::Atom(i),
                None => return self.err(format!("unknown proposition `{key}`")),
            }
        } else {
            let a = self.ltl()?;
            let unary = |a: Ltl| -> Option<Ltl> {
                Some(match op.as_str() {
                    "negation" => Ltl::not(a),
                    "always" => Ltl::always(a),
                    "eventually" => Ltl::eventually(a),
                    _ => return None,
                })
            };
            if self.eat_sym(",") {
                let b = self.ltl()?;
                let (a, b) = (Box::new(a), Box::new(b));
                match op.as_str() {
                    "and" => Ltl::And(a, b),
                    "or" => Ltl::Or(a, b),
                    "implication" => Ltl::Implies(a, b),
                    "equivalence" => Ltl::Iff(a, b),
                    "xor" => Ltl::Xor(a, b),
                    "until" => Ltl::Until(a, b),
                    "release" => Ltl::Release(a, b),
                    _ => return self.err(format!("unknown binary LTL operator `{op}`")),
                }
            } else {
                match unary(a) {
                    Some(f) => f,
                    None => return self.err(format!("unknown unary LTL operator `{op}`")),
                }
            }
        };
        self.sym(")")?;
        Ok(f)
    }

    fn thread_body(&mut self, t: ThreadId) -> R<()> {
        self.sym("{")?;
        // labels first, so gotos may point forward
        let start = self.i;
        let mut labels = Vec::new();
        let mut depth = 1;
        while depth > 0 {
            match self.bump() {
                T::Sym("{") => depth += 1,
                T::Sym("}") => depth -= 1,
                T::Ident(w) if w == "loc" && depth == 1 => {
                    labels.push(self.ident()?);
                }
                T::Eof => return self.err("unexpected end of input"),
                _ => {}
            }
        }
        self.i = start;
        let mut locations: Vec<Location> = Vec::new();
        loop {
            self.skip_comments();
            if self.eat_sym("}") {
                break;
            }
            if self.eat_word("loc") {
                let label = self.ident()?;
                self.sym(":")?;
                let init = matches!(self.trailing_comment(), Some(c) if c == "initialization");
                locations.push(Location { label, init, commands: Vec::new() });
                continue;
            }
            let Some(loc) = locations.len().checked_sub(1) else {
                return self.err("command outside a location");
            };
            let cmd = self.command(&labels)?;
            locations[loc].commands.push(cmd);
        }
        self.sys.threads[t].locations = locations;
        Ok(())
    }

    fn command(&mut self, labels: &[String]) -> R<GuardedCmd> {
        let guard = if self.eat_word("when") { Some(self.expr()?) } else { None };
        self.word("do")?;
        let visible = !self.eat_word("invisible");
        self.sym("{")?;
        let mut actions = Vec::new();
        while !self.eat_sym("}") {
            actions.push(self.action()?);
        }
        self.word("goto")?;
        let label = self.ident()?;
        self.sym(";")?;
        let Some(target) = labels.iter().position(|l| *l == label) else {
            return self.err(format!("unknown location `{label}`"));
        };
        Ok(GuardedCmd { guard, actions, visible, target })
    }

    fn action(&mut self) -> R<Action> {
        if self.eat_word("start") {
            let name = self.ident()?;
            self.sym("(")?;
            self.sym(")")?;
            self.sym(";")?;
            return match self.sys.thread(&name) {
                Some(t) => Ok(Action::Start(t)),
                None => self.err(format!("unknown thread `{name}`")),
            };
        }
        if self.eat_word("assert") {
            self.sym("(")?;
            let e = self.expr()?;
            self.sym(")")?;
            self.sym(";")?;
            return Ok(Action::Assert(e));
        }
        let target = self.postfix()?;
        self.sym(":=")?;
        if self.eat_word("new") {
            self.ident()?;
            self.sym(";")?;
            let var = match target {
                Expr::Var(v) => v,
                Expr::Const(Value::Record(c)) => self.sys.constants[c].var,
                _ => return self.err("allocation target must be a variable"),
            };
            return match self.sys.constant_of_var(var) {
                Some(c) => Ok(Action::Alloc(var, c)),
                None => self.err("allocation target is not a record constant"),
            };
        }
        let lv = match target {
            Expr::Var(v) => LValue::Var(v),
            Expr::Field(b, f) => LValue::Field(*b, f),
            _ => return self.err("invalid assignment target"),
        };
        let e = self.expr()?;
        self.sym(";")?;
        Ok(Action::Assign(lv, e))
    }

    fn value(&mut self) -> R<Value> {
        match self.unary()? {
            Expr::Const(v) => Ok(v),
            _ => self.err("expected a constant value"),
        }
    }

    fn expr(&mut self) -> R<Expr> {
        self.binary(1)
    }

    fn binop(&mut self) -> Option<BinOp> {
        self.skip_comments();
        let T::Sym(s) = self.peek() else { return None };
        BinOp::ALL.iter().copied().find(|op| op.symbol() == *s)
    }

    fn binary(&mut self, min: u8) -> R<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.precedence() < min {
                break;
            }
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> R<Expr> {
        if self.eat_sym("!") {
            return Ok(Expr::Unary(UnOp::Not, Box::new(self.unary()?)));
        }
        if self.is_sym("-") {
            self.bump();
            match self.peek().clone() {
                T::Int(v) => {
                    self.bump();
                    return Ok(Expr::Const(Value::Int(-v)));
                }
                T::Float(v) => {
                    self.bump();
                    return Ok(Expr::Const(Value::Float(-v)));
                }
                _ => return Ok(Expr::Unary(UnOp::Neg, Box::new(self.unary()?))),
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> R<Expr> {
        let mut e = self.primary()?;
        while self.is_sym(".") {
            self.bump();
            let field = self.ident()?;
            let Some(r) = emit::infer_record(&self.sys, &e, &self.params) else {
                return self.err(format!("field `{field}` of a non-record value"));
            };
            let Some(f) = self.sys.records[r].fields.iter().position(|x| x.name == field) else {
                return self.err(format!("record {} has no field `{field}`", self.sys.records[r].name));
            };
            e = self.sys.field_access(e, f);
        }
        Ok(e)
    }

    fn args(&mut self) -> R<Vec<Expr>> {
        self.sym("(")?;
        let mut args = Vec::new();
        while !self.eat_sym(")") {
            args.push(self.expr()?);
            self.eat_sym(",");
        }
        Ok(args)
    }

    fn primary(&mut self) -> R<Expr> {
        self.skip_comments();
        match self.bump() {
            T::Int(v) => Ok(Expr::Const(Value::Int(v))),
            T::Float(v) => Ok(Expr::Const(Value::Float(v))),
            T::Str(s) => Ok(Expr::Const(Value::Str(Arc::from(s.as_str())))),
            T::Sym("(") => {
                let c = self.expr()?;
                if self.eat_sym("?") {
                    let a = self.expr()?;
                    self.sym(":")?;
                    let b = self.expr()?;
                    self.sym(")")?;
                    return Ok(Expr::Ite(Box::new(c), Box::new(a), Box::new(b)));
                }
                self.sym(")")?;
                Ok(c)
            }
            T::Sym("<") => {
                let mut items = Vec::new();
                while !self.eat_sym(">") {
                    items.push(self.value()?);
                    self.eat_sym(",");
                }
                Ok(Expr::Const(Value::Seq(Arc::new(items))))
            }
            T::Ident(name) => self.named(name),
            other => self.err(format!("expected expression, found {other:?}")),
        }
    }

    fn named(&mut self, name: String) -> R<Expr> {
        if let Some(i) = self.params.iter().position(|(p, _)| *p == name) {
            return Ok(Expr::Param(i));
        }
        match name.as_str() {
            "true" => return Ok(Expr::bool(true)),
            "false" => return Ok(Expr::bool(false)),
            "null" => return Ok(Expr::Const(Value::Null)),
            _ => {}
        }
        if name == "Seq" && self.is_sym(".") {
            self.bump();
            let op_name = self.ident()?;
            let Some(op) = SeqOp::from_name(&op_name) else {
                return self.err(format!("unknown sequence operation `{op_name}`"));
            };
            return Ok(Expr::Seq(op, self.args()?));
        }
        if let Some(e) = self.sys.enums.iter().position(|e| e.name == name) {
            self.sym(".")?;
            let elem = self.ident()?;
            return match self.sys.enums[e].elements.iter().position(|x| *x == elem) {
                Some(i) => Ok(Expr::Const(Value::Enum(e, i as u32))),
                None => self.err(format!("`{elem}` is not an element of {name}")),
            };
        }
        if self.is_sym("(") {
            let Some(f) = self.sys.functions.iter().position(|f| f.name == name) else {
                return self.err(format!("unknown function `{name}`"));
            };
            return Ok(Expr::Call(f, self.args()?));
        }
        if let Some(c) = self.sys.constants.iter().position(|c| c.name == name) {
            return Ok(Expr::Const(Value::Record(c)));
        }
        match self.sys.var(&name) {
            Some(v) => Ok(Expr::Var(v)),
            None => self.err(format!("unknown name `{name}`")),
        }
    }
}
