//! Recursive-descent parser producing a resolved [`ModelAst`].

use super::ast::*;
use super::lexer::{Kw, Tok, Token};
use super::FrontendError;
use std::collections::{HashMap, HashSet};

/// Domains every model can refer to without declaring them.
pub const BUILTIN_DOMAINS: &[&str] =
    &["Boolean", "Integer", "Natural", "String", "Char", "Real", "Undef", "Agent"];

/// Sequence operations available as plain function applications, with arity.
pub const SEQ_BUILTINS: &[(&str, usize)] = &[
    ("length", 1),
    ("isEmpty", 1),
    ("contains", 2),
    ("count", 2),
    ("indexOf", 2),
    ("first", 1),
    ("last", 1),
    ("at", 2),
    ("tail", 1),
    ("union", 2),
    ("subSequence", 3),
    ("append", 2),
    ("prepend", 2),
    ("insertAt", 3),
    ("replaceAt", 3),
    ("excluding", 2),
];

pub fn seq_builtin_arity(name: &str) -> Option<usize> {
    SEQ_BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

/// Parses a token stream. `source` is the text the tokens came from; it is
/// used to capture formula text for reports.
pub fn parse_model(tokens: &[Token], source: &str) -> Result<ModelAst, FrontendError> {
    let mut p = Parser::new(tokens, source);
    let model = p.model()?;
    resolve_rule_names(&model)?;
    Ok(model)
}

struct Parser<'a> {
    toks: &'a [Token],
    src: &'a str,
    i: usize,
    domains: Vec<DomainDecl>,
    functions: Vec<FunctionDecl>,
    enum_elems: HashMap<String, String>,
    scope: Vec<String>,
}

type PResult<T> = Result<T, FrontendError>;

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], src: &'a str) -> Self {
        Parser {
            toks,
            src,
            i: 0,
            domains: Vec::new(),
            functions: Vec::new(),
            enum_elems: HashMap::new(),
            scope: Vec::new(),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        let t = &self.toks[self.i];
        Pos { line: t.line, col: t.col }
    }

    fn bump(&mut self) -> &Tok {
        let t = &self.toks[self.i].tok;
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.i];
        Err(FrontendError::parse(t.line, t.col, msg))
    }

    fn err_at<T>(&self, pos: Pos, msg: impl Into<String>) -> PResult<T> {
        Err(FrontendError::parse(pos.line, pos.col, msg))
    }

    fn is_kw(&self, k: Kw) -> bool {
        *self.peek() == Tok::Kw(k)
    }

    fn eat_kw(&mut self, k: Kw) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, k: Kw) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            let want = format!("{k:?}").to_lowercase();
            self.err(format!("expected `{want}`, found {}", self.peek()))
        }
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected identifier, found {other}")),
        }
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn var(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Var(s) => {
                self.bump();
                Ok(s)
            }
            other => self.err(format!("expected bound variable, found {other}")),
        }
    }

    fn text_since(&self, start_tok: usize) -> String {
        let start = self.toks[start_tok].start;
        let end = self.toks[self.i.saturating_sub(1).max(start_tok)].end;
        normalize_text(&self.src[start..end])
    }

    // ---- declarations -------------------------------------------------

    fn domain_known(&self, name: &str) -> bool {
        BUILTIN_DOMAINS.contains(&name) || self.domains.iter().any(|d| d.name == name)
    }

    fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    fn model(&mut self) -> PResult<ModelAst> {
        self.expect_kw(Kw::Asm)?;
        let name = self.ident()?;
        let mut imports = Vec::new();
        loop {
            if self.eat_kw(Kw::Import) {
                imports.push(self.import_path()?);
            } else if self.eat_kw(Kw::Export) {
                if !self.eat(&Tok::Star) {
                    self.ident()?;
                    while self.eat(&Tok::Comma) {
                        self.ident()?;
                    }
                }
            } else {
                break;
            }
        }
        self.expect_kw(Kw::Signature)?;
        self.expect(&Tok::Colon)?;
        while !matches!(self.peek(), Tok::Kw(Kw::Definitions | Kw::Main) | Tok::Eof) {
            self.signature_item()?;
        }

        let mut static_defs: Vec<FunctionDef> = Vec::new();
        let mut rules: Vec<RuleDef> = Vec::new();
        let mut ltl_specs: Vec<LtlSpecDecl> = Vec::new();
        let mut invariants = Vec::new();
        if self.eat_kw(Kw::Definitions) {
            self.expect(&Tok::Colon)?;
            loop {
                match self.peek() {
                    Tok::Kw(Kw::Domain) => self.domain_definition()?,
                    Tok::Kw(Kw::Function) => {
                        let def = self.function_definition()?;
                        if static_defs.iter().any(|d| d.name == def.name) {
                            return self.err_at(
                                def.pos,
                                format!("duplicate declaration of function `{}`", def.name),
                            );
                        }
                        static_defs.push(def);
                    }
                    Tok::Kw(Kw::Macro | Kw::Rule) => {
                        let r = self.rule_definition()?;
                        if rules.iter().any(|x| x.name == r.name) {
                            return self
                                .err_at(r.pos, format!("duplicate declaration of rule `{}`", r.name));
                        }
                        rules.push(r);
                    }
                    Tok::Kw(Kw::Ltlspec) => {
                        let spec = self.ltl_spec()?;
                        if ltl_specs.iter().any(|s| s.name == spec.name) {
                            return self.err_at(
                                spec.pos,
                                format!("duplicate declaration of property `{}`", spec.name),
                            );
                        }
                        ltl_specs.push(spec);
                    }
                    Tok::Kw(Kw::Invariant) => invariants.push(self.invariant()?),
                    Tok::Kw(Kw::Main) | Tok::Eof => break,
                    Tok::Ident(w) if w == "turbo" || w == "axiom" => {
                        return self.err(format!("unsupported syntax: `{w}` declarations"))
                    }
                    other => {
                        return self.err(format!("unexpected {other} in definitions section"))
                    }
                }
            }
        }

        if !self.is_kw(Kw::Main) {
            return self.err("missing main rule");
        }
        let pos = self.pos();
        self.bump();
        self.expect_kw(Kw::Rule)?;
        let main_name = self.ident()?;
        if rules.iter().any(|r| r.name == main_name) {
            return self.err_at(pos, format!("duplicate declaration of rule `{main_name}`"));
        }
        self.expect(&Tok::Eq)?;
        let body = self.rule()?;
        let main_rule = RuleDef { name: main_name, params: vec![], body, is_macro: false, pos };

        let init = if self.is_kw(Kw::Default) { Some(self.init_section()?) } else { None };
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {} after model end", self.peek()));
        }

        for def in &static_defs {
            match self.function(&def.name) {
                Some(f) if matches!(f.kind, FunKind::Static | FunKind::Derived) => {
                    if f.arg_domains.len() != def.params.len() {
                        return self.err_at(
                            def.pos,
                            format!(
                                "function `{}` declared with {} argument(s) but defined with {}",
                                def.name,
                                f.arg_domains.len(),
                                def.params.len()
                            ),
                        );
                    }
                }
                Some(_) => {
                    return self.err_at(
                        def.pos,
                        format!("only static and derived functions can be defined: `{}`", def.name),
                    )
                }
                None => {
                    return self.err_at(def.pos, format!("unresolved name `{}`", def.name));
                }
            }
        }

        Ok(ModelAst {
            name,
            imports,
            domains: std::mem::take(&mut self.domains),
            functions: std::mem::take(&mut self.functions),
            static_defs,
            rules,
            ltl_specs,
            invariants,
            main_rule,
            init,
        })
    }

    fn import_path(&mut self) -> PResult<String> {
        if let Tok::Str(s) = self.peek().clone() {
            self.bump();
            return Ok(s.rsplit('/').next().unwrap_or(&s).to_string());
        }
        let mut last = String::new();
        loop {
            match self.peek().clone() {
                Tok::DotDot => {
                    self.bump();
                }
                Tok::Ident(s) => {
                    self.bump();
                    last = s;
                }
                other => return self.err(format!("expected import path, found {other}")),
            }
            if !self.eat(&Tok::Slash) {
                break;
            }
        }
        if self.eat(&Tok::LParen) {
            while !self.eat(&Tok::RParen) {
                if *self.peek() == Tok::Eof {
                    return self.err("unterminated import list");
                }
                self.bump();
            }
        }
        Ok(last)
    }

    fn signature_item(&mut self) -> PResult<()> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Kw(Kw::Domain) => {
                self.bump();
                let name = self.ident()?;
                self.expect_kw(Kw::Subsetof)?;
                let parent_pos = self.pos();
                let parent = self.ident()?;
                let kind = match parent.as_str() {
                    "Agent" => DomainKind::AgentSubset,
                    "Integer" | "Natural" | "String" | "Char" | "Real" => DomainKind::ConcreteSubset,
                    _ if self.domain_known(&parent) => {
                        return self.err_at(
                            parent_pos,
                            format!("unsupported syntax: subset of user domain `{parent}`"),
                        )
                    }
                    _ => return self.err_at(parent_pos, format!("unresolved domain `{parent}`")),
                };
                self.add_domain(DomainDecl {
                    kind,
                    name,
                    enum_elements: vec![],
                    parent: Some(parent),
                    extension: None,
                    pos,
                })
            }
            Tok::Kw(Kw::Enum) => {
                self.bump();
                self.expect_kw(Kw::Domain)?;
                let name = self.ident()?;
                self.expect(&Tok::Eq)?;
                self.expect(&Tok::LBrace)?;
                let mut elems = Vec::new();
                loop {
                    let epos = self.pos();
                    let e = self.ident()?;
                    if elems.contains(&e) {
                        return self.err_at(epos, format!("duplicate enum element `{e}`"));
                    }
                    if let Some(other) = self.enum_elems.get(&e) {
                        return self.err_at(
                            epos,
                            format!("duplicate declaration: `{e}` already an element of `{other}`"),
                        );
                    }
                    elems.push(e);
                    if !(self.eat(&Tok::Pipe) || self.eat(&Tok::Comma)) {
                        break;
                    }
                }
                self.expect(&Tok::RBrace)?;
                for e in &elems {
                    self.enum_elems.insert(e.clone(), name.clone());
                }
                self.add_domain(DomainDecl {
                    kind: DomainKind::Enum,
                    name,
                    enum_elements: elems,
                    parent: None,
                    extension: None,
                    pos,
                })
            }
            Tok::Kw(Kw::Abstract) => {
                self.bump();
                self.expect_kw(Kw::Domain)?;
                let name = self.ident()?;
                self.add_domain(DomainDecl {
                    kind: DomainKind::Abstract,
                    name,
                    enum_elements: vec![],
                    parent: None,
                    extension: None,
                    pos,
                })
            }
            Tok::Kw(Kw::Basic) => self.err("unsupported syntax: `basic domain` declarations"),
            Tok::Kw(Kw::Dynamic | Kw::Controlled | Kw::Monitored | Kw::Static | Kw::Derived) => {
                let dynamic = self.eat_kw(Kw::Dynamic);
                let kind = match self.bump().clone() {
                    Tok::Kw(Kw::Controlled) => FunKind::Controlled,
                    Tok::Kw(Kw::Monitored) => FunKind::Monitored,
                    Tok::Kw(Kw::Static) if !dynamic => FunKind::Static,
                    Tok::Kw(Kw::Derived) if !dynamic => FunKind::Derived,
                    Tok::Ident(w) if w == "out" || w == "shared" => {
                        return self.err_at(pos, format!("unsupported syntax: `{w}` functions"))
                    }
                    other => {
                        return self.err_at(pos, format!("expected function kind, found {other}"))
                    }
                };
                let name = self.ident()?;
                self.expect(&Tok::Colon)?;
                let first = self.domain_product()?;
                let (arg_domains, codomain) = if self.eat(&Tok::Arrow) {
                    let cod = self.domain_ref()?;
                    (first, cod)
                } else {
                    if first.len() != 1 {
                        return self.err_at(pos, "a product domain needs `->` and a codomain");
                    }
                    (vec![], first.into_iter().next().unwrap())
                };
                let is_constant_element = kind == FunKind::Static
                    && arg_domains.is_empty()
                    && codomain.named().is_some_and(|c| {
                        self.domains.iter().any(|d| {
                            d.name == c
                                && matches!(d.kind, DomainKind::Abstract | DomainKind::AgentSubset)
                        })
                    });
                if self.function(&name).is_some() || self.enum_elems.contains_key(&name) {
                    return self.err_at(pos, format!("duplicate declaration of `{name}`"));
                }
                self.functions.push(FunctionDecl {
                    kind,
                    name,
                    arg_domains,
                    codomain,
                    is_constant_element,
                    dynamic,
                    pos,
                });
                Ok(())
            }
            Tok::Ident(w) if w == "out" || w == "shared" => {
                self.err(format!("unsupported syntax: `{w}` functions"))
            }
            other => self.err(format!("unexpected {other} in signature")),
        }
    }

    fn add_domain(&mut self, d: DomainDecl) -> PResult<()> {
        if self.domain_known(&d.name) {
            return self.err_at(d.pos, format!("duplicate declaration of domain `{}`", d.name));
        }
        self.domains.push(d);
        Ok(())
    }

    fn domain_product(&mut self) -> PResult<Vec<DomainRef>> {
        if self.is_ident("Prod") && *self.peek_at(1) == Tok::LParen {
            self.bump();
            self.bump();
            let mut v = vec![self.domain_ref()?];
            while self.eat(&Tok::Comma) {
                v.push(self.domain_ref()?);
            }
            self.expect(&Tok::RParen)?;
            Ok(v)
        } else {
            Ok(vec![self.domain_ref()?])
        }
    }

    fn domain_ref(&mut self) -> PResult<DomainRef> {
        let pos = self.pos();
        let name = self.ident()?;
        if name == "Seq" && self.eat(&Tok::LParen) {
            let inner = self.domain_ref()?;
            self.expect(&Tok::RParen)?;
            return Ok(DomainRef::Seq(Box::new(inner)));
        }
        if !self.domain_known(&name) {
            return self.err_at(pos, format!("unresolved domain `{name}`"));
        }
        Ok(DomainRef::Named(name))
    }

    fn domain_definition(&mut self) -> PResult<()> {
        self.expect_kw(Kw::Domain)?;
        let pos = self.pos();
        let name = self.ident()?;
        self.expect(&Tok::Eq)?;
        self.expect(&Tok::LBrace)?;
        let ext = if matches!(self.peek(), Tok::Int(_) | Tok::Minus)
            && *self.peek_at(1) == Tok::DotDot
            || (*self.peek() == Tok::Minus && *self.peek_at(2) == Tok::DotDot)
        {
            let lo = self.int_literal()?;
            self.expect(&Tok::DotDot)?;
            let hi = self.int_literal()?;
            if hi < lo {
                return self.err_at(pos, format!("empty range {lo}..{hi}"));
            }
            Extension::Range(lo, hi)
        } else {
            let mut vals = Vec::new();
            loop {
                vals.push(self.literal()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            Extension::Set(vals)
        };
        self.expect(&Tok::RBrace)?;
        let Some(d) = self.domains.iter_mut().find(|d| d.name == name) else {
            return self.err_at(pos, format!("unresolved domain `{name}`"));
        };
        if d.kind != DomainKind::ConcreteSubset {
            return self.err_at(pos, format!("domain `{name}` is not a concrete subset domain"));
        }
        if d.extension.is_some() {
            return self.err_at(pos, format!("duplicate definition of domain `{name}`"));
        }
        d.extension = Some(ext);
        Ok(())
    }

    fn int_literal(&mut self) -> PResult<i64> {
        let neg = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            other => self.err(format!("expected integer, found {other}")),
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        match self.peek().clone() {
            Tok::Int(_) | Tok::Minus => Ok(Literal::Int(self.int_literal()?)),
            Tok::Real(r) => {
                self.bump();
                Ok(Literal::Real(r))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Literal::Str(s))
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(Literal::Bool(true))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(Literal::Bool(false))
            }
            other => self.err(format!("expected literal, found {other}")),
        }
    }

    fn binders(&mut self) -> PResult<Vec<Binder>> {
        let mut v: Vec<Binder> = Vec::new();
        loop {
            let pos = self.pos();
            let var = self.var()?;
            if v.iter().any(|b| b.var == var) {
                return self.err_at(pos, format!("duplicate bound variable `{var}`"));
            }
            self.expect_kw(Kw::In)?;
            let dpos = self.pos();
            let domain = self.ident()?;
            if !self.domain_known(&domain) {
                return self.err_at(dpos, format!("unresolved domain `{domain}`"));
            }
            v.push(Binder { var, domain });
            if !(self.eat(&Tok::Comma) && matches!(self.peek(), Tok::Var(_))) {
                break;
            }
        }
        Ok(v)
    }

    fn function_definition(&mut self) -> PResult<FunctionDef> {
        self.expect_kw(Kw::Function)?;
        let pos = self.pos();
        let name = self.ident()?;
        let params = if self.eat(&Tok::LParen) {
            let b = self.binders()?;
            self.expect(&Tok::RParen)?;
            b
        } else {
            vec![]
        };
        self.expect(&Tok::Eq)?;
        let mark = self.scope.len();
        self.scope.extend(params.iter().map(|b| b.var.clone()));
        let body = self.term()?;
        self.scope.truncate(mark);
        Ok(FunctionDef { name, params, body, pos })
    }

    fn rule_definition(&mut self) -> PResult<RuleDef> {
        let is_macro = self.eat_kw(Kw::Macro);
        self.expect_kw(Kw::Rule)?;
        let pos = self.pos();
        let name = self.ident()?;
        if !name.starts_with("r_") {
            return self.err_at(pos, format!("rule name `{name}` must begin with `r_`"));
        }
        let params = if self.eat(&Tok::LParen) {
            let b = self.binders()?;
            self.expect(&Tok::RParen)?;
            b
        } else {
            vec![]
        };
        self.expect(&Tok::Eq)?;
        let mark = self.scope.len();
        self.scope.extend(params.iter().map(|b| b.var.clone()));
        let body = self.rule()?;
        self.scope.truncate(mark);
        Ok(RuleDef { name, params, body, is_macro, pos })
    }

    fn ltl_spec(&mut self) -> PResult<LtlSpecDecl> {
        self.expect_kw(Kw::Ltlspec)?;
        if !self.is_ident("NAME") {
            return self.err("expected `NAME` after `LTLSPEC`");
        }
        self.bump();
        let pos = self.pos();
        let name = self.ident()?;
        self.expect(&Tok::Assign)?;
        let start = self.i;
        let formula = self.ltl()?;
        let text = self.text_since(start);
        Ok(LtlSpecDecl { name, formula, text, pos })
    }

    fn invariant(&mut self) -> PResult<InvariantDecl> {
        let pos = self.pos();
        self.expect_kw(Kw::Invariant)?;
        let name = if let Tok::Ident(_) = self.peek() { Some(self.ident()?) } else { None };
        self.expect_kw(Kw::Over)?;
        let mut over = Vec::new();
        loop {
            let opos = self.pos();
            let id = self.ident()?;
            if self.function(&id).is_none() && !self.domain_known(&id) {
                return self.err_at(opos, format!("unresolved name `{id}`"));
            }
            over.push(id);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Colon)?;
        let start = self.i;
        let body = self.term()?;
        let text = self.text_since(start);
        Ok(InvariantDecl { name, over, body, text, pos })
    }

    fn init_section(&mut self) -> PResult<InitDecl> {
        let pos = self.pos();
        self.expect_kw(Kw::Default)?;
        self.expect_kw(Kw::Init)?;
        let name = self.ident()?;
        self.expect(&Tok::Colon)?;
        let mut entries = Vec::new();
        let mut agent_bindings = Vec::new();
        loop {
            let epos = self.pos();
            if self.eat_kw(Kw::Function) {
                let fpos = self.pos();
                let function = self.ident()?;
                if self.function(&function).is_none() {
                    return self.err_at(fpos, format!("unresolved name `{function}`"));
                }
                let binders = if *self.peek() == Tok::LParen && matches!(self.peek_at(1), Tok::Var(_))
                {
                    self.bump();
                    let b = self.binders()?;
                    self.expect(&Tok::RParen)?;
                    Some(b)
                } else {
                    None
                };
                let entry = match binders {
                    Some(binders) => {
                        self.expect(&Tok::Eq)?;
                        let mark = self.scope.len();
                        self.scope.extend(binders.iter().map(|b| b.var.clone()));
                        let value = self.term()?;
                        self.scope.truncate(mark);
                        let is_case_on_binder = matches!(
                            &value,
                            TermAst::Case(s, _, _, _)
                                if matches!(s.as_ref(), TermAst::Var(v, _) if binders.len() == 1 && *v == binders[0].var)
                        );
                        if is_case_on_binder {
                            InitEntry::Conditional { function, binders, cases: value, pos: epos }
                        } else {
                            InitEntry::Group { function, binders, value, pos: epos }
                        }
                    }
                    None => {
                        let args = if self.eat(&Tok::LParen) {
                            let a = self.term_list(&Tok::RParen)?;
                            self.expect(&Tok::RParen)?;
                            a
                        } else {
                            vec![]
                        };
                        self.expect(&Tok::Eq)?;
                        let value = self.term()?;
                        InitEntry::Simple {
                            location: TermAst::App(function, args, fpos),
                            value,
                            pos: epos,
                        }
                    }
                };
                entries.push(entry);
            } else if self.eat_kw(Kw::Agent) {
                let dpos = self.pos();
                let dom = self.ident()?;
                if !self.domain_known(&dom) {
                    return self.err_at(dpos, format!("unresolved domain `{dom}`"));
                }
                self.expect(&Tok::Colon)?;
                let rule = self.ident()?;
                self.expect(&Tok::LBrack)?;
                self.expect(&Tok::RBrack)?;
                agent_bindings.push((dom, rule));
            } else {
                break;
            }
        }
        Ok(InitDecl { name, entries, agent_bindings, pos })
    }

    // ---- rules ----------------------------------------------------------

    fn rule(&mut self) -> PResult<RuleAst> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Kw(Kw::Skip) => {
                self.bump();
                Ok(RuleAst::Skip(pos))
            }
            Tok::Kw(Kw::Par) | Tok::Kw(Kw::Seq) => {
                let is_par = self.is_kw(Kw::Par);
                self.bump();
                let end = if is_par { Kw::Endpar } else { Kw::Endseq };
                let mut rs = Vec::new();
                while !self.is_kw(end) {
                    if *self.peek() == Tok::Eof {
                        return self.err_at(pos, "unterminated block rule");
                    }
                    rs.push(self.rule()?);
                }
                self.bump();
                if rs.is_empty() {
                    return self.err_at(pos, "empty block rule");
                }
                Ok(if is_par { RuleAst::Par(rs, pos) } else { RuleAst::Seq(rs, pos) })
            }
            Tok::Kw(Kw::If) => {
                self.bump();
                let c = self.term()?;
                self.expect_kw(Kw::Then)?;
                let t = self.rule()?;
                let e = if self.eat_kw(Kw::Else) { Some(Box::new(self.rule()?)) } else { None };
                self.expect_kw(Kw::Endif)?;
                Ok(RuleAst::Cond(c, Box::new(t), e, pos))
            }
            Tok::Kw(Kw::Switch) => {
                self.bump();
                let s = self.term()?;
                let mut branches = Vec::new();
                while self.eat_kw(Kw::Case) {
                    let v = self.term()?;
                    self.expect(&Tok::Colon)?;
                    branches.push((v, self.rule()?));
                }
                let other = if self.eat_kw(Kw::Otherwise) {
                    self.eat(&Tok::Colon);
                    Some(Box::new(self.rule()?))
                } else {
                    None
                };
                self.expect_kw(Kw::Endswitch)?;
                Ok(RuleAst::Case(s, branches, other, pos))
            }
            Tok::Kw(Kw::Choose) => {
                self.bump();
                let bs = self.binders()?;
                let mark = self.scope.len();
                self.scope.extend(bs.iter().map(|b| b.var.clone()));
                self.expect_kw(Kw::With)?;
                let c = self.term()?;
                self.expect_kw(Kw::Do)?;
                let body = self.rule()?;
                self.scope.truncate(mark);
                let none = if self.eat_kw(Kw::Ifnone) { Some(Box::new(self.rule()?)) } else { None };
                self.eat_kw(Kw::Endchoose);
                Ok(RuleAst::Choose(bs, c, Box::new(body), none, pos))
            }
            Tok::Kw(Kw::Forall) => {
                self.bump();
                let bs = self.binders()?;
                let mark = self.scope.len();
                self.scope.extend(bs.iter().map(|b| b.var.clone()));
                self.expect_kw(Kw::With)?;
                let c = self.term()?;
                self.expect_kw(Kw::Do)?;
                let body = self.rule()?;
                self.scope.truncate(mark);
                self.eat_kw(Kw::Endforall);
                Ok(RuleAst::Forall(bs, c, Box::new(body), pos))
            }
            Tok::Kw(Kw::Let) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let mut bindings: Vec<(String, TermAst)> = Vec::new();
                loop {
                    let vpos = self.pos();
                    let v = self.var()?;
                    if bindings.iter().any(|(b, _)| *b == v) {
                        return self.err_at(vpos, format!("duplicate bound variable `{v}`"));
                    }
                    self.expect(&Tok::Eq)?;
                    let t = self.term()?;
                    bindings.push((v, t));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::RParen)?;
                self.expect_kw(Kw::In)?;
                let mark = self.scope.len();
                self.scope.extend(bindings.iter().map(|(v, _)| v.clone()));
                let body = self.rule()?;
                self.scope.truncate(mark);
                self.expect_kw(Kw::Endlet)?;
                Ok(RuleAst::Let(bindings, Box::new(body), pos))
            }
            Tok::Kw(Kw::Program) => {
                self.bump();
                self.expect(&Tok::LParen)?;
                let t = self.term()?;
                self.expect(&Tok::RParen)?;
                Ok(RuleAst::ProgramCall(t, pos))
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::LBrack => {
                self.bump();
                self.bump();
                let args = self.term_list(&Tok::RBrack)?;
                self.expect(&Tok::RBrack)?;
                Ok(RuleAst::MacroCall(name, args, pos))
            }
            Tok::Ident(w) if w == "turbo" || w == "result" => {
                self.err(format!("unsupported syntax: `{w}`"))
            }
            Tok::Ident(_) | Tok::Var(_) => {
                let lhs = self.primary()?;
                if !matches!(lhs, TermAst::App(..) | TermAst::Var(..)) {
                    return self.err_at(pos, "update target must be a location or variable");
                }
                if let TermAst::App(name, _, _) = &lhs {
                    if self.function(name).is_none() {
                        return self.err_at(pos, format!("`{name}` is not an updatable location"));
                    }
                }
                self.expect(&Tok::Assign)?;
                let rhs = self.term()?;
                Ok(RuleAst::Update(lhs, rhs, pos))
            }
            other => self.err(format!("expected rule, found {other}")),
        }
    }

    fn term_list(&mut self, close: &Tok) -> PResult<Vec<TermAst>> {
        let mut v = Vec::new();
        if self.peek() == close {
            return Ok(v);
        }
        loop {
            v.push(self.term()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(v)
    }

    // ---- terms ----------------------------------------------------------

    pub(crate) fn term(&mut self) -> PResult<TermAst> {
        self.binary(1)
    }

    fn binop_here(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Kw(Kw::Implies) => BinOp::Implies,
            Tok::Kw(Kw::Iff) => BinOp::Iff,
            Tok::Kw(Kw::Or) => BinOp::Or,
            Tok::Kw(Kw::Xor) => BinOp::Xor,
            Tok::Kw(Kw::And) => BinOp::And,
            Tok::Eq => BinOp::Eq,
            Tok::Neq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Kw(Kw::Mod) => BinOp::Mod,
            _ => return None,
        })
    }

    /// Precedence climbing; all binary operators are left-associative.
    fn binary(&mut self, min_prec: u8) -> PResult<TermAst> {
        let mut lhs = if min_prec <= 4 && self.is_kw(Kw::Not) {
            let pos = self.pos();
            self.bump();
            let operand = self.binary(4)?;
            TermAst::Un(UnOp::Not, Box::new(operand), pos)
        } else {
            self.unary()?
        };
        while let Some(op) = self.binop_here() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let pos = self.pos();
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = TermAst::Bin(op, Box::new(lhs), Box::new(rhs), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<TermAst> {
        let pos = self.pos();
        if self.eat(&Tok::Minus) {
            if let Tok::Int(v) = self.peek().clone() {
                self.bump();
                return Ok(TermAst::Lit(Literal::Int(-v), pos));
            }
            let t = self.unary()?;
            return Ok(TermAst::Un(UnOp::Neg, Box::new(t), pos));
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<TermAst> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(TermAst::Lit(Literal::Int(v), pos))
            }
            Tok::Real(v) => {
                self.bump();
                Ok(TermAst::Lit(Literal::Real(v), pos))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(TermAst::Lit(Literal::Str(s), pos))
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                Ok(TermAst::Lit(Literal::Bool(true), pos))
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                Ok(TermAst::Lit(Literal::Bool(false), pos))
            }
            Tok::Kw(Kw::Undef) => {
                self.bump();
                Ok(TermAst::Lit(Literal::Undef, pos))
            }
            Tok::Kw(Kw::SelfKw) => {
                self.bump();
                Ok(TermAst::SelfRef(pos))
            }
            Tok::Kw(Kw::Not) => {
                self.bump();
                let t = self.primary()?;
                Ok(TermAst::Un(UnOp::Not, Box::new(t), pos))
            }
            Tok::Var(v) => {
                self.bump();
                if !self.scope.contains(&v) {
                    return self.err_at(pos, format!("unresolved variable `{v}`"));
                }
                Ok(TermAst::Var(v, pos))
            }
            Tok::LParen => {
                self.bump();
                let t = if matches!(self.peek(), Tok::Kw(Kw::Forall | Kw::Exists)) {
                    self.quantified()?
                } else {
                    self.term()?
                };
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::Kw(Kw::Forall | Kw::Exists) => self.quantified(),
            Tok::LBrack => {
                self.bump();
                let items = self.term_list(&Tok::RBrack)?;
                self.expect(&Tok::RBrack)?;
                Ok(TermAst::SeqLit(items, pos))
            }
            Tok::Kw(Kw::If) => {
                self.bump();
                let c = self.term()?;
                self.expect_kw(Kw::Then)?;
                let t = self.term()?;
                let e = if self.eat_kw(Kw::Else) { Some(Box::new(self.term()?)) } else { None };
                self.expect_kw(Kw::Endif)?;
                Ok(TermAst::Cond(Box::new(c), Box::new(t), e, pos))
            }
            Tok::Kw(Kw::Switch) => {
                self.bump();
                let s = self.term()?;
                let mut branches = Vec::new();
                while self.eat_kw(Kw::Case) {
                    let v = self.term()?;
                    self.expect(&Tok::Colon)?;
                    branches.push((v, self.term()?));
                }
                let other = if self.eat_kw(Kw::Otherwise) {
                    self.eat(&Tok::Colon);
                    Some(Box::new(self.term()?))
                } else {
                    None
                };
                self.expect_kw(Kw::Endswitch)?;
                Ok(TermAst::Case(Box::new(s), branches, other, pos))
            }
            Tok::Ident(name) => {
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.bump();
                    let a = self.term_list(&Tok::RParen)?;
                    self.expect(&Tok::RParen)?;
                    Some(a)
                } else {
                    None
                };
                self.resolve_ident(name, args, pos)
            }
            other => self.err(format!("expected term, found {other}")),
        }
    }

    fn quantified(&mut self) -> PResult<TermAst> {
        let pos = self.pos();
        let is_forall = self.is_kw(Kw::Forall);
        self.bump();
        let bs = self.binders()?;
        let mark = self.scope.len();
        self.scope.extend(bs.iter().map(|b| b.var.clone()));
        self.expect_kw(Kw::With)?;
        let body = self.term()?;
        self.scope.truncate(mark);
        Ok(if is_forall {
            TermAst::Forall(bs, Box::new(body), pos)
        } else {
            TermAst::Exists(bs, Box::new(body), pos)
        })
    }

    fn resolve_ident(
        &mut self,
        name: String,
        args: Option<Vec<TermAst>>,
        pos: Pos,
    ) -> PResult<TermAst> {
        if name == "isUndef" {
            return match args {
                Some(mut a) if a.len() == 1 => Ok(TermAst::IsUndef(Box::new(a.remove(0)), pos)),
                _ => self.err_at(pos, "isUndef takes exactly one argument"),
            };
        }
        if let Some(f) = self.function(&name) {
            let args = args.unwrap_or_default();
            if args.len() != f.arg_domains.len() {
                return self.err_at(
                    pos,
                    format!(
                        "function `{name}` expects {} argument(s), got {}",
                        f.arg_domains.len(),
                        args.len()
                    ),
                );
            }
            return Ok(TermAst::App(name, args, pos));
        }
        if self.enum_elems.contains_key(&name) {
            if args.is_some() {
                return self.err_at(pos, format!("enum element `{name}` cannot be applied"));
            }
            return Ok(TermAst::EnumElem(name, pos));
        }
        if let Some(arity) = seq_builtin_arity(&name) {
            let args = args.unwrap_or_default();
            if args.len() != arity {
                return self.err_at(
                    pos,
                    format!("`{name}` expects {arity} argument(s), got {}", args.len()),
                );
            }
            return Ok(TermAst::App(name, args, pos));
        }
        self.err_at(pos, format!("unresolved name `{name}`"))
    }

    // ---- LTL ------------------------------------------------------------

    fn ltl(&mut self) -> PResult<LtlAst> {
        self.ltl_binary(1)
    }

    fn ltl_binop_here(&self) -> Option<(BinOp, u8)> {
        match self.peek() {
            Tok::Kw(Kw::Implies) => Some((BinOp::Implies, 1)),
            Tok::Kw(Kw::Iff) => Some((BinOp::Iff, 1)),
            Tok::Kw(Kw::Or) => Some((BinOp::Or, 2)),
            Tok::Kw(Kw::Xor) => Some((BinOp::Xor, 2)),
            Tok::Kw(Kw::And) => Some((BinOp::And, 3)),
            _ => None,
        }
    }

    fn ltl_binary(&mut self, min_prec: u8) -> PResult<LtlAst> {
        let mut lhs = self.ltl_until()?;
        while let Some((op, prec)) = self.ltl_binop_here() {
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.ltl_binary(prec + 1)?;
            lhs = LtlAst::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    /// Infix `u` / `v` bind tighter than the boolean connectives.
    fn ltl_until(&mut self) -> PResult<LtlAst> {
        let mut lhs = self.ltl_unary()?;
        loop {
            let until = if self.is_ident("u") {
                true
            } else if self.is_ident("v") {
                false
            } else {
                break;
            };
            self.bump();
            let rhs = self.ltl_unary()?;
            lhs = if until {
                LtlAst::Until(Box::new(lhs), Box::new(rhs))
            } else {
                LtlAst::Release(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn ltl_unary(&mut self) -> PResult<LtlAst> {
        if self.eat_kw(Kw::Not) {
            return Ok(LtlAst::Not(Box::new(self.ltl_unary()?)));
        }
        if let Tok::Ident(w) = self.peek().clone() {
            if matches!(w.as_str(), "g" | "f" | "u" | "v") && *self.peek_at(1) == Tok::LParen {
                self.bump();
                self.bump();
                let a = self.ltl()?;
                let r = match w.as_str() {
                    "g" => LtlAst::Always(Box::new(a)),
                    "f" => LtlAst::Eventually(Box::new(a)),
                    _ => {
                        self.expect(&Tok::Comma)?;
                        let b = self.ltl()?;
                        if w == "u" {
                            LtlAst::Until(Box::new(a), Box::new(b))
                        } else {
                            LtlAst::Release(Box::new(a), Box::new(b))
                        }
                    }
                };
                self.expect(&Tok::RParen)?;
                return Ok(r);
            }
        }
        if *self.peek() == Tok::LParen && !matches!(self.peek_at(1), Tok::Kw(Kw::Forall | Kw::Exists))
        {
            let save = self.i;
            self.bump();
            if let Ok(inner) = self.ltl() {
                if self.eat(&Tok::RParen) && !self.continues_term() {
                    return Ok(inner);
                }
            }
            self.i = save;
        }
        Ok(LtlAst::Atom(self.binary(5)?))
    }

    /// True when the next token continues an arithmetic or relational term,
    /// meaning a parenthesized group was a term operand, not a formula.
    fn continues_term(&self) -> bool {
        matches!(self.binop_here(), Some(op) if op.precedence() >= 5)
    }
}

fn resolve_rule_names(m: &ModelAst) -> Result<(), FrontendError> {
    let mut arity: HashMap<&str, usize> = HashMap::new();
    for r in &m.rules {
        arity.insert(&r.name, r.params.len());
    }
    let mut err = None;
    let mut check = |r: &RuleAst| {
        if err.is_some() {
            return;
        }
        if let RuleAst::MacroCall(name, args, pos) = r {
            match arity.get(name.as_str()) {
                None => {
                    err = Some(FrontendError::parse(
                        pos.line,
                        pos.col,
                        format!("unresolved rule `{name}`"),
                    ))
                }
                Some(&n) if n != args.len() => {
                    err = Some(FrontendError::parse(
                        pos.line,
                        pos.col,
                        format!("rule `{name}` expects {n} argument(s), got {}", args.len()),
                    ))
                }
                _ => {}
            }
        }
    };
    for r in &m.rules {
        r.body.walk_rules(&mut check);
    }
    m.main_rule.body.walk_rules(&mut check);
    if let Some(e) = err {
        return Err(e);
    }
    if let Some(init) = &m.init {
        for (dom, rule) in &init.agent_bindings {
            if !arity.contains_key(rule.as_str()) {
                return Err(FrontendError::parse(
                    init.pos.line,
                    init.pos.col,
                    format!("unresolved rule `{rule}` bound to agent domain `{dom}`"),
                ));
            }
        }
    }
    let mut seen = HashSet::new();
    for inv in &m.invariants {
        if let Some(n) = &inv.name {
            if !seen.insert(n.clone()) || m.ltl_specs.iter().any(|s| &s.name == n) {
                return Err(FrontendError::parse(
                    inv.pos.line,
                    inv.pos.col,
                    format!("duplicate declaration of property `{n}`"),
                ));
            }
        }
    }
    Ok(())
}

/// Collapses whitespace runs and drops spaces just inside parentheses.
pub fn normalize_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for ch in s.chars() {
        if ch.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() && !out.ends_with('(') && ch != ')' {
            out.push(' ');
        }
        pending_space = false;
        out.push(ch);
    }
    out
}
