use crate::rdf::term::is_valid_language;
use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::{iri, Iri, Literal, PrefixError, PrefixTable, Term};

use super::{CompareOp, FilterExpr, OrderKey, Query, QueryError, TriplePattern, VarOrTerm, Variable};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Var(String),
    IriRef(String),
    PName(String, String),
    Blank(String),
    Str(String),
    LangTag(String),
    Number(String, &'static str),
    Word(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

const PUNCT: &[&str] = &[
    "^^", "<=", ">=", "!=", "&&", "||", "{", "}", "(", ")", "[", "]", ".", ";", ",", "*", "=", "<",
    ">", "!", "/", "|", "^", "+", "-", "?", "$",
];

fn lex(text: &str) -> Result<Vec<Token>, QueryError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    let err = |offset: usize, message: String| syntax(text, offset, message);
    while pos < text.len() {
        let rest = &text[pos..];
        let c = rest.chars().next().expect("non-empty");
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        if c == '#' {
            pos += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        let start = pos;
        let tok = if (c == '?' || c == '$')
            && rest[1..].chars().next().is_some_and(is_varname_char)
        {
            let len = 1 + rest[1..].find(|ch: char| !is_varname_char(ch)).unwrap_or(rest.len() - 1);
            pos += len;
            Tok::Var(rest[1..len].to_owned())
        } else if c == '<' && iriref_len(rest).is_some() {
            let len = iriref_len(rest).expect("checked");
            pos += len;
            Tok::IriRef(rest[1..len - 1].to_owned())
        } else if c == '"' || c == '\'' {
            if rest.starts_with("\"\"\"") || rest.starts_with("'''") {
                return Err(unsupported(text, start, "long string literals"));
            }
            let (value, len) = lex_string(rest, c).map_err(|(off, m)| err(start + off, m))?;
            pos += len;
            Tok::Str(value)
        } else if c == '@' {
            let len = 1 + rest[1..]
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '-'))
                .unwrap_or(rest.len() - 1);
            let tag = rest[1..len].to_ascii_lowercase();
            if matches!(tokens.last(), Some(Token { tok: Tok::Str(_), .. })) && is_valid_language(&tag) {
                pos += len;
                Tok::LangTag(tag)
            } else {
                return Err(err(start, format!("unexpected language tag @{}", &rest[1..len])));
            }
        } else if c == '_' && rest.starts_with("_:") {
            let len = 2 + rest[2..]
                .find(|ch: char| !(ch.is_alphanumeric() || matches!(ch, '_' | '-' | '.')))
                .unwrap_or(rest.len() - 2);
            let label = rest[2..len].trim_end_matches('.');
            if label.is_empty() {
                return Err(err(start, "empty blank node label".into()));
            }
            pos += 2 + label.len();
            Tok::Blank(label.to_owned())
        } else if c.is_ascii_digit()
            || ((c == '+' || c == '-' || c == '.')
                && rest[1..].starts_with(|ch: char| ch.is_ascii_digit())
                && !matches!(tokens.last().map(|t| &t.tok), Some(Tok::Number(..))))
        {
            let (lexical, datatype, len) = lex_number(rest);
            pos += len;
            Tok::Number(lexical, datatype)
        } else if c.is_alphabetic() || c == ':' {
            let len = rest
                .find(|ch: char| !(ch.is_alphanumeric() || matches!(ch, '_' | '-' | '.' | ':')))
                .unwrap_or(rest.len());
            let word = rest[..len].trim_end_matches('.');
            pos += word.len();
            match word.split_once(':') {
                Some((prefix, local)) => Tok::PName(prefix.to_owned(), local.to_owned()),
                None => Tok::Word(word.to_owned()),
            }
        } else if let Some(p) = PUNCT.iter().find(|p| rest.starts_with(**p)) {
            pos += p.len();
            Tok::Punct(p)
        } else {
            return Err(err(start, format!("unexpected character {c:?}")));
        };
        debug_assert!(pos > start && bytes.len() >= pos);
        tokens.push(Token { tok, offset: start });
    }
    tokens.push(Token { tok: Tok::Eof, offset: text.len() });
    Ok(tokens)
}

fn is_varname_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn iriref_len(rest: &str) -> Option<usize> {
    for (i, c) in rest.char_indices().skip(1) {
        match c {
            '>' => return Some(i + 1),
            c if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') => {
                return None;
            }
            _ => {}
        }
    }
    None
}

fn lex_string(rest: &str, quote: char) -> Result<(String, usize), (usize, String)> {
    let mut value = String::new();
    let mut chars = rest.char_indices().skip(1);
    while let Some((i, c)) = chars.next() {
        match c {
            c if c == quote => return Ok((value, i + 1)),
            '\n' | '\r' => return Err((i, "newline in string literal".into())),
            '\\' => {
                let Some((_, e)) = chars.next() else { break };
                let decoded = match e {
                    't' => '\t',
                    'n' => '\n',
                    'r' => '\r',
                    'b' => '\u{8}',
                    'f' => '\u{c}',
                    '"' => '"',
                    '\'' => '\'',
                    '\\' => '\\',
                    'u' | 'U' => {
                        let n = if e == 'u' { 4 } else { 8 };
                        let hex: String = (0..n).filter_map(|_| chars.next().map(|(_, h)| h)).collect();
                        u32::from_str_radix(&hex, 16)
                            .ok()
                            .filter(|_| hex.len() == n)
                            .and_then(char::from_u32)
                            .ok_or((i, "malformed unicode escape".to_string()))?
                    }
                    other => return Err((i, format!("invalid escape \\{other}"))),
                };
                value.push(decoded);
            }
            c => value.push(c),
        }
    }
    Err((0, "unterminated string literal".into()))
}

fn lex_number(rest: &str) -> (String, &'static str, usize) {
    let b = rest.as_bytes();
    let mut i = 0;
    if matches!(b[0], b'+' | b'-') {
        i += 1;
    }
    let digits = |mut i: usize| {
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        i
    };
    i = digits(i);
    let mut datatype = xsd::INTEGER;
    if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
        i = digits(i + 1);
        datatype = xsd::DECIMAL;
    }
    if i < b.len() && matches!(b[i], b'e' | b'E') {
        let mut j = i + 1;
        if j < b.len() && matches!(b[j], b'+' | b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            i = digits(j);
            datatype = xsd::DOUBLE;
        }
    }
    (rest[..i].to_owned(), datatype, i)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn syntax(text: &str, offset: usize, message: String) -> QueryError {
    let (line, column) = line_col(text, offset);
    QueryError::Syntax { offset, line, column, message }
}

fn unsupported(text: &str, offset: usize, feature: &str) -> QueryError {
    let (line, column) = line_col(text, offset);
    QueryError::Unsupported { feature: feature.to_owned(), line, column }
}

/// Parses query text, expanding prefixed names against `prefixes` plus any
/// `PREFIX` declarations in the query itself.
pub fn parse_query(text: &str, prefixes: &PrefixTable) -> Result<Query, QueryError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        text,
        tokens,
        pos: 0,
        prefixes: prefixes.clone(),
        patterns: Vec::new(),
        filters: Vec::new(),
        fresh: 0,
    };
    parser.query()
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    prefixes: PrefixTable,
    patterns: Vec<TriplePattern>,
    filters: Vec<FilterExpr>,
    fresh: usize,
}

const UNSUPPORTED_GROUP_KEYWORDS: &[(&str, &str)] = &[
    ("OPTIONAL", "OPTIONAL"),
    ("UNION", "UNION"),
    ("MINUS", "MINUS"),
    ("GRAPH", "GRAPH"),
    ("SERVICE", "SERVICE"),
    ("BIND", "BIND"),
    ("VALUES", "VALUES"),
    ("SELECT", "subqueries"),
];

const AGGREGATES: &[&str] = &["COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].offset
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, message: impl Into<String>) -> QueryError {
        syntax(self.text, self.offset(), message.into())
    }

    fn unexpected(&self, expected: &str) -> QueryError {
        let found = match self.peek() {
            Tok::Eof => "end of query".to_owned(),
            _ => {
                let start = self.offset();
                let end = self.tokens.get(self.pos + 1).map_or(self.text.len(), |t| t.offset);
                format!("{:?}", self.text[start..end].trim())
            }
        };
        self.error(format!("expected {expected}, found {found}"))
    }

    fn unsupported(&self, feature: &str) -> QueryError {
        unsupported(self.text, self.offset(), feature)
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Word(w) if w.eq_ignore_ascii_case(word))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_word(&mut self, word: &str) -> bool {
        let hit = self.is_word(word);
        if hit {
            self.advance();
        }
        hit
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.advance();
        }
        hit
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), QueryError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{p}'")))
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        self.prologue()?;
        for form in ["CONSTRUCT", "ASK", "DESCRIBE"] {
            if self.is_word(form) {
                return Err(self.unsupported(&format!("{form} queries")));
            }
        }
        if !self.eat_word("SELECT") {
            return Err(self.unexpected("SELECT"));
        }
        if self.is_word("REDUCED") {
            return Err(self.unsupported("REDUCED"));
        }
        let distinct = self.eat_word("DISTINCT");
        let mut projection = Vec::new();
        let mut select_all = false;
        if self.eat_punct("*") {
            select_all = true;
        } else {
            loop {
                match self.peek().clone() {
                    Tok::Var(name) => {
                        self.advance();
                        projection.push(Variable::new(name));
                    }
                    Tok::Punct("(") => {
                        let is_aggregate = matches!(self.peek_at(1),
                            Tok::Word(w) if AGGREGATES.iter().any(|a| w.eq_ignore_ascii_case(a)));
                        return Err(self.unsupported(if is_aggregate {
                            "aggregates"
                        } else {
                            "SELECT expressions"
                        }));
                    }
                    _ => break,
                }
            }
            if projection.is_empty() {
                return Err(self.unexpected("a projected variable or '*'"));
            }
        }
        if self.is_word("FROM") {
            return Err(self.unsupported("FROM"));
        }
        self.eat_word("WHERE");
        self.group()?;
        let order = self.solution_modifiers()?;
        if !matches!(self.peek(), Tok::Eof) {
            return Err(self.unexpected("end of query"));
        }
        if select_all {
            for pattern in &self.patterns {
                for v in pattern.variables() {
                    if !v.is_anonymous() && !projection.contains(v) {
                        projection.push(v.clone());
                    }
                }
            }
        }
        Ok(Query {
            projection,
            distinct,
            patterns: std::mem::take(&mut self.patterns),
            filters: std::mem::take(&mut self.filters),
            order,
        })
    }

    fn prologue(&mut self) -> Result<(), QueryError> {
        loop {
            if self.is_word("BASE") {
                return Err(self.unsupported("BASE"));
            }
            if !self.eat_word("PREFIX") {
                return Ok(());
            }
            let prefix = match self.advance() {
                Tok::PName(prefix, local) if local.is_empty() => prefix,
                _ => {
                    self.pos -= 1;
                    return Err(self.unexpected("a prefix declaration like 'ex:'"));
                }
            };
            let Tok::IriRef(value) = self.peek().clone() else {
                return Err(self.unexpected("an IRI"));
            };
            let namespace = Iri::new(value).map_err(|e| self.error(e.to_string()))?;
            self.advance();
            self.prefixes.insert(&prefix, namespace).map_err(|e| self.error(e.to_string()))?;
        }
    }

    fn group(&mut self) -> Result<(), QueryError> {
        self.expect_punct("{")?;
        loop {
            if self.eat_punct("}") {
                return Ok(());
            }
            if self.eat_punct(".") {
                continue;
            }
            if self.is_punct("{") {
                return Err(if matches!(self.peek_at(1), Tok::Word(w) if w.eq_ignore_ascii_case("SELECT")) {
                    self.unsupported("subqueries")
                } else {
                    self.unsupported("nested group patterns")
                });
            }
            if let Tok::Word(w) = self.peek() {
                if let Some((_, feature)) =
                    UNSUPPORTED_GROUP_KEYWORDS.iter().find(|(k, _)| w.eq_ignore_ascii_case(k))
                {
                    return Err(self.unsupported(feature));
                }
            }
            if self.eat_word("FILTER") {
                self.filter()?;
                continue;
            }
            if matches!(self.peek(), Tok::Eof) {
                return Err(self.unexpected("'}'"));
            }
            self.triples_same_subject()?;
            if !(self.is_punct(".") || self.is_punct("}") || self.is_word("FILTER")) {
                // Let the keyword checks above report unsupported features.
                if matches!(self.peek(), Tok::Word(_)) && !self.is_word("a") {
                    continue;
                }
                return Err(self.unexpected("'.' or '}'"));
            }
        }
    }

    fn triples_same_subject(&mut self) -> Result<(), QueryError> {
        if self.is_punct("[") {
            let subject = self.bracketed_node()?;
            // `[ ... ] .` alone is a complete statement.
            if self.is_punct(".") || self.is_punct("}") {
                return Ok(());
            }
            return self.property_list(&subject);
        }
        if self.is_punct("(") {
            return Err(self.unsupported("RDF collections"));
        }
        let subject = self.var_or_term("a subject")?;
        if let VarOrTerm::Term(Term::Literal(_)) = subject {
            return Err(self.error("a literal cannot be a subject"));
        }
        self.property_list(&subject)
    }

    fn property_list(&mut self, subject: &VarOrTerm) -> Result<(), QueryError> {
        loop {
            let predicate = self.verb()?;
            loop {
                // Patterns from a bracketed object follow the pattern that uses it.
                let slot = self.patterns.len();
                let object = self.object()?;
                let nested: Vec<_> = self.patterns.drain(slot..).collect();
                self.patterns.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                self.patterns.extend(nested);
                if !self.eat_punct(",") {
                    break;
                }
            }
            if !self.eat_punct(";") {
                return Ok(());
            }
            while self.eat_punct(";") {}
            if self.is_punct(".") || self.is_punct("]") || self.is_punct("}") {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<VarOrTerm, QueryError> {
        if self.is_punct("^") || self.is_punct("!") || self.is_punct("(") {
            return Err(self.unsupported("property paths"));
        }
        let verb = if self.eat_word("a") {
            VarOrTerm::Term(Term::Iri(iri(rdf::TYPE)))
        } else {
            match self.var_or_term("a predicate")? {
                v @ VarOrTerm::Var(_) => v,
                t @ VarOrTerm::Term(Term::Iri(_)) => t,
                _ => return Err(self.error("predicate must be an IRI or variable")),
            }
        };
        if ["/", "|", "*", "+", "?", "^"].iter().any(|p| self.is_punct(p)) {
            return Err(self.unsupported("property paths"));
        }
        Ok(verb)
    }

    fn object(&mut self) -> Result<VarOrTerm, QueryError> {
        if self.is_punct("[") {
            return self.bracketed_node();
        }
        if self.is_punct("(") {
            return Err(self.unsupported("RDF collections"));
        }
        self.var_or_term("an object")
    }

    /// `[ p o ; ... ]` becomes a fresh anonymous variable plus its patterns.
    fn bracketed_node(&mut self) -> Result<VarOrTerm, QueryError> {
        self.expect_punct("[")?;
        let node = VarOrTerm::Var(Variable::new(format!(".b{}", self.fresh)));
        self.fresh += 1;
        if !self.eat_punct("]") {
            self.property_list(&node)?;
            self.expect_punct("]")?;
        }
        Ok(node)
    }

    fn var_or_term(&mut self, what: &str) -> Result<VarOrTerm, QueryError> {
        let offset = self.offset();
        let term = match self.peek().clone() {
            Tok::Var(name) => {
                self.advance();
                return Ok(VarOrTerm::Var(Variable::new(name)));
            }
            Tok::Blank(label) => {
                self.advance();
                return Ok(VarOrTerm::Var(Variable::new(format!("._{label}"))));
            }
            Tok::IriRef(value) => {
                let iri = Iri::new(value).map_err(|e| self.error(e.to_string()))?;
                self.advance();
                Term::Iri(iri)
            }
            Tok::PName(prefix, local) => {
                let iri = self.expand(&prefix, &local, offset)?;
                self.advance();
                Term::Iri(iri)
            }
            Tok::Str(value) => {
                self.advance();
                match self.peek().clone() {
                    Tok::LangTag(tag) => {
                        self.advance();
                        Term::Literal(Literal::lang(value, &tag).map_err(|e| self.error(e.to_string()))?)
                    }
                    Tok::Punct("^^") => {
                        self.advance();
                        let dt_offset = self.offset();
                        let datatype = match self.advance() {
                            Tok::IriRef(v) => Iri::new(v).map_err(|e| syntax(self.text, dt_offset, e.to_string()))?,
                            Tok::PName(prefix, local) => self.expand(&prefix, &local, dt_offset)?,
                            _ => return Err(syntax(self.text, dt_offset, "expected a datatype IRI".into())),
                        };
                        Term::Literal(Literal::typed(value, datatype))
                    }
                    _ => Term::Literal(Literal::string(value)),
                }
            }
            Tok::Number(lexical, datatype) => {
                self.advance();
                Term::Literal(Literal::typed(lexical, iri(datatype)))
            }
            Tok::Word(w) if w.eq_ignore_ascii_case("true") || w.eq_ignore_ascii_case("false") => {
                self.advance();
                Term::Literal(Literal::typed(w.to_ascii_lowercase(), iri(xsd::BOOLEAN)))
            }
            _ => return Err(self.unexpected(what)),
        };
        Ok(VarOrTerm::Term(term))
    }

    fn expand(&self, prefix: &str, local: &str, offset: usize) -> Result<Iri, QueryError> {
        let curie = format!("{prefix}:{local}");
        match self.prefixes.expand_curie(&curie) {
            Ok(iri) => Ok(iri),
            Err(PrefixError::UnknownPrefix(_)) => {
                let (line, column) = line_col(self.text, offset);
                Err(QueryError::UnknownPrefix { prefix: prefix.to_owned(), line, column })
            }
            Err(e) => Err(syntax(self.text, offset, e.to_string())),
        }
    }

    fn filter(&mut self) -> Result<(), QueryError> {
        if !self.is_punct("(") {
            return Err(match self.peek() {
                Tok::Word(_) | Tok::PName(..) | Tok::IriRef(_) => self.unsupported("FILTER functions"),
                _ => self.unexpected("'('"),
            });
        }
        self.advance();
        if self.is_punct("!") {
            return Err(self.unsupported("FILTER logical operators"));
        }
        if self.is_punct("(") {
            return Err(self.unsupported("nested FILTER expressions"));
        }
        if let Tok::Word(w) = self.peek() {
            if !(w.eq_ignore_ascii_case("true") || w.eq_ignore_ascii_case("false")) {
                return Err(self.unsupported("FILTER functions"));
            }
        }
        if matches!(self.peek(), Tok::PName(..) | Tok::IriRef(_)) && matches!(self.peek_at(1), Tok::Punct("(")) {
            return Err(self.unsupported("FILTER functions"));
        }
        let left = self.operand()?;
        let op = match self.peek() {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::Ne,
            Tok::Punct("<") => CompareOp::Lt,
            Tok::Punct("<=") => CompareOp::Le,
            Tok::Punct(">") => CompareOp::Gt,
            Tok::Punct(">=") => CompareOp::Ge,
            Tok::Punct("&&") | Tok::Punct("||") => return Err(self.unsupported("FILTER logical operators")),
            Tok::Punct("+") | Tok::Punct("-") | Tok::Punct("*") | Tok::Punct("/") => {
                return Err(self.unsupported("FILTER arithmetic"))
            }
            _ => return Err(self.unexpected("a comparison operator")),
        };
        self.advance();
        let right = self.operand()?;
        match self.peek() {
            Tok::Punct("&&") | Tok::Punct("||") => return Err(self.unsupported("FILTER logical operators")),
            Tok::Punct("+") | Tok::Punct("-") | Tok::Punct("*") | Tok::Punct("/") => {
                return Err(self.unsupported("FILTER arithmetic"))
            }
            Tok::Number(lexical, _) if lexical.starts_with(['+', '-']) => {
                return Err(self.unsupported("FILTER arithmetic"))
            }
            _ => {}
        }
        self.expect_punct(")")?;
        self.filters.push(FilterExpr { op, left, right });
        Ok(())
    }

    fn operand(&mut self) -> Result<VarOrTerm, QueryError> {
        if matches!(self.peek(), Tok::Blank(_)) {
            return Err(self.error("blank nodes are not allowed in FILTER"));
        }
        self.var_or_term("a variable or constant")
    }

    fn solution_modifiers(&mut self) -> Result<Vec<OrderKey>, QueryError> {
        let mut order = Vec::new();
        if self.is_word("GROUP") {
            return Err(self.unsupported("GROUP BY"));
        }
        if self.is_word("HAVING") {
            return Err(self.unsupported("HAVING"));
        }
        if self.eat_word("ORDER") {
            if !self.eat_word("BY") {
                return Err(self.unexpected("BY"));
            }
            loop {
                let ascending = if self.eat_word("ASC") {
                    true
                } else if self.eat_word("DESC") {
                    false
                } else if let Tok::Var(name) = self.peek().clone() {
                    self.advance();
                    order.push(OrderKey { variable: Variable::new(name), ascending: true });
                    continue;
                } else {
                    break;
                };
                self.expect_punct("(")?;
                let Tok::Var(name) = self.peek().clone() else {
                    return Err(self.unsupported("ORDER BY expressions"));
                };
                self.advance();
                self.expect_punct(")")?;
                order.push(OrderKey { variable: Variable::new(name), ascending });
            }
            if order.is_empty() {
                return Err(if self.is_punct("(") {
                    self.unsupported("ORDER BY expressions")
                } else {
                    self.unexpected("an ORDER BY key")
                });
            }
        }
        for (keyword, feature) in [("LIMIT", "LIMIT"), ("OFFSET", "OFFSET")] {
            if self.is_word(keyword) {
                return Err(self.unsupported(feature));
            }
        }
        Ok(order)
    }
}
