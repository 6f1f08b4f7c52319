//! Recursive-descent recognizer for the Graphviz DOT language (statements,
//! attribute lists, edge chains, subgraphs). Test-only.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Sym(char),
    Arrow(&'static str),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if ch == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('\\') => {
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                    }
                }
            }
            out.push(Tok::Id(s));
        } else if ch == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Tok::Arrow("->"));
            i += 2;
        } else if ch == '-' && chars.get(i + 1) == Some(&'-') {
            out.push(Tok::Arrow("--"));
            i += 2;
        } else if "{}[]=;,:".contains(ch) {
            out.push(Tok::Sym(ch));
            i += 1;
        } else if ch.is_alphanumeric() || ch == '_' || ch == '.' || ch == '-' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            if i == start {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let numeric = word.chars().all(|c| c.is_ascii_digit() || c == '.' || c == '-');
            let ident = word.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
                && word.chars().all(|c| c.is_alphanumeric() || c == '_');
            if !(numeric || ident) {
                return Err(format!("bad identifier {word}"));
            }
            out.push(Tok::Id(word));
        } else {
            return Err(format!("unexpected character {ch:?}"));
        }
    }
    Ok(out)
}

/// Summary of a recognized graph.
#[derive(Debug, Default, PartialEq)]
pub struct Parsed {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub subgraphs: usize,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    directed: bool,
    parsed: Parsed,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            other => Err(format!("expected {c:?}, got {other:?}")),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(format!("expected identifier, got {other:?}")),
        }
    }

    fn keyword(t: Option<&Tok>, kw: &str) -> bool {
        matches!(t, Some(Tok::Id(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn graph(&mut self) -> Result<(), String> {
        if Self::keyword(self.peek(), "strict") {
            self.next();
        }
        match self.next() {
            Some(Tok::Id(k)) if k == "digraph" => self.directed = true,
            Some(Tok::Id(k)) if k == "graph" => self.directed = false,
            other => return Err(format!("expected graph kind, got {other:?}")),
        }
        if matches!(self.peek(), Some(Tok::Id(_))) {
            self.next();
        }
        self.expect_sym('{')?;
        self.stmt_list()?;
        self.expect_sym('}')?;
        if self.pos != self.toks.len() {
            return Err("trailing tokens".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Sym('}')) | None) {
            self.stmt()?;
            if matches!(self.peek(), Some(Tok::Sym(';'))) {
                self.next();
            }
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while matches!(self.peek(), Some(Tok::Sym('['))) {
            self.next();
            while !matches!(self.peek(), Some(Tok::Sym(']'))) {
                self.id()?;
                self.expect_sym('=')?;
                self.id()?;
                if matches!(self.peek(), Some(Tok::Sym(';' | ','))) {
                    self.next();
                }
            }
            self.expect_sym(']')?;
        }
        Ok(())
    }

    fn subgraph(&mut self) -> Result<Vec<String>, String> {
        if Self::keyword(self.peek(), "subgraph") {
            self.next();
            if matches!(self.peek(), Some(Tok::Id(_))) {
                self.next();
            }
        }
        self.expect_sym('{')?;
        let before = self.parsed.nodes.len();
        self.stmt_list()?;
        self.expect_sym('}')?;
        self.parsed.subgraphs += 1;
        Ok(self.parsed.nodes[before..].to_vec())
    }

    fn operand(&mut self) -> Result<Vec<String>, String> {
        if Self::keyword(self.peek(), "subgraph") || matches!(self.peek(), Some(Tok::Sym('{'))) {
            return self.subgraph();
        }
        let id = self.id()?;
        if matches!(self.peek(), Some(Tok::Sym(':'))) {
            self.next();
            self.id()?;
        }
        Ok(vec![id])
    }

    fn stmt(&mut self) -> Result<(), String> {
        let t = self.peek().cloned();
        if ["graph", "node", "edge"].iter().any(|k| Self::keyword(t.as_ref(), k))
            && matches!(self.toks.get(self.pos + 1), Some(Tok::Sym('[')))
        {
            self.next();
            return self.attr_list();
        }
        if matches!(t, Some(Tok::Id(_))) && matches!(self.toks.get(self.pos + 1), Some(Tok::Sym('='))) {
            self.next();
            self.next();
            self.id()?;
            return Ok(());
        }
        let mut left = self.operand()?;
        let mut is_edge = false;
        while let Some(Tok::Arrow(a)) = self.peek().cloned() {
            if (a == "->") != self.directed {
                return Err(format!("edge operator {a} does not match graph kind"));
            }
            self.next();
            let right = self.operand()?;
            for l in &left {
                for r in &right {
                    self.parsed.edges.push((l.clone(), r.clone()));
                }
            }
            left = right;
            is_edge = true;
        }
        if !is_edge && !matches!(t, Some(Tok::Sym('{'))) && !Self::keyword(t.as_ref(), "subgraph") {
            for n in &left {
                if !self.parsed.nodes.contains(n) {
                    self.parsed.nodes.push(n.clone());
                }
            }
        }
        self.attr_list()
    }
}

pub fn parse(src: &str) -> Result<Parsed, String> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        directed: true,
        parsed: Parsed::default(),
    };
    p.graph()?;
    Ok(p.parsed)
}

#[test]
fn recognizer_rejects_malformed_input() {
    assert!(parse("digraph { a -> b; }").is_ok());
    assert!(parse("digraph { a -- b; }").is_err());
    assert!(parse("digraph { a -> ; }").is_err());
    assert!(parse("digraph { a [label=\"x\" }").is_err());
    assert!(parse("graph { a -- b }").is_ok());
}
