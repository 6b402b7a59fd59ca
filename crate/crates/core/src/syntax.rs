//! Text format for trees and workspaces.
//!
//! ```text
//! item    := '~'* primary '^'?
//! primary := lexid | '*' | '<' item '>' | '(' item item? (':' color)? ')'
//! ```
//!
//! `^` marks the head child, `~` counts how many times a vertex was moved,
//! `<...>` is a trace leaf holding the (uncolored) contracted subtree and `*`
//! is an unlabeled input. A single parenthesized item is just grouping, or
//! attaches a color: `(mary:agent_v)`, `((mary:agent_v) (sleep:agent^)^ :0)`.
//!
//! Colors: `agent_v` receiver, `agent^` giver, `G[agent,theme]` grid (a
//! trailing `^` is accepted), `0` the non-theta marker, `0|X` a moved vertex
//! whose own color is `X`, and `c` or `?` for an unknown color.

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::so_core::{canon_cmp, Decor, Kind, So, Tree, Workspace};
use crate::theta_colors::{outer, Pol, RoleInventory, ThetaColor};

/// A planar tree as written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raw {
    pub kind: RawKind,
    pub head: bool,
    pub moved: u8,
    pub color: Option<String>,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawKind {
    Hole,
    Leaf(String),
    Trace(Box<Raw>),
    Node(Box<Raw>, Box<Raw>),
}

impl Raw {
    pub fn leaf(id: &str) -> Raw {
        Raw { kind: RawKind::Leaf(id.to_string()), head: false, moved: 0, color: None, pos: 0 }
    }

    pub fn node(a: Raw, b: Raw) -> Raw {
        Raw { kind: RawKind::Node(Box::new(a), Box::new(b)), head: false, moved: 0, color: None, pos: 0 }
    }

    pub fn headed(mut self) -> Raw {
        self.head = true;
        self
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

fn lex_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || b"_*+-".contains(&c)
}

impl<'a> Parser<'a> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.i += 1;
            Ok(())
        } else {
            Err(Error::parse(self.i, format!("expected '{}'", c as char)))
        }
    }

    fn item(&mut self) -> Result<Raw> {
        let mut moved = 0u8;
        while self.peek() == Some(b'~') {
            self.i += 1;
            moved = moved.checked_add(1).ok_or_else(|| Error::parse(self.i, "too many '~'"))?;
        }
        let mut r = self.primary()?;
        r.moved = r.moved.checked_add(moved).ok_or_else(|| Error::parse(self.i, "too many '~'"))?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            r.head = true;
        }
        Ok(r)
    }

    fn primary(&mut self) -> Result<Raw> {
        let pos = self.i;
        match self.peek() {
            None => Err(Error::parse(self.i, "unexpected end of input")),
            Some(b'(') => {
                self.i += 1;
                let a = self.item()?;
                let mut r = match self.peek() {
                    Some(b')') | Some(b':') => a,
                    _ => {
                        let b = self.item()?;
                        Raw { kind: RawKind::Node(Box::new(a), Box::new(b)), head: false, moved: 0, color: None, pos }
                    }
                };
                if self.peek() == Some(b':') {
                    self.i += 1;
                    let start = self.i;
                    while self.i < self.s.len() && self.s[self.i] != b')' {
                        self.i += 1;
                    }
                    let text: String = String::from_utf8_lossy(&self.s[start..self.i])
                        .chars()
                        .filter(|c| !c.is_whitespace())
                        .collect();
                    if text.is_empty() {
                        return Err(Error::parse(start, "empty color"));
                    }
                    if r.color.is_some() {
                        return Err(Error::parse(start, "vertex colored twice"));
                    }
                    r.color = Some(text);
                }
                self.expect(b')')?;
                Ok(r)
            }
            Some(b'<') => {
                self.i += 1;
                let inner = self.item()?;
                self.expect(b'>')?;
                Ok(Raw { kind: RawKind::Trace(Box::new(inner)), head: false, moved: 0, color: None, pos })
            }
            Some(c) if lex_char(c) => {
                let start = self.i;
                while self.i < self.s.len() && lex_char(self.s[self.i]) {
                    self.i += 1;
                }
                let id = std::str::from_utf8(&self.s[start..self.i]).expect("ascii");
                let kind = if id == "*" { RawKind::Hole } else { RawKind::Leaf(id.to_string()) };
                Ok(Raw { kind, head: false, moved: 0, color: None, pos: start })
            }
            Some(c) => Err(Error::parse(self.i, format!("unexpected '{}'", c as char))),
        }
    }
}

/// Parse one tree.
pub fn parse_raw(text: &str) -> Result<Raw> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let r = p.item()?;
    if p.peek().is_some() {
        return Err(Error::parse(p.i, "trailing input"));
    }
    Ok(r)
}

/// Parse a whitespace-separated sequence of trees.
pub fn parse_raw_many(text: &str) -> Result<Vec<Raw>> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.item()?);
    }
    Ok(out)
}

fn head_is_giver<C>(t: &Tree<C>, lex: Option<&Lexicon>) -> bool {
    let Some(lex) = lex else { return false };
    let h = t.get(&t.head_leaf()).expect("head leaf");
    h.label().and_then(|id| lex.get(id)).is_some_and(|it| it.is_giver())
}

fn build<C: Decor>(
    r: &Raw,
    lex: Option<&Lexicon>,
    color: &mut dyn FnMut(&Raw) -> Result<C>,
) -> Result<Tree<C>> {
    let c = color(r)?;
    let t = match &r.kind {
        RawKind::Hole => Tree::hole(c),
        RawKind::Leaf(id) => {
            if let Some(lex) = lex {
                lex.require(id)?;
            }
            Tree::leaf(id, c)
        }
        RawKind::Trace(inner) => Tree::trace(canonicalize(inner, lex)?, c),
        RawKind::Node(a, b) => {
            if a.head && b.head {
                return Err(Error::parse(r.pos, "both children marked as head"));
            }
            let ta = build(a, lex, color)?;
            let tb = build(b, lex, color)?;
            let head = if a.head {
                0
            } else if b.head {
                1
            } else {
                match (head_is_giver(&ta, lex), head_is_giver(&tb, lex)) {
                    (true, false) => 0,
                    (false, true) => 1,
                    _ if canon_cmp(&tb, &ta).is_lt() => 1,
                    _ => 0,
                }
            };
            Tree::branch([ta, tb], head, c)
        }
    };
    Ok(t.with_moved(r.moved))
}

/// The canonical syntactic object of a planar tree. Colors, if written, are
/// rejected. Without a `^`, the head is a child whose head leaf is a giver
/// item, otherwise the first child in canonical order.
pub fn canonicalize(r: &Raw, lex: Option<&Lexicon>) -> Result<So> {
    build(r, lex, &mut |x: &Raw| match &x.color {
        None => Ok(()),
        Some(_) => Err(Error::parse(x.pos, "colors are not allowed here")),
    })
}

/// Parse a color name against an inventory. `None` is the unknown color.
pub fn parse_color(text: &str, inv: &RoleInventory) -> Result<Option<ThetaColor>> {
    let bad = |m: &str| Error::parse(0, format!("{m}: {text:?}"));
    if text == "c" || text == "?" {
        return Ok(None);
    }
    if text == "0" {
        return Ok(Some(ThetaColor::Theta0));
    }
    if let Some(rest) = text.strip_prefix("G[") {
        let rest = rest.strip_suffix('^').unwrap_or(rest);
        let body = rest.strip_suffix(']').ok_or_else(|| bad("unterminated grid"))?;
        let ids = body.split(',').map(|n| inv.id(n)).collect::<Result<Vec<_>>>()?;
        if !inv.valid_tuple(&ids) {
            return Err(bad("not a valid grid"));
        }
        return Ok(Some(ThetaColor::giver(&ids)));
    }
    if let Some(name) = text.strip_suffix("_v") {
        return Ok(Some(ThetaColor::Role(inv.id(name)?, Pol::Down)));
    }
    if let Some(name) = text.strip_suffix('^') {
        return Ok(Some(ThetaColor::Role(inv.id(name)?, Pol::Up)));
    }
    Err(bad("unknown color"))
}

/// A colored tree where any vertex may be left uncolored (`None`).
pub fn canonicalize_colored(r: &Raw, lex: &Lexicon) -> Result<Tree<Option<ThetaColor>>> {
    let inv = lex.inventory();
    build(r, Some(lex), &mut |x: &Raw| {
        let Some(text) = &x.color else { return Ok(None) };
        let wrap = |e: Error| match e {
            Error::Parse { msg, .. } => Error::parse(x.pos, msg),
            e => e,
        };
        if let Some(inner) = text.strip_prefix("0|") {
            if x.moved == 0 {
                return Err(Error::parse(x.pos, "'0|' on a vertex that was not moved"));
            }
            return parse_color(inner, inv).map_err(wrap);
        }
        let c = parse_color(text, inv).map_err(wrap)?;
        if x.moved > 0 {
            return match c {
                None | Some(ThetaColor::Theta0) => Ok(None),
                Some(_) => Err(Error::parse(x.pos, "a moved vertex shows the color 0")),
            };
        }
        Ok(c)
    })
}

/// Require every vertex to be colored.
pub fn fully_colored(t: &Tree<Option<ThetaColor>>) -> Result<Tree<ThetaColor>> {
    let mut missing = false;
    let out = t.map_decor(&mut |v: &Tree<Option<ThetaColor>>| match &v.color {
        Some(c) => c.clone(),
        None => {
            missing = true;
            ThetaColor::Theta0
        }
    });
    if missing {
        Err(Error::parse(0, "every vertex needs a color"))
    } else {
        Ok(out)
    }
}

pub fn parse_so(text: &str, lex: Option<&Lexicon>) -> Result<So> {
    canonicalize(&parse_raw(text)?, lex)
}

pub fn parse_colored(text: &str, lex: &Lexicon) -> Result<Tree<Option<ThetaColor>>> {
    canonicalize_colored(&parse_raw(text)?, lex)
}

pub fn parse_workspace(text: &str, lex: Option<&Lexicon>) -> Result<Workspace> {
    let comps = parse_raw_many(text)?.iter().map(|r| canonicalize(r, lex)).collect::<Result<Vec<_>>>()?;
    Ok(Workspace::new(comps))
}

pub fn parse_colored_workspace(text: &str, lex: &Lexicon) -> Result<Workspace<ThetaColor>> {
    let comps = parse_raw_many(text)?
        .iter()
        .map(|r| canonicalize_colored(r, lex).and_then(|t| fully_colored(&t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Workspace::new(comps))
}

fn write_tree<C>(t: &Tree<C>, color: &dyn Fn(&Tree<C>) -> Option<String>, out: &mut String) {
    for _ in 0..t.moved {
        out.push('~');
    }
    let ann = color(t);
    match &t.kind {
        Kind::Node(ch, h) => {
            out.push('(');
            for i in 0..2 {
                if i == 1 {
                    out.push(' ');
                }
                write_tree(&ch[i], color, out);
                if i == *h as usize {
                    out.push('^');
                }
            }
            if let Some(a) = ann {
                out.push_str(" :");
                out.push_str(&a);
            }
            out.push(')');
        }
        _ => {
            let body = match &t.kind {
                Kind::Hole => "*".to_string(),
                Kind::Leaf(s) => s.to_string(),
                Kind::Trace(x) => format!("<{}>", print_so(x)),
                Kind::Node(..) => unreachable!(),
            };
            match ann {
                Some(a) => {
                    out.push('(');
                    out.push_str(&body);
                    out.push(':');
                    out.push_str(&a);
                    out.push(')');
                }
                None => out.push_str(&body),
            }
        }
    }
}

pub fn print_so(t: &So) -> String {
    let mut s = String::new();
    write_tree(t, &|_| None, &mut s);
    s
}

fn color_text(t_moved: u8, c: Option<&ThetaColor>, inv: &RoleInventory) -> String {
    let inner = c.map(|c| c.show(inv)).unwrap_or_else(|| "c".to_string());
    if t_moved > 0 {
        format!("0|{inner}")
    } else {
        inner
    }
}

pub fn print_colored(t: &Tree<ThetaColor>, inv: &RoleInventory) -> String {
    let mut s = String::new();
    write_tree(t, &|v: &Tree<ThetaColor>| Some(color_text(v.moved, Some(&v.color), inv)), &mut s);
    s
}

pub fn print_partial(t: &Tree<Option<ThetaColor>>, inv: &RoleInventory) -> String {
    let mut s = String::new();
    write_tree(t, &|v: &Tree<Option<ThetaColor>>| Some(color_text(v.moved, v.color.as_ref(), inv)), &mut s);
    s
}

pub fn print_workspace(w: &Workspace) -> String {
    w.components().iter().map(print_so).collect::<Vec<_>>().join(" ")
}

pub fn print_colored_workspace(w: &Workspace<ThetaColor>, inv: &RoleInventory) -> String {
    w.components().iter().map(|t| print_colored(t, inv)).collect::<Vec<_>>().join(" ")
}

/// Short label for a color as seen from the parent, for reports.
pub fn outer_text(t: &Tree<ThetaColor>, inv: &RoleInventory) -> String {
    outer(t).show(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::from_json(
            r#"{"roles":{"inventory":["agent","theme","goal"],"preorder":[["agent","theme"],["theme","goal"]]},
                "items":[{"id":"mary","receivable":["agent"]},{"id":"gave","grids":[["agent","theme","goal"]]},
                         {"id":"book","receivable":["theme"]},{"id":"john","receivable":["goal"]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn swap_invariance() {
        assert_eq!(parse_so("(a b)", None).unwrap(), parse_so("(b a)", None).unwrap());
        assert_ne!(parse_so("((a b) c)", None).unwrap(), parse_so("(a (b c))", None).unwrap());
        assert_eq!(parse_so("(a^ b)", None).unwrap(), parse_so("(b a^)", None).unwrap());
        assert_ne!(parse_so("(a^ b)", None).unwrap(), parse_so("(a b^)", None).unwrap());
    }

    #[test]
    fn grouping_and_round_trip() {
        let t = parse_so("( (mary) ( (gave)^ (book) )^ )", None).unwrap();
        assert_eq!(t, parse_so("(mary (gave^ book)^)", None).unwrap());
        let seven = parse_so("((a b) ((c d) (e (f g))))", None).unwrap();
        assert_eq!(seven.leaf_count(), 7);
        for t in [t, seven, parse_so("~(<(a b^)> *^)", None).unwrap()] {
            assert_eq!(parse_so(&print_so(&t), None).unwrap(), t);
        }
    }

    #[test]
    fn default_head_prefers_givers() {
        let lex = lex();
        let t = parse_so("(mary gave)", Some(&lex)).unwrap();
        assert_eq!(t.get(&t.head_leaf()).unwrap().label().unwrap().as_ref(), "gave");
        assert!(matches!(parse_so("(mary nobody)", Some(&lex)), Err(Error::Lexicon(_))));
        assert!(matches!(parse_so("(a^ b^)", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_so("(a b", None), Err(Error::Parse { .. })));
    }

    #[test]
    fn colored_round_trip() {
        let lex = lex();
        let inv = lex.inventory();
        let text = "((mary:agent_v) (~(gave:0|G[agent,theme,goal]) ((book:theme_v) \
                    ((john:goal_v) (<gave>:G[agent,theme,goal]^))^ :G[agent,theme])^ :agent^)^ :c)";
        let t = parse_colored(text, &lex).unwrap();
        assert_eq!(t.color, None);
        let printed = print_partial(&t, inv);
        assert_eq!(parse_colored(&printed, &lex).unwrap(), t);
        assert!(parse_colored("(mary:0|agent_v)", &lex).is_err());
        assert!(parse_colored("(gave:G[agent,goal,theme])", &lex).is_err());
        assert_eq!(parse_color("G[agent]", inv).unwrap(), Some(ThetaColor::Role(0, Pol::Up)));
    }
}
