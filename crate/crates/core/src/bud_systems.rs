//! Bud generating systems for theta roles: rule tables, colored composition,
//! language membership and coloring search.
//!
//! Colored trees store at each vertex the color produced by its own rule.
//! A vertex with `moved > 0` sits under that many layers of the unit rule
//! `θ₀ → (c′, (1,θ₀))`, so its parent sees θ₀. Leaves labeled by an item carry
//! terminal colors `(item, c)`; holes carry non-terminal colors and only occur
//! in rules and other operations that still have open inputs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::so_core::{Kind, So, Sym, Tree, VertexPath};
use crate::theta_colors::{grid_tail, initial_colors, outer, Mode, Pol, ThetaColor};
use crate::ColoredTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Family {
    Rule1,
    Rule2,
    Rule3,
    Rule3b,
    Rule4,
    Rule5,
    BareComb,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RootPat {
    /// Any initial color.
    Any,
    Color(ThetaColor),
}

/// A generator. The tree's leaves are holes (non-terminal colors) or items
/// (terminal colors). With `RootPat::Any` the stored root color is a
/// placeholder; use [`Rule::instantiate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub family: Family,
    pub root: RootPat,
    pub tree: ColoredTree,
}

impl Rule {
    pub fn instantiate(&self, c: ThetaColor) -> Result<ColoredTree> {
        match &self.root {
            RootPat::Any => Ok(self.tree.clone().with_color(c)),
            RootPat::Color(r) if *r == c => Ok(self.tree.clone()),
            RootPat::Color(r) => Err(Error::ColorMismatch { expected: format!("{r:?}"), found: format!("{c:?}") }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BudSystem {
    pub lex: Lexicon,
    pub mode: Mode,
    initial: Vec<ThetaColor>,
}

/// One vertex of a derivation: the rule applied there, with notes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub path: VertexPath,
    pub family: Family,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub steps: Vec<Step>,
    pub reason: Option<String>,
}

impl Membership {
    fn fail(steps: Vec<Step>, reason: String) -> Self {
        Membership { member: false, steps, reason: Some(reason) }
    }
}

impl BudSystem {
    pub fn new(lex: Lexicon, mode: Mode) -> Self {
        let initial = initial_colors(lex.inventory(), mode);
        BudSystem { lex, mode, initial }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        BudSystem::new(self.lex.clone(), mode)
    }

    /// ℐ, the non-terminal colors.
    pub fn initial(&self) -> &[ThetaColor] {
        &self.initial
    }

    /// 𝒯, the terminal colors over the lexicon.
    pub fn terminal(&self) -> Vec<ThetaColor> {
        crate::theta_colors::terminal_colors(self.lex.inventory(), &self.lex.ids(), self.mode)
    }

    pub fn is_initial(&self, c: &ThetaColor) -> bool {
        self.is_initial_in(c, self.mode)
    }

    fn is_initial_in(&self, c: &ThetaColor, mode: Mode) -> bool {
        self.lex.inventory().valid_color(c) && (mode == Mode::Complete || !c.is_theta0())
    }

    fn licensed(&self, id: &str, c: &ThetaColor) -> bool {
        self.licensed_in(id, c, self.mode)
    }

    fn licensed_in(&self, id: &str, c: &ThetaColor, mode: Mode) -> bool {
        self.is_initial_in(c, mode) && self.lex.get(id).is_some_and(|it| it.licenses(c))
    }

    /// The rule family admitting a parent color over a head child and its
    /// sibling (both given by the color they show upward).
    pub fn admits(&self, parent: &ThetaColor, head: &ThetaColor, other: &ThetaColor, head_is_leaf: bool) -> Option<Family> {
        if !(self.is_initial(parent) && self.is_initial(head) && self.is_initial(other)) {
            return None;
        }
        match (head, other) {
            (ThetaColor::Role(r, Pol::Up), ThetaColor::Role(s, Pol::Down)) if r == s => Some(Family::Rule1),
            (ThetaColor::Grid(g), ThetaColor::Role(x, Pol::Down)) if g.last() == Some(x) => {
                let tail = grid_tail(g, 1).ok()?;
                if tail != *parent {
                    None
                } else if g.len() == 2 {
                    Some(Family::Rule2)
                } else if head_is_leaf {
                    Some(Family::Rule3b)
                } else {
                    Some(Family::Rule3)
                }
            }
            (_, ThetaColor::Theta0) if self.mode == Mode::Complete && head == parent => Some(Family::Rule4),
            _ => None,
        }
    }

    /// Every parent color admitted over `(head, other)`.
    pub fn parents(&self, head: &ThetaColor, other: &ThetaColor) -> Vec<(ThetaColor, Family)> {
        self.parents_in(head, other, self.mode)
    }

    fn parents_in(&self, head: &ThetaColor, other: &ThetaColor, mode: Mode) -> Vec<(ThetaColor, Family)> {
        if !(self.is_initial_in(head, mode) && self.is_initial_in(other, mode)) {
            return vec![];
        }
        match (head, other) {
            (ThetaColor::Role(r, Pol::Up), ThetaColor::Role(s, Pol::Down)) if r == s => {
                initial_colors(self.lex.inventory(), mode).into_iter().map(|c| (c, Family::Rule1)).collect()
            }
            (ThetaColor::Grid(g), ThetaColor::Role(x, Pol::Down)) if g.last() == Some(x) => {
                let p = grid_tail(g, 1).expect("grid has an internal role");
                let f = if g.len() == 2 { Family::Rule2 } else { Family::Rule3 };
                vec![(p, f)]
            }
            (_, ThetaColor::Theta0) if mode == Mode::Complete => vec![(head.clone(), Family::Rule4)],
            _ => vec![],
        }
    }

    /// Every `(head, other, family)` a parent color can be expanded into.
    pub fn expansions(&self, parent: &ThetaColor) -> Vec<(ThetaColor, ThetaColor, Family)> {
        if !self.is_initial(parent) {
            return vec![];
        }
        let inv = self.lex.inventory();
        let mut out = Vec::new();
        for r in inv.roles() {
            out.push((ThetaColor::Role(r, Pol::Up), ThetaColor::Role(r, Pol::Down), Family::Rule1));
        }
        if let Some(g) = parent.up_tuple() {
            for x in inv.roles() {
                let mut h = g.clone();
                h.push(x);
                if inv.valid_tuple(&h) {
                    let f = if h.len() == 2 { Family::Rule2 } else { Family::Rule3 };
                    out.push((ThetaColor::Grid(h), ThetaColor::Role(x, Pol::Down), f));
                }
            }
        }
        if self.mode == Mode::Complete {
            out.push((parent.clone(), ThetaColor::Theta0, Family::Rule4));
        }
        out
    }

    fn leaf_variants(&self, c: &ThetaColor, items: &[Sym]) -> Vec<ColoredTree> {
        let mut out = vec![Tree::hole(c.clone())];
        for id in items {
            if self.licensed(id, c) {
                out.push(Tree::leaf(id, c.clone()));
            }
        }
        out
    }

    /// The full rule table. Terminal-leaf variants use the items in
    /// `lex_filter` (all items when `None`) that license the leaf color.
    pub fn enumerate_rules(&self, lex_filter: Option<&[Sym]>) -> Vec<Rule> {
        let all = self.lex.ids();
        let items: Vec<Sym> = match lex_filter {
            Some(f) => all.into_iter().filter(|id| f.contains(id)).collect(),
            None => all,
        };
        let placeholder = self.initial[0].clone();
        let mut out = BTreeSet::new();
        let mut cherry = |family: Family, root: RootPat, head: &ThetaColor, other: &ThetaColor| {
            let color = match &root {
                RootPat::Any => placeholder.clone(),
                RootPat::Color(c) => c.clone(),
            };
            for h in self.leaf_variants(head, &items) {
                for o in self.leaf_variants(other, &items) {
                    let tree = Tree::branch([h.clone(), o], 0, color.clone());
                    out.insert(Rule { family, root: root.clone(), tree });
                }
            }
        };
        match self.mode {
            Mode::Complete => {
                for p in self.initial.clone() {
                    for (h, o, f) in self.expansions(&p) {
                        if f != Family::Rule1 {
                            cherry(f, RootPat::Color(p.clone()), &h, &o);
                        }
                    }
                }
                for r in self.lex.inventory().roles() {
                    cherry(Family::Rule1, RootPat::Any, &ThetaColor::Role(r, Pol::Up), &ThetaColor::Role(r, Pol::Down));
                }
                for c in self.initial.clone() {
                    for leaf in self.leaf_variants(&c, &items) {
                        out.insert(Rule {
                            family: Family::Rule5,
                            root: RootPat::Color(ThetaColor::Theta0),
                            tree: leaf.with_moved(1),
                        });
                    }
                }
            }
            Mode::Bare => {
                for g in self.lex.inventory().tuples() {
                    for tree in self.combs(&g, &items) {
                        out.insert(Rule { family: Family::BareComb, root: RootPat::Any, tree });
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// All comb generators for a grid, with every terminal-leaf variant.
    fn combs(&self, g: &[u8], items: &[Sym]) -> Vec<ColoredTree> {
        let giver = ThetaColor::giver(g);
        let mut acc = self.leaf_variants(&giver, items);
        for k in 1..g.len() {
            let role = g[g.len() - k];
            let parent = grid_tail(g, k).expect("k below grid length");
            let recv = self.leaf_variants(&ThetaColor::Role(role, Pol::Down), items);
            acc = acc
                .iter()
                .flat_map(|h| recv.iter().map(|o| Tree::branch([h.clone(), o.clone()], 0, parent.clone())))
                .collect();
        }
        let recv = self.leaf_variants(&ThetaColor::Role(g[0], Pol::Down), items);
        let placeholder = self.initial[0].clone();
        acc.iter()
            .flat_map(|h| recv.iter().map(|o| Tree::branch([h.clone(), o.clone()], 0, placeholder.clone())))
            .collect()
    }

    /// Colors a trace leaf over `content` may carry: the colors its content
    /// can show upward in the complete system, restricted to this system's
    /// initial colors.
    pub fn trace_colors(&self, content: &So) -> BTreeSet<ThetaColor> {
        let all = Possible::new(self, Mode::Complete).outer(content);
        all.into_iter().filter(|c| self.is_initial(c)).collect()
    }

    /// Is `x` in the language of this system?
    pub fn membership(&self, x: &ColoredTree) -> Membership {
        self.check(x, false)
    }

    /// Membership ignoring the root color (`℘_in`).
    pub fn membership_in(&self, x: &ColoredTree) -> Membership {
        self.check(x, true)
    }

    fn check(&self, x: &ColoredTree, ignore_root: bool) -> Membership {
        let mut steps = Vec::new();
        if x.is_leaf() {
            return Membership::fail(steps, "a single leaf is not derivable from a unit".into());
        }
        if !ignore_root && !self.is_initial(&outer(x)) {
            return Membership::fail(steps, "root color is not initial".into());
        }
        let bare = self.mode == Mode::Bare;
        for path in x.vertices() {
            let v = x.get(&path).expect("vertex");
            let root = path.is_empty();
            if !(root && ignore_root) && !self.is_initial(&v.color) {
                return Membership::fail(steps, format!("color outside the system at {path:?}"));
            }
            if v.moved > 0 {
                if bare {
                    return Membership::fail(steps, format!("no generator decomposition: moved vertex at {path:?}"));
                }
                let note = v.color.is_theta0().then(|| "unit rule over a non-theta color".to_string());
                for _ in 0..v.moved {
                    steps.push(Step { path: path.clone(), family: Family::Rule5, note: note.clone() });
                }
            }
            match &v.kind {
                Kind::Hole => return Membership::fail(steps, format!("open input at {path:?}")),
                Kind::Leaf(id) => {
                    if !self.licensed(id, &v.color) {
                        return Membership::fail(steps, format!("item {id} does not license its color at {path:?}"));
                    }
                }
                Kind::Trace(content) => {
                    if !self.trace_colors(content).contains(&v.color) {
                        return Membership::fail(steps, format!("trace color not carried by its content at {path:?}"));
                    }
                }
                Kind::Node(..) => {
                    let (h, o) = v.split_head().expect("node");
                    let parent = if root && ignore_root { None } else { Some(&v.color) };
                    let fam = match parent {
                        Some(p) => self.admits(p, &outer(h), &outer(o), h.is_leaf()),
                        None => self.parents(&outer(h), &outer(o)).first().map(|(_, f)| *f),
                    };
                    let Some(fam) = fam else {
                        let r = if bare { "no generator decomposition" } else { "no rule admits the vertex" };
                        return Membership::fail(steps, format!("{r} at {path:?}"));
                    };
                    if bare && root && fam != Family::Rule1 {
                        return Membership::fail(steps, "no generator decomposition: root is not a maximal projection".into());
                    }
                    let fam = if fam == Family::Rule3 && h.is_leaf() { Family::Rule3b } else { fam };
                    steps.push(Step { path: path.clone(), family: fam, note: None });
                }
            }
        }
        Membership { member: true, steps, reason: None }
    }

    /// All colorings of `t` in the language. For each trace whose moved copy
    /// is in the same tree, the trace keeps the color the copy had before it
    /// moved.
    pub fn color_search(&self, t: &So) -> Vec<ColoredTree> {
        let mut out = Vec::new();
        if t.is_leaf() {
            return out;
        }
        let mut possible = Possible::new(self, self.mode);
        let roots: Vec<ThetaColor> = possible.outer(t).into_iter().collect();
        for c in roots {
            for x in colorings(self, &mut possible, t, &c) {
                if chain_consistent(&x) && self.membership(&x).member {
                    out.push(x);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// The licensed colorings of a single item.
    pub fn leaf_colorings(&self, t: &So) -> Vec<ColoredTree> {
        let mut possible = Possible::new(self, self.mode);
        let mut out = Vec::new();
        for c in possible.outer(t) {
            out.extend(colorings(self, &mut possible, t, &c));
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Sets of colors each subtree can show upward, memoized by address.
struct Possible<'a> {
    sys: &'a BudSystem,
    mode: Mode,
    memo: HashMap<*const So, BTreeSet<ThetaColor>>,
}

impl<'a> Possible<'a> {
    fn new(sys: &'a BudSystem, mode: Mode) -> Self {
        Possible { sys, mode, memo: HashMap::new() }
    }

    fn inner(&mut self, t: &So) -> BTreeSet<ThetaColor> {
        let sys = self.sys;
        let mode = self.mode;
        match &t.kind {
            Kind::Hole => BTreeSet::new(),
            Kind::Leaf(id) => {
                initial_colors(sys.lex.inventory(), mode).into_iter().filter(|c| sys.licensed_in(id, c, mode)).collect()
            }
            Kind::Trace(content) => match mode {
                Mode::Complete => self.outer(content),
                Mode::Bare => sys.with_mode(Mode::Bare).trace_colors(content),
            },
            Kind::Node(..) => {
                let (h, o) = t.split_head().expect("node");
                let hs = self.outer(h);
                let os = self.outer(o);
                let mut out = BTreeSet::new();
                for hc in &hs {
                    for oc in &os {
                        out.extend(sys.parents_in(hc, oc, mode).into_iter().map(|(p, _)| p));
                    }
                }
                out
            }
        }
    }

    fn outer(&mut self, t: &So) -> BTreeSet<ThetaColor> {
        let key = t as *const So;
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let inner = self.inner(t);
        let s = if t.moved > 0 {
            if inner.is_empty() || self.mode == Mode::Bare {
                BTreeSet::new()
            } else {
                [ThetaColor::Theta0].into_iter().collect()
            }
        } else {
            inner
        };
        self.memo.insert(key, s.clone());
        s
    }
}

fn colorings(sys: &BudSystem, possible: &mut Possible, t: &So, shown: &ThetaColor) -> Vec<ColoredTree> {
    if !possible.outer(t).contains(shown) {
        return vec![];
    }
    if t.moved > 0 {
        let inner: Vec<ThetaColor> = possible.inner(t).into_iter().collect();
        return inner
            .iter()
            .flat_map(|p| colorings_inner(sys, possible, t, p))
            .map(|x| x.with_moved(t.moved))
            .collect();
    }
    colorings_inner(sys, possible, t, shown)
}

fn colorings_inner(sys: &BudSystem, possible: &mut Possible, t: &So, p: &ThetaColor) -> Vec<ColoredTree> {
    match &t.kind {
        Kind::Hole => vec![],
        Kind::Leaf(id) => {
            if sys.licensed(id, p) {
                vec![Tree::leaf(id, p.clone())]
            } else {
                vec![]
            }
        }
        Kind::Trace(content) => {
            if possible.inner(t).contains(p) {
                vec![Tree::trace((**content).clone(), p.clone())]
            } else {
                vec![]
            }
        }
        Kind::Node(ch, hi) => {
            let hi = *hi as usize;
            let (h, o) = (&ch[hi], &ch[1 - hi]);
            let mut out = Vec::new();
            for (hc, oc, _) in sys.expansions(p) {
                let hs = colorings(sys, possible, h, &hc);
                if hs.is_empty() {
                    continue;
                }
                let os = colorings(sys, possible, o, &oc);
                for x in &hs {
                    for y in &os {
                        let mut pair = [x.clone(), y.clone()];
                        if hi == 1 {
                            pair.swap(0, 1);
                        }
                        out.push(Tree::branch(pair, hi, p.clone()));
                    }
                }
            }
            out
        }
    }
}

/// Each trace whose moved copy occurs in the same tree carries the color the
/// copy showed before it moved.
pub fn chain_consistent(x: &ColoredTree) -> bool {
    chains_consistent(std::slice::from_ref(x))
}

/// Across several trees: a trace whose content occurs elsewhere, as a moved
/// copy or as a term carried off sideways, carries the color that copy
/// showed before it left.
pub fn chains_consistent(xs: &[ColoredTree]) -> bool {
    let mut copies: BTreeMap<So, Vec<ThetaColor>> = BTreeMap::new();
    for x in xs {
        for p in x.vertices() {
            let v = x.get(&p).expect("vertex");
            if matches!(v.kind, Kind::Trace(_)) {
                continue;
            }
            let (key, before) = if v.moved > 0 {
                let before = if v.moved > 1 { ThetaColor::Theta0 } else { v.color.clone() };
                (v.strip().with_moved(v.moved - 1), before)
            } else {
                (v.strip(), v.color.clone())
            };
            copies.entry(key).or_default().push(before);
        }
    }
    xs.iter().flat_map(|x| x.leaves()).all(|l| match &l.kind {
        Kind::Trace(content) => copies.get(content.as_ref()).is_none_or(|cs| cs.contains(&l.color)),
        _ => true,
    })
}

/// `x ∘ᵢ y` in the bud operad: defined when input `i` (head-final order)
/// is an open input whose color is the color `y` shows at its root.
pub fn bud_compose(x: &ColoredTree, i: usize, y: &ColoredTree) -> Result<ColoredTree> {
    let leaves = x.leaves_head_final();
    if i == 0 || i > leaves.len() {
        return Err(Error::Arity(format!("input {i} of an element of arity {}", leaves.len())));
    }
    let at = x.get(&leaves[i - 1]).expect("leaf");
    if !matches!(at.kind, Kind::Hole) {
        return Err(Error::Arity(format!("input {i} is a terminal leaf")));
    }
    let shown = outer(y);
    if at.color != shown {
        return Err(Error::ColorMismatch { expected: format!("{:?}", at.color), found: format!("{shown:?}") });
    }
    let moved = y.moved.checked_add(at.moved).ok_or_else(|| Error::Arity("too many moves".into()))?;
    Ok(x.replace(&leaves[i - 1], y.clone().with_moved(moved)))
}

/// The unit `𝟏_c`.
pub fn unit(c: ThetaColor) -> ColoredTree {
    Tree::hole(c)
}

/// Group colorings that differ only in the root color; a group covering
/// every initial color becomes one tree with an unknown root.
pub fn collapse_roots(sys: &BudSystem, xs: &[ColoredTree]) -> Vec<Tree<Option<ThetaColor>>> {
    let mut groups: BTreeMap<Tree<Option<ThetaColor>>, Vec<ThetaColor>> = BTreeMap::new();
    for x in xs {
        let key = x.map_decor(&mut |v: &ColoredTree| Some(v.color.clone())).with_color(None);
        groups.entry(key).or_default().push(x.color.clone());
    }
    let mut out = Vec::new();
    for (key, roots) in groups {
        if roots.len() == sys.initial().len() && sys.initial().len() > 1 {
            out.push(key);
        } else {
            out.extend(roots.into_iter().map(|c| key.clone().with_color(Some(c))));
        }
    }
    out
}
