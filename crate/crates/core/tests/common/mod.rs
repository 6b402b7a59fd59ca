//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::Rng;
use theta_merge::bud_systems::BudSystem;
use theta_merge::so_core::{Kind, VertexPath};
use theta_merge::theta_colors::{outer, Pol, RoleId};
use theta_merge::{ColoredTree, Lexicon, Mode, RoleInventory, So, ThetaColor, Tree};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture")
}

pub fn lexicon(name: &str) -> Lexicon {
    Lexicon::load(fixture(name)).expect("lexicon fixture")
}

/// agent > theme, grids up to length `n_max`.
pub fn two_roles(n_max: usize) -> RoleInventory {
    RoleInventory::new(&["agent", "theme"], &[("agent", "theme")], n_max).unwrap()
}

pub fn three_roles() -> RoleInventory {
    RoleInventory::new(&["agent", "theme", "goal"], &[("agent", "theme"), ("theme", "goal")], 3).unwrap()
}

fn giver(prefix: &[RoleId]) -> ThetaColor {
    if prefix.len() == 1 {
        ThetaColor::Role(prefix[0], Pol::Up)
    } else {
        ThetaColor::Grid(prefix.to_vec())
    }
}

/// Can `prefix + [next]` still be a giver tuple: length bound, and internal
/// roles strictly decreasing.
fn extends(inv: &RoleInventory, prefix: &[RoleId], next: RoleId) -> bool {
    prefix.len() < inv.n_max() && (prefix.len() < 2 || inv.gt(*prefix.last().unwrap(), next))
}

fn all_tuples(inv: &RoleInventory) -> Vec<Vec<RoleId>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<RoleId>> = inv.roles().map(|r| vec![r]).collect();
    while !frontier.is_empty() {
        out.extend(frontier.iter().cloned());
        frontier = frontier
            .iter()
            .flat_map(|p| inv.roles().filter(|r| extends(inv, p, *r)).map(move |r| [p.clone(), vec![r]].concat()))
            .collect();
    }
    out
}

fn terminal_ok(lex: &Lexicon, t: &ColoredTree, want: &ThetaColor) -> bool {
    t.moved == 0
        && t.color == *want
        && match &t.kind {
            Kind::Leaf(id) => lex.get(id).is_some_and(|it| it.licenses(want)),
            Kind::Trace(_) => true,
            _ => false,
        }
}

/// Parses `t` as comb generators composed into each other. `want` fixes the
/// root color; `None` ignores it.
pub fn bare_parse(lex: &Lexicon, t: &ColoredTree, want: Option<&ThetaColor>) -> bool {
    let inv = lex.inventory();
    if t.moved != 0 || t.is_leaf() || want.is_some_and(|w| *w != t.color) {
        return false;
    }
    let (h, o) = t.split_head().unwrap();
    let ThetaColor::Role(e, Pol::Down) = o.color else { return false };
    if (e as usize) >= inv.len() {
        return false;
    }
    filled(lex, o, &o.color.clone()) && spine(lex, h, &[e])
}

fn filled(lex: &Lexicon, t: &ColoredTree, want: &ThetaColor) -> bool {
    if t.is_leaf() {
        terminal_ok(lex, t, want)
    } else {
        bare_parse(lex, t, Some(want))
    }
}

fn spine(lex: &Lexicon, t: &ColoredTree, prefix: &[RoleId]) -> bool {
    let want = giver(prefix);
    if t.moved != 0 || t.color != want {
        return false;
    }
    if t.is_leaf() {
        return terminal_ok(lex, t, &want);
    }
    if bare_parse(lex, t, Some(&want)) {
        return true;
    }
    let (h, o) = t.split_head().unwrap();
    match o.color {
        ThetaColor::Role(x, Pol::Down) if extends(lex.inventory(), prefix, x) => {
            filled(lex, o, &o.color.clone()) && spine(lex, h, &[prefix, &[x]].concat())
        }
        _ => false,
    }
}

/// Every tree with exactly `n` leaves obtained from the unit of some bare
/// color by composing comb generators, all inputs filled by the universal
/// lexicon's items.
pub struct BareGenerator<'a> {
    lex: &'a Lexicon,
    tuples: Vec<Vec<RoleId>>,
    memo: BTreeMap<(ThetaColor, usize), Vec<ColoredTree>>,
}

impl<'a> BareGenerator<'a> {
    pub fn new(lex: &'a Lexicon) -> Self {
        BareGenerator { lex, tuples: all_tuples(lex.inventory()), memo: BTreeMap::new() }
    }

    fn terminal(&self, c: &ThetaColor) -> Vec<ColoredTree> {
        self.lex.items().iter().filter(|it| it.licenses(c)).map(|it| Tree::leaf(&it.id, c.clone())).collect()
    }

    fn fills(&mut self, c: &ThetaColor, n: usize) -> Vec<ColoredTree> {
        if n == 1 {
            self.terminal(c)
        } else {
            self.derive(c, n)
        }
    }

    pub fn derive(&mut self, c: &ThetaColor, n: usize) -> Vec<ColoredTree> {
        if let Some(v) = self.memo.get(&(c.clone(), n)) {
            return v.clone();
        }
        let mut out = BTreeSet::new();
        for tau in self.tuples.clone() {
            let k = tau.len();
            if k + 1 > n {
                continue;
            }
            // slots: s_0..s_{k-1} receivers, then the giver
            for parts in compositions(n, k + 1) {
                let mut options: Vec<Vec<ColoredTree>> = Vec::new();
                for (j, &m) in parts.iter().enumerate() {
                    let color = if j < k { ThetaColor::Role(tau[j], Pol::Down) } else { giver(&tau) };
                    options.push(self.fills(&color, m));
                }
                for choice in product(&options) {
                    let mut node = choice[k].clone();
                    for j in (1..k).rev() {
                        node = Tree::branch([choice[j].clone(), node], 1, giver(&tau[..j]));
                    }
                    out.insert(Tree::branch([choice[0].clone(), node], 1, c.clone()));
                }
            }
        }
        let v: Vec<ColoredTree> = out.into_iter().collect();
        self.memo.insert((c.clone(), n), v.clone());
        v
    }

    /// The language by leaf count, 2..=max.
    pub fn language(&mut self, max: usize) -> BTreeSet<ColoredTree> {
        let colors = self.lex.inventory().bare_colors();
        let mut out = BTreeSet::new();
        for n in 2..=max {
            for c in &colors {
                out.extend(self.derive(c, n));
            }
        }
        out
    }
}

fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if n >= 1 { vec![vec![n]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn product<T: Clone>(options: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut acc: Vec<Vec<T>> = vec![vec![]];
    for o in options {
        acc = acc
            .iter()
            .flat_map(|p| {
                o.iter().map(move |x| {
                    let mut p = p.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    acc
}

/// Every tree up to `max` leaves, built from licensed leaves, in which each
/// vertex is admitted over its children by some rule of `sys`, with any
/// admitted root color. No traces and no moved vertices.
pub fn locally_admitted(sys: &BudSystem, max: usize, allow_theta0: bool) -> Vec<BTreeSet<ColoredTree>> {
    let mut levels: Vec<BTreeSet<ColoredTree>> = vec![BTreeSet::new()];
    let mut leaves = BTreeSet::new();
    for it in sys.lex.items() {
        for c in it.licensed_colors() {
            if sys.is_initial(&c) && (allow_theta0 || !c.is_theta0()) {
                leaves.insert(Tree::leaf(&it.id, c));
            }
        }
    }
    levels.push(leaves);
    for n in 2..=max {
        let mut level = BTreeSet::new();
        for a in 1..n {
            for x in &levels[a] {
                for y in &levels[n - a] {
                    for (c, _) in sys.parents(&outer(x), &outer(y)) {
                        if allow_theta0 || !c.is_theta0() {
                            level.insert(Tree::branch([x.clone(), y.clone()], 0, c));
                        }
                    }
                }
            }
        }
        levels.push(level);
    }
    levels
}

pub fn has_theta0(t: &ColoredTree) -> bool {
    t.vertices().iter().any(|p| {
        let v = t.get(p).unwrap();
        v.moved > 0 || v.color.is_theta0()
    })
}

/// Every maximal projection (the root and each non-head child) sits over a
/// matching giver and receiver of one role.
pub fn maximal_projections_rule1(t: &ColoredTree) -> bool {
    fn go(t: &ColoredTree, maximal: bool) -> bool {
        let Some((h, o)) = t.split_head() else { return true };
        if maximal {
            let ok = matches!((&h.color, &o.color), (ThetaColor::Role(a, Pol::Up), ThetaColor::Role(b, Pol::Down)) if a == b);
            if !ok {
                return false;
            }
        }
        go(h, false) && go(o, true)
    }
    go(t, true)
}

/// Balance by domains: erase every vertex showing θ₀ below a domain's root,
/// each erased subtree becoming a domain of its own (its unit layers
/// stripped). What is left of a domain must parse as composed comb
/// generators below its root; a lone leaf left over must show θ₀.
pub fn balanced_by_domains(lex: &Lexicon, x: &ColoredTree) -> bool {
    fn erase(t: &ColoredTree, root: bool, pieces: &mut Vec<ColoredTree>) -> Option<ColoredTree> {
        if !root && outer(t).is_theta0() {
            pieces.push(t.clone());
            return None;
        }
        let Some(ch) = t.children() else { return Some(t.clone()) };
        let hi = t.head_index().unwrap();
        let a = erase(&ch[0], false, pieces);
        let b = erase(&ch[1], false, pieces);
        match (a, b) {
            (Some(a), Some(b)) => Some(Tree::branch([a, b], hi, t.color.clone()).with_moved(t.moved)),
            (Some(s), None) | (None, Some(s)) => Some(s),
            (None, None) => None,
        }
    }
    let mut todo = vec![x.clone()];
    while let Some(d) = todo.pop() {
        if d.is_leaf() {
            continue;
        }
        let d = d.with_moved(0);
        let mut pieces = Vec::new();
        match erase(&d, true, &mut pieces) {
            None => {}
            Some(r) if r.is_leaf() && !outer(&r).is_theta0() => return false,
            Some(r) if r.is_leaf() => {}
            Some(r) if !bare_parse(lex, &r, None) => return false,
            Some(_) => {}
        }
        todo.extend(pieces);
    }
    true
}

/// Longest run of consecutive unit-over-θ₀ vertices (θ₀ sibling) along one
/// head path.
pub fn theta0_chain(t: &ColoredTree) -> usize {
    fn go(t: &ColoredTree) -> (usize, usize) {
        let Some((h, o)) = t.split_head() else { return (0, 0) };
        let (hrun, hbest) = go(h);
        let (_, obest) = go(o);
        let run = if outer(o).is_theta0() && !t.color.is_theta0() { hrun + 1 } else { 0 };
        (run, run.max(hbest).max(obest))
    }
    go(t).1
}

/// Random member of the complete language over a universal lexicon, with
/// at most `budget` leaves. Traces stand on single items and carry the
/// item's color.
pub fn random_complete<R: Rng>(rng: &mut R, sys: &BudSystem, budget: usize) -> ColoredTree {
    let initial = sys.initial().to_vec();
    let c = initial[rng.gen_range(0..initial.len())].clone();
    grow(rng, sys, &c, budget)
}

fn item_for(sys: &BudSystem, c: &ThetaColor) -> String {
    sys.lex.universal_item_for(c).expect("universal lexicon").id.to_string()
}

fn grow<R: Rng>(rng: &mut R, sys: &BudSystem, c: &ThetaColor, budget: usize) -> ColoredTree {
    let initial = sys.initial();
    if c.is_theta0() && sys.mode == Mode::Complete && rng.gen_bool(0.25) {
        let inner = loop {
            let x = initial[rng.gen_range(0..initial.len())].clone();
            if !x.is_theta0() {
                break x;
            }
        };
        let t = grow(rng, sys, &inner, budget);
        let m = t.moved;
        return t.with_moved(m + 1);
    }
    if budget < 2 || rng.gen_bool(0.3) {
        let id = item_for(sys, c);
        return if !c.is_theta0() && rng.gen_bool(0.1) {
            Tree::trace(So::leaf(&id, ()), c.clone())
        } else {
            Tree::leaf(&id, c.clone())
        };
    }
    let options = sys.expansions(c);
    let pick = if sys.mode == Mode::Complete && rng.gen_bool(0.35) {
        options.iter().find(|(_, o, _)| o.is_theta0()).cloned().unwrap()
    } else {
        options[rng.gen_range(0..options.len())].clone()
    };
    let (hc, oc, _) = pick;
    let bh = rng.gen_range(1..budget);
    let h = grow(rng, sys, &hc, bh);
    let o = grow(rng, sys, &oc, budget - bh);
    Tree::branch([h, o], 0, c.clone())
}

/// One coproduct term as a comparable value: sorted left forest and both
/// quotients (`None` for the empty tree).
pub type TermKey = (Vec<So>, Option<So>, Option<So>);

fn prefix(a: &[u8], b: &[u8]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

fn all_paths(t: &So, path: &mut VertexPath, out: &mut Vec<VertexPath>) {
    out.push(path.clone());
    if let Some(ch) = t.children() {
        for (i, c) in ch.iter().enumerate() {
            path.push(i as u8);
            all_paths(c, path, out);
            path.pop();
        }
    }
}

fn sub<'a>(t: &'a So, p: &[u8]) -> &'a So {
    p.iter().fold(t, |t, &i| &t.children().unwrap()[i as usize])
}

fn delete(t: &So, cuts: &[VertexPath], path: &mut VertexPath) -> Option<So> {
    if cuts.contains(path) {
        return None;
    }
    let Some(ch) = t.children() else { return Some(t.clone()) };
    let hi = t.head_index().unwrap();
    path.push(0);
    let a = delete(&ch[0], cuts, path);
    path.pop();
    path.push(1);
    let b = delete(&ch[1], cuts, path);
    path.pop();
    match (a, b) {
        (Some(a), Some(b)) => Some(Tree::branch([a, b], hi, ()).with_moved(t.moved)),
        (Some(s), None) | (None, Some(s)) => Some(s),
        (None, None) => None,
    }
}

fn contract(t: &So, cuts: &[VertexPath], path: &mut VertexPath) -> So {
    if cuts.contains(path) {
        return Tree::trace(t.clone(), ());
    }
    let Some(ch) = t.children() else { return t.clone() };
    let hi = t.head_index().unwrap();
    path.push(0);
    let a = contract(&ch[0], cuts, path);
    path.pop();
    path.push(1);
    let b = contract(&ch[1], cuts, path);
    path.pop();
    Tree::branch([a, b], hi, ()).with_moved(t.moved)
}

/// Filter every subset of non-root vertices down to antichains and build the
/// terms directly; add the term taking the whole tree.
pub fn coproduct_by_filter(t: &So) -> Vec<TermKey> {
    let mut paths = Vec::new();
    all_paths(t, &mut Vec::new(), &mut paths);
    let paths: Vec<VertexPath> = paths.into_iter().filter(|p| !p.is_empty()).collect();
    let mut out = vec![(vec![t.clone()], None, None)];
    for mask in 0u64..(1u64 << paths.len()) {
        let chosen: Vec<VertexPath> =
            paths.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()).collect();
        let anti = chosen.iter().enumerate().all(|(i, a)| chosen.iter().skip(i + 1).all(|b| !prefix(a, b) && !prefix(b, a)));
        if !anti {
            continue;
        }
        let mut left: Vec<So> = chosen.iter().map(|p| sub(t, p).clone()).collect();
        left.sort();
        out.push((left, delete(t, &chosen, &mut Vec::new()), Some(contract(t, &chosen, &mut Vec::new()))));
    }
    out.sort();
    out
}

/// Give the leaves distinct labels in head-final order.
pub fn label_leaves(t: &So) -> So {
    fn go(t: &So, next: &mut usize) -> So {
        let Some((h, o)) = t.split_head() else {
            let name = format!("x{}", *next);
            *next += 1;
            return So::leaf(&name, ());
        };
        let o = go(o, next);
        let h = go(h, next);
        Tree::branch([h, o], 0, ())
    }
    go(t, &mut 0)
}
