//! Coproduct of workspaces, free and colored Merge, one-step enumeration and
//! the comparison between building colored structures and filtering free ones.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::bud_systems::{chains_consistent, BudSystem, Family, RootPat};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::so_core::{canon_cmp, disjoint, is_prefix, Decor, Kind, So, Tree, VertexPath, Workspace};
use crate::syntax::{print_colored_workspace, print_workspace};
use crate::theta_colors::{outer, RoleInventory, ThetaColor};
use crate::ColoredTree;

pub const DEFAULT_GUARD: usize = 100_000;

/// One term of the coproduct: extracted subtrees on the left, the two
/// quotients on the right. `None` is the empty tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoproductTerm<C = ()> {
    /// Cut vertices; `[[]]` for the term that extracts the whole tree.
    pub cuts: Vec<VertexPath>,
    pub left: Vec<Tree<C>>,
    pub right_deletion: Option<Tree<C>>,
    pub right_contraction: Option<Tree<C>>,
}

fn count_antichains<C>(t: &Tree<C>) -> u128 {
    // below(v): antichains inside the subtree of v, v itself allowed
    fn below<C>(t: &Tree<C>) -> u128 {
        1u128.saturating_add(inside(t))
    }
    fn inside<C>(t: &Tree<C>) -> u128 {
        match t.children() {
            Some(ch) => below(&ch[0]).saturating_mul(below(&ch[1])),
            None => 1,
        }
    }
    inside(t)
}

fn antichains<C>(t: &Tree<C>, path: &mut VertexPath, root: bool) -> Vec<Vec<VertexPath>> {
    let mut out = Vec::new();
    if !root {
        out.push(vec![path.clone()]);
    }
    match t.children() {
        Some(ch) => {
            path.push(0);
            let a = antichains(&ch[0], path, false);
            path.pop();
            path.push(1);
            let b = antichains(&ch[1], path, false);
            path.pop();
            for x in &a {
                for y in &b {
                    let mut z = x.clone();
                    z.extend(y.iter().cloned());
                    out.push(z);
                }
            }
        }
        None => out.push(vec![]),
    }
    out
}

/// `Δ(T)`: the whole-tree extraction plus one term per admissible cut
/// (including the empty cut).
pub fn coproduct<C: Decor>(t: &Tree<C>, max_terms: usize) -> Result<Vec<CoproductTerm<C>>> {
    let n = count_antichains(t).saturating_add(1);
    if n > max_terms as u128 {
        return Err(Error::Guard(max_terms));
    }
    let mut out = vec![CoproductTerm { cuts: vec![vec![]], left: vec![t.clone()], right_deletion: None, right_contraction: None }];
    for cut in antichains(t, &mut Vec::new(), true) {
        let set: BTreeSet<VertexPath> = cut.iter().cloned().collect();
        out.push(CoproductTerm {
            left: cut.iter().map(|p| t.get(p).expect("cut path").clone()).collect(),
            right_deletion: t.delete(&set),
            right_contraction: Some(t.contract(&set)),
            cuts: cut,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MergeKind {
    EM,
    IM,
    SM1,
    SM2,
    SM3,
}

/// A component of the workspace, or an accessible term inside one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Operand {
    pub comp: usize,
    pub path: VertexPath,
}

impl Operand {
    pub fn new(comp: usize, path: &[u8]) -> Self {
        Operand { comp, path: path.to_vec() }
    }

    pub fn show(&self) -> String {
        let p: String = self.path.iter().map(|i| format!("/{i}")).collect();
        format!("{}:{}", self.comp, if p.is_empty() { "/".to_string() } else { p })
    }
}

/// Parse `comp:/0/1` (or `comp:/` for a whole component).
pub fn parse_operand(s: &str) -> Result<Operand> {
    let bad = || Error::Selector(s.to_string());
    let (c, p) = s.split_once(':').ok_or_else(bad)?;
    let comp = c.trim().parse().map_err(|_| bad())?;
    let path = p
        .split('/')
        .filter(|x| !x.is_empty())
        .map(|x| match x {
            "0" => Ok(0u8),
            "1" => Ok(1u8),
            _ => Err(bad()),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Operand { comp, path })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeEvent<C = ()> {
    pub kind: MergeKind,
    pub a: Operand,
    pub b: Operand,
    /// Which operand became the head of the new root.
    pub head: Operand,
    pub root_color: Option<ThetaColor>,
    pub family: Option<Family>,
    pub result: Workspace<C>,
}

/// The two trees to merge and what stays in the workspace.
struct Split<C> {
    kind: MergeKind,
    x: Tree<C>,
    y: Tree<C>,
    rest: Vec<Tree<C>>,
}

fn split<C: Decor>(ws: &Workspace<C>, a: &Operand, b: &Operand) -> Result<Split<C>> {
    let comps = ws.components();
    let get = |o: &Operand| {
        comps
            .get(o.comp)
            .and_then(|t| t.get(&o.path))
            .cloned()
            .ok_or_else(|| Error::Selector(o.show()))
    };
    let x = get(a)?;
    let y = get(b)?;
    let others = |skip: &[usize]| -> Vec<Tree<C>> {
        comps.iter().enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, t)| t.clone()).collect()
    };
    let quot = |o: &Operand| comps[o.comp].contract(&[o.path.clone()].into_iter().collect());
    let (ea, eb) = (a.path.is_empty(), b.path.is_empty());
    if a.comp != b.comp {
        return Ok(match (ea, eb) {
            (true, true) => Split { kind: MergeKind::EM, x, y, rest: others(&[a.comp, b.comp]) },
            (false, true) => {
                let mut rest = others(&[a.comp, b.comp]);
                rest.push(quot(a));
                Split { kind: MergeKind::SM1, x, y, rest }
            }
            (true, false) => {
                let mut rest = others(&[a.comp, b.comp]);
                rest.push(quot(b));
                Split { kind: MergeKind::SM1, x, y, rest }
            }
            (false, false) => {
                let mut rest = others(&[a.comp, b.comp]);
                rest.push(quot(a));
                rest.push(quot(b));
                Split { kind: MergeKind::SM2, x, y, rest }
            }
        });
    }
    let t = &comps[a.comp];
    match (ea, eb) {
        (true, true) => Err(Error::Selector("a component cannot merge with itself".into())),
        (false, true) | (true, false) => {
            let (term, whole_first) = if ea { (&b.path, true) } else { (&a.path, false) };
            let copy = t.get(term).expect("term").clone();
            let moved = copy.moved.checked_add(1).ok_or_else(|| Error::Selector("too many moves".into()))?;
            let remainder = t.contract(&[term.clone()].into_iter().collect());
            let copy = copy.with_moved(moved);
            let (x, y) = if whole_first { (remainder, copy) } else { (copy, remainder) };
            Ok(Split { kind: MergeKind::IM, x, y, rest: others(&[a.comp]) })
        }
        (false, false) => {
            if !disjoint(&a.path, &b.path) {
                return Err(Error::Selector(format!("{} and {} overlap", a.show(), b.show())));
            }
            let mut rest = others(&[a.comp]);
            rest.push(t.contract(&[a.path.clone(), b.path.clone()].into_iter().collect()));
            Ok(Split { kind: MergeKind::SM3, x, y, rest })
        }
    }
}

/// Kind of the Merge selected by two operands, or why it is not one.
pub fn classify<C: Decor>(ws: &Workspace<C>, a: &Operand, b: &Operand) -> Result<MergeKind> {
    split(ws, a, b).map(|s| s.kind)
}

/// How free Merge picks the head of the new root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadPolicy {
    /// The operand whose head leaf is a giver item, otherwise the first in
    /// canonical order.
    Default,
    /// Both choices, as separate events.
    Both,
    First,
    Second,
}

fn is_giver_headed<C>(t: &Tree<C>, lex: Option<&Lexicon>) -> bool {
    let h = t.get(&t.head_leaf()).expect("head leaf");
    match (&h.kind, lex) {
        (Kind::Leaf(id), Some(lex)) => lex.get(id).is_some_and(|it| it.is_giver()),
        _ => false,
    }
}

fn head_choices<C: Decor>(x: &Tree<C>, y: &Tree<C>, policy: HeadPolicy, lex: Option<&Lexicon>) -> Vec<usize> {
    match policy {
        HeadPolicy::First => vec![0],
        HeadPolicy::Second => vec![1],
        HeadPolicy::Both if x == y => vec![0],
        HeadPolicy::Both => vec![0, 1],
        HeadPolicy::Default => match (is_giver_headed(x, lex), is_giver_headed(y, lex)) {
            (true, false) => vec![0],
            (false, true) => vec![1],
            _ if canon_cmp(y, x).is_lt() => vec![1],
            _ => vec![0],
        },
    }
}

/// `𝔐_{S,S′}` on a free workspace with a head policy.
pub fn merge_free(
    ws: &Workspace,
    a: &Operand,
    b: &Operand,
    policy: HeadPolicy,
    lex: Option<&Lexicon>,
) -> Result<Vec<MergeEvent>> {
    let s = split(ws, a, b)?;
    Ok(head_choices(&s.x, &s.y, policy, lex)
        .into_iter()
        .map(|h| {
            let mut comps = s.rest.clone();
            comps.push(So::branch([s.x.clone(), s.y.clone()], h, ()));
            MergeEvent {
                kind: s.kind,
                a: a.clone(),
                b: b.clone(),
                head: if h == 0 { a.clone() } else { b.clone() },
                root_color: None,
                family: None,
                result: Workspace::new(comps),
            }
        })
        .collect())
}

/// The cherries admitted by the rules: `(head color, other color)` to the
/// possible root colors.
#[derive(Clone, Debug)]
pub struct Xi {
    table: HashMap<(ThetaColor, ThetaColor), Vec<(RootPat, Family)>>,
    initial: Vec<ThetaColor>,
}

impl Xi {
    pub fn new(sys: &BudSystem) -> Self {
        let mut table: HashMap<(ThetaColor, ThetaColor), Vec<(RootPat, Family)>> = HashMap::new();
        for r in sys.enumerate_rules(Some(&[])) {
            if r.family == Family::Rule5 {
                continue;
            }
            let (h, o) = r.tree.split_head().expect("cherry");
            let e = table.entry((h.color.clone(), o.color.clone())).or_default();
            let fam = if r.family == Family::Rule3b { Family::Rule3 } else { r.family };
            if !e.contains(&(r.root.clone(), fam)) {
                e.push((r.root, fam));
            }
        }
        Xi { table, initial: sys.initial().to_vec() }
    }

    /// Root colors admitted over `(head, other)`.
    pub fn roots(&self, head: &ThetaColor, other: &ThetaColor) -> Vec<(ThetaColor, Family)> {
        let mut out = Vec::new();
        for (pat, fam) in self.table.get(&(head.clone(), other.clone())).into_iter().flatten() {
            match pat {
                RootPat::Any => out.extend(self.initial.iter().map(|c| (c.clone(), *fam))),
                RootPat::Color(c) => out.push((c.clone(), *fam)),
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn len(&self) -> usize {
        self.table.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Colored Merge. An accessible term merged with its own component goes
/// through the unit first, so the moved copy shows θ₀. With `color` given,
/// only that root color is tried.
pub fn merge_colored_all(
    ws: &Workspace<ThetaColor>,
    color: Option<&ThetaColor>,
    a: &Operand,
    b: &Operand,
    xi: &Xi,
) -> Result<Vec<MergeEvent<ThetaColor>>> {
    let s = split(ws, a, b)?;
    let mut out = Vec::new();
    let orientations: &[usize] = if s.x == s.y { &[0] } else { &[0, 1] };
    for &h in orientations {
        let (hd, ot) = if h == 0 { (&s.x, &s.y) } else { (&s.y, &s.x) };
        for (c, fam) in xi.roots(&outer(hd), &outer(ot)) {
            if color.is_some_and(|want| *want != c) {
                continue;
            }
            let mut comps = s.rest.clone();
            comps.push(Tree::branch([s.x.clone(), s.y.clone()], h, c.clone()));
            out.push(MergeEvent {
                kind: s.kind,
                a: a.clone(),
                b: b.clone(),
                head: if h == 0 { a.clone() } else { b.clone() },
                root_color: Some(c),
                family: Some(fam),
                result: Workspace::new(comps),
            });
        }
    }
    Ok(out)
}

/// Colored Merge with a fixed root color; rejected when no rule admits it.
pub fn merge_colored(
    ws: &Workspace<ThetaColor>,
    color: &ThetaColor,
    a: &Operand,
    b: &Operand,
    xi: &Xi,
) -> Result<Workspace<ThetaColor>> {
    let s = split(ws, a, b)?;
    let events = merge_colored_all(ws, Some(color), a, b, xi)?;
    events.into_iter().next().map(|e| e.result).ok_or_else(|| {
        Error::Rejected(format!(
            "color pair ({:?}, {:?}) under {:?} is not admitted",
            outer(&s.x),
            outer(&s.y),
            color
        ))
    })
}

fn operands<C: Decor>(ws: &Workspace<C>) -> Vec<Operand> {
    ws.components()
        .iter()
        .enumerate()
        .flat_map(|(i, t)| t.vertices().into_iter().map(move |p| Operand { comp: i, path: p }))
        .collect()
}

fn operand_pairs<C: Decor>(ws: &Workspace<C>) -> Vec<(Operand, Operand)> {
    let ops = operands(ws);
    let mut out = Vec::new();
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let (a, b) = (&ops[i], &ops[j]);
            let ok = if a.comp != b.comp {
                true
            } else {
                !(a.path.is_empty() && b.path.is_empty())
                    && (a.path.is_empty() || b.path.is_empty() || disjoint(&a.path, &b.path))
            };
            if ok && !(a.comp == b.comp && !a.path.is_empty() && !b.path.is_empty() && is_prefix(&a.path, &b.path)) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Every free Merge event from a workspace.
pub fn markov_step_free(ws: &Workspace, policy: HeadPolicy, lex: Option<&Lexicon>, guard: usize) -> Result<Vec<MergeEvent>> {
    let pairs = operand_pairs(ws);
    if pairs.len() > guard {
        return Err(Error::Guard(guard));
    }
    let events: Vec<MergeEvent> = pairs
        .par_iter()
        .map(|(a, b)| merge_free(ws, a, b, policy, lex))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if events.len() > guard {
        return Err(Error::Guard(guard));
    }
    Ok(events)
}

/// Every admitted colored Merge event from a workspace.
pub fn markov_step_colored(ws: &Workspace<ThetaColor>, xi: &Xi, guard: usize) -> Result<Vec<MergeEvent<ThetaColor>>> {
    let pairs = operand_pairs(ws);
    if pairs.len() > guard {
        return Err(Error::Guard(guard));
    }
    let events: Vec<MergeEvent<ThetaColor>> = pairs
        .par_iter()
        .map(|(a, b)| merge_colored_all(ws, None, a, b, xi))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if events.len() > guard {
        return Err(Error::Guard(guard));
    }
    Ok(events)
}

/// One Markov step as a function of the workspace.
pub type StepFn<'a, C> = dyn Fn(&Workspace<C>) -> Result<Vec<Workspace<C>>> + Sync + 'a;

/// Breadth-first reachable workspaces, one set per depth (depth 0 first).
pub fn explore<C: Decor>(
    start: Vec<Workspace<C>>,
    depth: usize,
    guard: usize,
    step: &StepFn<'_, C>,
) -> Result<Vec<BTreeSet<Workspace<C>>>> {
    let mut seen: BTreeSet<Workspace<C>> = start.iter().cloned().collect();
    let mut layers = vec![seen.clone()];
    for _ in 0..depth {
        let frontier: Vec<&Workspace<C>> = layers.last().expect("layer").iter().collect();
        let next: Vec<Vec<Workspace<C>>> = frontier.par_iter().map(|w| step(w)).collect::<Result<_>>()?;
        let mut layer = BTreeSet::new();
        for w in next.into_iter().flatten() {
            if seen.insert(w.clone()) {
                layer.insert(w);
            }
        }
        if seen.len() > guard {
            return Err(Error::Guard(guard));
        }
        layers.push(layer);
    }
    Ok(layers)
}

/// First 16 hex digits of the SHA-256 of a canonical printout.
pub fn short_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}

fn kind_name(k: MergeKind) -> &'static str {
    match k {
        MergeKind::EM => "EM",
        MergeKind::IM => "IM",
        MergeKind::SM1 => "SM1",
        MergeKind::SM2 => "SM2",
        MergeKind::SM3 => "SM3",
    }
}

/// One log line: kind, operands (head marked), root color, result hash.
pub fn event_line_free(e: &MergeEvent) -> String {
    let mark = |o: &Operand| if *o == e.head { format!("{}^", o.show()) } else { o.show() };
    format!("{} {} {} - {}", kind_name(e.kind), mark(&e.a), mark(&e.b), short_hash(&print_workspace(&e.result)))
}

pub fn event_line_colored(e: &MergeEvent<ThetaColor>, inv: &RoleInventory) -> String {
    let mark = |o: &Operand| if *o == e.head { format!("{}^", o.show()) } else { o.show() };
    format!(
        "{} {} {} {} {}",
        kind_name(e.kind),
        mark(&e.a),
        mark(&e.b),
        e.root_color.as_ref().map(|c| c.show(inv)).unwrap_or_else(|| "-".into()),
        short_hash(&print_colored_workspace(&e.result, inv))
    )
}

/// Every colored workspace made of single items, one licensed color each.
/// Items without a licensed color are left out.
pub fn initial_colored(sys: &BudSystem) -> Vec<Workspace<ThetaColor>> {
    let mut acc: Vec<Vec<ColoredTree>> = vec![vec![]];
    for it in sys.lex.items() {
        let colors: Vec<ThetaColor> = it.licensed_colors().into_iter().filter(|c| sys.is_initial(c)).collect();
        if colors.is_empty() {
            continue;
        }
        acc = acc
            .iter()
            .flat_map(|w| {
                colors.iter().map(move |c| {
                    let mut w = w.clone();
                    w.push(Tree::leaf(&it.id, c.clone()));
                    w
                })
            })
            .collect();
    }
    acc.into_iter().map(Workspace::new).collect()
}

pub fn initial_free(lex: &Lexicon) -> Workspace {
    Workspace::new(lex.items().iter().map(|it| So::leaf(&it.id, ())).collect())
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub depth: usize,
    /// Colored workspaces reached by colored Merge.
    pub built: BTreeSet<Workspace<ThetaColor>>,
    /// Colorings of the free workspaces whose components all color, with
    /// traces agreeing with their copies across components.
    pub filtered: BTreeSet<Workspace<ThetaColor>>,
    pub only_built: Vec<Workspace<ThetaColor>>,
    pub only_filtered: Vec<Workspace<ThetaColor>>,
    /// Distinct free workspaces examined.
    pub free_workspaces: usize,
    /// Free workspaces with a component that has no coloring.
    pub rejected: usize,
    /// Kinds of free events over all steps.
    pub free_events: BTreeMap<MergeKind, usize>,
    pub colored_events: BTreeMap<MergeKind, usize>,
}

impl EquivalenceReport {
    pub fn equal(&self) -> bool {
        self.only_built.is_empty() && self.only_filtered.is_empty()
    }

    /// Distinct colored components over the built workspaces.
    pub fn built_components(&self) -> BTreeSet<ColoredTree> {
        self.built.iter().flat_map(|w| w.components().iter().cloned()).collect()
    }
}

/// Build colored workspaces with colored Merge and, separately, color the
/// workspaces built by free Merge; compare what is reached within `depth`
/// steps.
pub fn equivalence_harness(sys: &BudSystem, depth: usize, guard: usize) -> Result<EquivalenceReport> {
    let xi = Xi::new(sys);
    let colored_counts = std::sync::Mutex::new(BTreeMap::new());
    let colored = explore(initial_colored(sys), depth, guard, &|w| {
        let ev = markov_step_colored(w, &xi, guard)?;
        let mut m = colored_counts.lock().expect("counts");
        for e in &ev {
            *m.entry(e.kind).or_insert(0usize) += 1;
        }
        Ok(ev.into_iter().map(|e| e.result).collect())
    })?;
    let built: BTreeSet<Workspace<ThetaColor>> = colored.into_iter().flatten().collect();

    let lex = &sys.lex;
    let free_counts = std::sync::Mutex::new(BTreeMap::new());
    let free = explore(vec![initial_free(lex)], depth, guard, &|w| {
        let ev = markov_step_free(w, HeadPolicy::Both, Some(lex), guard)?;
        let mut m = free_counts.lock().expect("counts");
        for e in &ev {
            *m.entry(e.kind).or_insert(0usize) += 1;
        }
        Ok(ev.into_iter().map(|e| e.result).collect())
    })?;
    let free: Vec<Workspace> = free.into_iter().flatten().collect();
    let comps: BTreeSet<So> = free.iter().flat_map(|w| w.components().iter().cloned()).collect();
    let comps: Vec<So> = comps.into_iter().collect();
    let colorings: BTreeMap<&So, Vec<ColoredTree>> = comps
        .par_iter()
        .map(|t| (t, if t.is_leaf() { sys.leaf_colorings(t) } else { sys.color_search(t) }))
        .collect();
    let mut filtered = BTreeSet::new();
    let mut rejected = 0;
    for w in &free {
        let options: Vec<&Vec<ColoredTree>> = w.components().iter().map(|c| &colorings[c]).collect();
        if options.iter().any(|o| o.is_empty()) {
            rejected += 1;
            continue;
        }
        let mut acc: Vec<Vec<ColoredTree>> = vec![vec![]];
        for o in options {
            acc = acc
                .iter()
                .flat_map(|p| {
                    o.iter().map(move |c| {
                        let mut p = p.clone();
                        p.push(c.clone());
                        p
                    })
                })
                .collect();
            if acc.len() > guard {
                return Err(Error::Guard(guard));
            }
        }
        filtered.extend(acc.into_iter().filter(|p| chains_consistent(p)).map(Workspace::new));
        if filtered.len() > guard {
            return Err(Error::Guard(guard));
        }
    }

    Ok(EquivalenceReport {
        depth,
        only_built: built.difference(&filtered).cloned().collect(),
        only_filtered: filtered.difference(&built).cloned().collect(),
        built,
        filtered,
        free_workspaces: free.len(),
        rejected,
        free_events: free_counts.into_inner().expect("counts"),
        colored_events: colored_counts.into_inner().expect("counts"),
    })
}
