//! Syntactic objects: non-planar binary rooted trees with a head function.
//!
//! Children of a node are stored in a canonical order (shape first, then
//! decoration), so two trees are the same syntactic object exactly when they
//! are structurally equal. The head of a node is the index of its head child
//! in that order. Leaves are lexical items, traces of contracted subtrees, or
//! holes (unlabeled inputs, used by operad elements and bud generators).
//!
//! The formal empty tree never appears inside a tree. Places where a result
//! may be empty use `Option<Tree>` with `None` standing for it.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

pub type Sym = Arc<str>;

/// Child selectors from the root; `[]` is the root itself.
pub type VertexPath = Vec<u8>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree<C = ()> {
    pub kind: Kind<C>,
    /// How many times this vertex has been merged with the empty tree
    /// (the footprint left by Internal Merge on the moved copy).
    pub moved: u8,
    pub color: C,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind<C> {
    Hole,
    Leaf(Sym),
    Trace(Arc<So>),
    Node(Box<[Tree<C>; 2]>, u8),
}

/// An uncolored syntactic object.
pub type So = Tree<()>;

/// Decorations that can ride on tree vertices.
pub trait Decor: Clone + Ord + Eq + std::hash::Hash + std::fmt::Debug + Send + Sync {
    /// Decoration of the trace leaf that replaces `t` in a contraction quotient.
    fn trace_of(t: &Tree<Self>) -> Self;
}

impl Decor for () {
    fn trace_of(_: &So) {}
}

fn rank<C>(k: &Kind<C>) -> u8 {
    match k {
        Kind::Hole => 0,
        Kind::Leaf(_) => 1,
        Kind::Trace(_) => 2,
        Kind::Node(..) => 3,
    }
}

/// Total order on shapes, ignoring decorations.
pub fn shape_cmp<C, D>(a: &Tree<C>, b: &Tree<D>) -> Ordering {
    rank(&a.kind)
        .cmp(&rank(&b.kind))
        .then_with(|| match (&a.kind, &b.kind) {
            (Kind::Leaf(x), Kind::Leaf(y)) => x.cmp(y),
            (Kind::Trace(x), Kind::Trace(y)) => x.cmp(y),
            (Kind::Node(xs, hx), Kind::Node(ys, hy)) => shape_cmp(&xs[0], &ys[0])
                .then_with(|| shape_cmp(&xs[1], &ys[1]))
                .then(hx.cmp(hy)),
            _ => Ordering::Equal,
        })
        .then(a.moved.cmp(&b.moved))
}

/// The order used to arrange siblings.
pub fn canon_cmp<C: Ord>(a: &Tree<C>, b: &Tree<C>) -> Ordering {
    shape_cmp(a, b).then_with(|| a.cmp(b))
}

impl<C> Tree<C> {
    pub fn leaf(id: &str, color: C) -> Self {
        Tree { kind: Kind::Leaf(Arc::from(id)), moved: 0, color }
    }

    pub fn hole(color: C) -> Self {
        Tree { kind: Kind::Hole, moved: 0, color }
    }

    pub fn trace(content: So, color: C) -> Self {
        Tree { kind: Kind::Trace(Arc::new(content)), moved: 0, color }
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self.kind, Kind::Node(..))
    }

    pub fn label(&self) -> Option<&Sym> {
        match &self.kind {
            Kind::Leaf(s) => Some(s),
            _ => None,
        }
    }

    pub fn children(&self) -> Option<&[Tree<C>; 2]> {
        match &self.kind {
            Kind::Node(ch, _) => Some(ch),
            _ => None,
        }
    }

    pub fn head_index(&self) -> Option<usize> {
        match &self.kind {
            Kind::Node(_, h) => Some(*h as usize),
            _ => None,
        }
    }

    /// `(head child, non-head child)` of a node.
    pub fn split_head(&self) -> Option<(&Tree<C>, &Tree<C>)> {
        match &self.kind {
            Kind::Node(ch, h) => {
                let h = *h as usize;
                Some((&ch[h], &ch[1 - h]))
            }
            _ => None,
        }
    }

    pub fn leaf_count(&self) -> usize {
        match &self.kind {
            Kind::Node(ch, _) => ch[0].leaf_count() + ch[1].leaf_count(),
            _ => 1,
        }
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.leaf_count() - 1
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            Kind::Node(ch, _) => 1 + ch[0].depth().max(ch[1].depth()),
            _ => 0,
        }
    }

    pub fn get(&self, path: &[u8]) -> Option<&Tree<C>> {
        let mut t = self;
        for &i in path {
            t = &t.children()?[i as usize];
        }
        Some(t)
    }

    /// Path of h(root): follow head children down to a leaf.
    pub fn head_leaf(&self) -> VertexPath {
        let mut path = Vec::new();
        let mut t = self;
        while let Kind::Node(ch, h) = &t.kind {
            path.push(*h);
            t = &ch[*h as usize];
        }
        path
    }

    /// Leaves in head-final order: at every node the non-head child's leaves
    /// come first. The last entry is the head of the root.
    pub fn leaves_head_final(&self) -> Vec<VertexPath> {
        fn go<C>(t: &Tree<C>, path: &mut VertexPath, out: &mut Vec<VertexPath>) {
            match &t.kind {
                Kind::Node(ch, h) => {
                    let h = *h;
                    for i in [1 - h, h] {
                        path.push(i);
                        go(&ch[i as usize], path, out);
                        path.pop();
                    }
                }
                _ => out.push(path.clone()),
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// All vertex paths in preorder, root first.
    pub fn vertices(&self) -> Vec<VertexPath> {
        fn go<C>(t: &Tree<C>, path: &mut VertexPath, out: &mut Vec<VertexPath>) {
            out.push(path.clone());
            if let Kind::Node(ch, _) = &t.kind {
                for i in 0..2u8 {
                    path.push(i);
                    go(&ch[i as usize], path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Leaves in canonical left-to-right order.
    pub fn leaves(&self) -> Vec<&Tree<C>> {
        fn go<'a, C>(t: &'a Tree<C>, out: &mut Vec<&'a Tree<C>>) {
            match &t.kind {
                Kind::Node(ch, _) => {
                    go(&ch[0], out);
                    go(&ch[1], out);
                }
                _ => out.push(t),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

impl<C: Clone> Tree<C> {
    /// Every non-root vertex with the subtree it spans.
    pub fn accessible_terms(&self) -> Vec<(VertexPath, Tree<C>)> {
        self.vertices()
            .into_iter()
            .filter(|p| !p.is_empty())
            .map(|p| {
                let t = self.get(&p).expect("path from vertices()").clone();
                (p, t)
            })
            .collect()
    }
}

impl<C: Decor> Tree<C> {
    /// A node over `children`, with `children[head]` as head child.
    /// The children are put in canonical order.
    pub fn branch(children: [Tree<C>; 2], head: usize, color: C) -> Self {
        let [a, b] = children;
        let (pair, head) = match canon_cmp(&a, &b) {
            Ordering::Greater => ([b, a], 1 - head),
            Ordering::Equal => ([a, b], 0),
            Ordering::Less => ([a, b], head),
        };
        Tree { kind: Kind::Node(Box::new(pair), head as u8), moved: 0, color }
    }

    pub fn with_moved(mut self, moved: u8) -> Self {
        self.moved = moved;
        self
    }

    pub fn with_color(mut self, color: C) -> Self {
        self.color = color;
        self
    }

    /// Forget decorations.
    pub fn strip(&self) -> So {
        self.map_decor(&mut |_| ())
    }

    /// Rebuild with new decorations, re-canonicalizing siblings.
    pub fn map_decor<D: Decor>(&self, f: &mut impl FnMut(&Tree<C>) -> D) -> Tree<D> {
        let color = f(self);
        let kind = match &self.kind {
            Kind::Hole => Kind::Hole,
            Kind::Leaf(s) => Kind::Leaf(s.clone()),
            Kind::Trace(x) => Kind::Trace(x.clone()),
            Kind::Node(ch, h) => {
                let a = ch[0].map_decor(f);
                let b = ch[1].map_decor(f);
                return Tree::branch([a, b], *h as usize, color).with_moved(self.moved);
            }
        };
        Tree { kind, moved: self.moved, color }
    }

    /// Replace the subtree at `path` by `new`.
    pub fn replace(&self, path: &[u8], new: Tree<C>) -> Tree<C> {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match &self.kind {
                Kind::Node(ch, h) => {
                    let mut pair = [ch[0].clone(), ch[1].clone()];
                    pair[i as usize] = ch[i as usize].replace(rest, new);
                    Tree::branch(pair, *h as usize, self.color.clone()).with_moved(self.moved)
                }
                _ => panic!("path runs past a leaf"),
            },
        }
    }

    /// Contraction quotient: each cut subtree shrinks to a trace leaf.
    pub fn contract(&self, cuts: &BTreeSet<VertexPath>) -> Tree<C> {
        fn go<C: Decor>(t: &Tree<C>, path: &mut VertexPath, cuts: &BTreeSet<VertexPath>) -> Tree<C> {
            if cuts.contains(path) {
                return Tree::trace(t.strip(), C::trace_of(t));
            }
            match &t.kind {
                Kind::Node(ch, h) => {
                    path.push(0);
                    let a = go(&ch[0], path, cuts);
                    path.pop();
                    path.push(1);
                    let b = go(&ch[1], path, cuts);
                    path.pop();
                    Tree::branch([a, b], *h as usize, t.color.clone()).with_moved(t.moved)
                }
                _ => t.clone(),
            }
        }
        go(self, &mut Vec::new(), cuts)
    }

    /// Deletion quotient: drop cut subtrees, then splice out vertices left
    /// with one child (the child takes the place of its parent; a node left
    /// with no children disappears). When the root itself is spliced and the
    /// surviving child is internal, the root keeps its decoration.
    /// `None` is the empty tree.
    pub fn delete(&self, cuts: &BTreeSet<VertexPath>) -> Option<Tree<C>> {
        fn go<C: Decor>(t: &Tree<C>, path: &mut VertexPath, cuts: &BTreeSet<VertexPath>) -> Option<Tree<C>> {
            if cuts.contains(path) {
                return None;
            }
            match &t.kind {
                Kind::Node(ch, h) => {
                    path.push(0);
                    let a = go(&ch[0], path, cuts);
                    path.pop();
                    path.push(1);
                    let b = go(&ch[1], path, cuts);
                    path.pop();
                    match (a, b) {
                        (Some(a), Some(b)) => {
                            Some(Tree::branch([a, b], *h as usize, t.color.clone()).with_moved(t.moved))
                        }
                        (Some(x), None) | (None, Some(x)) => Some(x),
                        (None, None) => None,
                    }
                }
                _ => Some(t.clone()),
            }
        }
        if cuts.contains(&Vec::new()) {
            return None;
        }
        match &self.kind {
            Kind::Node(ch, h) => {
                let a = go(&ch[0], &mut vec![0], cuts);
                let b = go(&ch[1], &mut vec![1], cuts);
                match (a, b) {
                    (Some(a), Some(b)) => {
                        Some(Tree::branch([a, b], *h as usize, self.color.clone()).with_moved(self.moved))
                    }
                    (Some(x), None) | (None, Some(x)) if x.is_leaf() => Some(x),
                    (Some(x), None) | (None, Some(x)) => {
                        Some(x.with_color(self.color.clone()).with_moved(self.moved))
                    }
                    (None, None) => None,
                }
            }
            _ => Some(self.clone()),
        }
    }
}

/// Is `a` a (non-strict) prefix of `b`?
pub fn is_prefix(a: &[u8], b: &[u8]) -> bool {
    a.len() <= b.len() && &b[..a.len()] == a
}

/// Are the subtrees at these paths disjoint?
pub fn disjoint(a: &[u8], b: &[u8]) -> bool {
    !is_prefix(a, b) && !is_prefix(b, a)
}

/// A finite multiset of syntactic objects, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Workspace<C = ()> {
    comps: Vec<Tree<C>>,
}

impl<C: Decor> Workspace<C> {
    pub fn new(mut comps: Vec<Tree<C>>) -> Self {
        comps.sort_by(canon_cmp);
        Workspace { comps }
    }

    pub fn components(&self) -> &[Tree<C>] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn strip(&self) -> Workspace<()> {
        Workspace::new(self.comps.iter().map(|t| t.strip()).collect())
    }
}
