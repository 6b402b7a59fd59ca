//! Theta roles, hierarchies, grids and the color sets of the two systems.

use crate::error::{Error, Result};
use crate::so_core::{Decor, Sym, Tree};

pub type RoleId = u8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pol {
    /// giver
    Up,
    /// receiver
    Down,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ThetaColor {
    Role(RoleId, Pol),
    /// A giver tuple of length at least two: external role first.
    Grid(Vec<RoleId>),
    Theta0,
    Terminal(Sym, Box<ThetaColor>),
    UnitTerminal,
}

/// Which bud generating system a question is asked in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Bare,
    Complete,
}

impl ThetaColor {
    /// The giver tuple carried by this color, if any.
    pub fn up_tuple(&self) -> Option<Vec<RoleId>> {
        match self {
            ThetaColor::Role(r, Pol::Up) => Some(vec![*r]),
            ThetaColor::Grid(g) => Some(g.clone()),
            _ => None,
        }
    }

    pub fn down_role(&self) -> Option<RoleId> {
        match self {
            ThetaColor::Role(r, Pol::Down) => Some(*r),
            _ => None,
        }
    }

    pub fn is_theta0(&self) -> bool {
        matches!(self, ThetaColor::Theta0)
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, ThetaColor::Terminal(..) | ThetaColor::UnitTerminal)
    }

    /// Giver color for a tuple: a single role for length one, a grid otherwise.
    pub fn giver(tuple: &[RoleId]) -> ThetaColor {
        if tuple.len() == 1 {
            ThetaColor::Role(tuple[0], Pol::Up)
        } else {
            ThetaColor::Grid(tuple.to_vec())
        }
    }

    pub fn show(&self, inv: &RoleInventory) -> String {
        match self {
            ThetaColor::Role(r, Pol::Down) => format!("{}_v", inv.name(*r)),
            ThetaColor::Role(r, Pol::Up) => format!("{}^", inv.name(*r)),
            ThetaColor::Grid(g) => {
                let names: Vec<&str> = g.iter().map(|r| inv.name(*r)).collect();
                format!("G[{}]", names.join(","))
            }
            ThetaColor::Theta0 => "0".to_string(),
            ThetaColor::Terminal(a, c) => format!("({},{})", a, c.show(inv)),
            ThetaColor::UnitTerminal => "(1,0)".to_string(),
        }
    }
}

/// Vertex colors of a colored tree. The stored color of a vertex is the one
/// produced by its own rule; a moved vertex shows θ₀ to its parent.
pub fn outer(t: &Tree<ThetaColor>) -> ThetaColor {
    if t.moved > 0 {
        ThetaColor::Theta0
    } else {
        t.color.clone()
    }
}

impl Decor for ThetaColor {
    fn trace_of(t: &Tree<Self>) -> Self {
        outer(t)
    }
}

impl Decor for Option<ThetaColor> {
    fn trace_of(t: &Tree<Self>) -> Self {
        if t.moved > 0 {
            Some(ThetaColor::Theta0)
        } else {
            t.color.clone()
        }
    }
}

/// Roles with a preorder (`geq[a][b]` means a ≥ b) and the maximal valence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoleInventory {
    names: Vec<String>,
    geq: Vec<Vec<bool>>,
    n_max: usize,
}

const RESERVED: [&str; 3] = ["c", "G", "0"];

impl RoleInventory {
    /// `pairs` lists `(a, b)` with a ≥ b; the reflexive-transitive closure is taken.
    pub fn new(names: &[&str], pairs: &[(&str, &str)], n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Lexicon("n_max must be at least 1".into()));
        }
        if names.len() > RoleId::MAX as usize {
            return Err(Error::Lexicon("too many roles".into()));
        }
        for (i, n) in names.iter().enumerate() {
            let ok = !n.is_empty()
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '+')
                && !n.ends_with("_v")
                && !RESERVED.contains(n);
            if !ok {
                return Err(Error::Lexicon(format!("bad role name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::Lexicon(format!("duplicate role {n:?}")));
            }
        }
        let k = names.len();
        let mut geq = vec![vec![false; k]; k];
        for (i, row) in geq.iter_mut().enumerate() {
            row[i] = true;
        }
        let mut inv = RoleInventory { names: names.iter().map(|s| s.to_string()).collect(), geq, n_max };
        for (a, b) in pairs {
            let (a, b) = (inv.id(a)? as usize, inv.id(b)? as usize);
            inv.geq[a][b] = true;
        }
        inv.close();
        Ok(inv)
    }

    fn close(&mut self) {
        let k = self.names.len();
        for m in 0..k {
            for i in 0..k {
                if self.geq[i][m] {
                    for j in 0..k {
                        if self.geq[m][j] {
                            self.geq[i][j] = true;
                        }
                    }
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn roles(&self) -> impl Iterator<Item = RoleId> {
        0..self.names.len() as RoleId
    }

    pub fn id(&self, name: &str) -> Result<RoleId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| i as RoleId)
            .ok_or_else(|| Error::Lexicon(format!("unknown role {name:?}")))
    }

    pub fn name(&self, r: RoleId) -> &str {
        &self.names[r as usize]
    }

    pub fn geq(&self, a: RoleId, b: RoleId) -> bool {
        self.geq[a as usize][b as usize]
    }

    /// Strict order: a > b iff a ≥ b and not b ≥ a.
    pub fn gt(&self, a: RoleId, b: RoleId) -> bool {
        self.geq(a, b) && !self.geq(b, a)
    }

    /// All pairs `(a, b)` with a ≥ b, after closure.
    pub fn preorder_pairs(&self) -> Vec<(RoleId, RoleId)> {
        let mut out = Vec::new();
        for a in self.roles() {
            for b in self.roles() {
                if self.geq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_theta_hierarchy(&self, seq: &[&str]) -> Result<bool> {
        let ids = seq.iter().map(|s| self.id(s)).collect::<Result<Vec<_>>>()?;
        Ok(self.is_hierarchy(&ids))
    }

    pub fn is_hierarchy(&self, ids: &[RoleId]) -> bool {
        ids.windows(2).all(|w| self.gt(w[0], w[1]))
    }

    /// A giver tuple: length 1..=n_max, internal part a theta hierarchy.
    pub fn valid_tuple(&self, t: &[RoleId]) -> bool {
        !t.is_empty()
            && t.len() <= self.n_max
            && t.iter().all(|r| (*r as usize) < self.names.len())
            && self.is_hierarchy(&t[1..])
    }

    /// Is `c` a color of Θ₀ over this inventory?
    pub fn valid_color(&self, c: &ThetaColor) -> bool {
        match c {
            ThetaColor::Role(r, _) => (*r as usize) < self.names.len(),
            ThetaColor::Grid(g) => g.len() >= 2 && self.valid_tuple(g),
            ThetaColor::Theta0 => true,
            _ => false,
        }
    }

    /// Every valid giver tuple, ordered by length then lexicographically.
    pub fn tuples(&self) -> Vec<Vec<RoleId>> {
        let mut out: Vec<Vec<RoleId>> = self.roles().map(|r| vec![r]).collect();
        let mut frontier = out.clone();
        for _ in 1..self.n_max {
            let mut next = Vec::new();
            for t in &frontier {
                for r in self.roles() {
                    let mut u = t.clone();
                    u.push(r);
                    if self.valid_tuple(&u) {
                        next.push(u);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Θ_b: single roles of both polarities and grids.
    pub fn bare_colors(&self) -> Vec<ThetaColor> {
        let mut out = Vec::new();
        for r in self.roles() {
            out.push(ThetaColor::Role(r, Pol::Up));
            out.push(ThetaColor::Role(r, Pol::Down));
        }
        out.extend(self.tuples().into_iter().filter(|t| t.len() >= 2).map(ThetaColor::Grid));
        out.sort();
        out
    }

    /// Θ₀ = Θ_b ⊔ {θ₀}.
    pub fn theta0_colors(&self) -> Vec<ThetaColor> {
        let mut out = self.bare_colors();
        out.push(ThetaColor::Theta0);
        out.sort();
        out
    }
}

/// The giver tuple left after `k` internal roles have been discharged,
/// innermost first. A single remaining role comes back as a bare giver role.
pub fn grid_tail(g: &[RoleId], k: usize) -> Result<ThetaColor> {
    if g.is_empty() || k >= g.len().max(1) || (g.len() > 1 && k > g.len() - 1) {
        return Err(Error::Arity(format!("cannot peel {k} roles from a tuple of length {}", g.len())));
    }
    Ok(ThetaColor::giver(&g[..g.len() - k]))
}

/// ℐ for the given system.
pub fn initial_colors(inv: &RoleInventory, mode: Mode) -> Vec<ThetaColor> {
    match mode {
        Mode::Bare => inv.bare_colors(),
        Mode::Complete => inv.theta0_colors(),
    }
}

/// 𝒯 for the given system, with lexical items drawn from `items`.
pub fn terminal_colors(inv: &RoleInventory, items: &[Sym], mode: Mode) -> Vec<ThetaColor> {
    let base = initial_colors(inv, mode);
    let mut out: Vec<ThetaColor> = items
        .iter()
        .flat_map(|a| base.iter().map(move |c| ThetaColor::Terminal(a.clone(), Box::new(c.clone()))))
        .collect();
    if mode == Mode::Complete {
        out.push(ThetaColor::UnitTerminal);
    }
    out
}
