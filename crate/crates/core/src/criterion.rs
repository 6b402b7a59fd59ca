//! The theta criterion, the cut at first non-theta positions, and balanced
//! theta structures.

use std::collections::BTreeSet;

use crate::bud_systems::{BudSystem, Membership};
use crate::so_core::VertexPath;
use crate::theta_colors::{outer, Mode, RoleId, RoleInventory, ThetaColor};
use crate::ColoredTree;

/// Outcome of the theta criterion on one colored tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionReport {
    pub holds: bool,
    /// The giver tuple at the head leaf, if it is one.
    pub grid: Option<Vec<RoleId>>,
    /// Receiver roles at the other leaves, in head-final order.
    pub receivers: Vec<RoleId>,
    pub reason: Option<String>,
}

/// Each argument other than the head receives one role, the head gives a
/// tuple with one role per other argument, and the roles match as
/// multisets. Arguments are the leaves, except that a proper subtree which
/// satisfies the criterion by itself is one argument showing its root
/// color. The root color plays no part. Trace leaves count as leaves.
pub fn theta_criterion(x: &ColoredTree) -> bool {
    criterion_report(x).holds
}

/// Arguments in head-final order.
fn arguments(t: &ColoredTree, path: &mut VertexPath, root: bool, out: &mut Vec<(VertexPath, ThetaColor)>) {
    let Some((h, o)) = t.split_head() else {
        out.push((path.clone(), outer(t)));
        return;
    };
    if !root && criterion_report(t).holds {
        out.push((path.clone(), outer(t)));
        return;
    }
    let hi = t.head_index().expect("node") as u8;
    path.push(1 - hi);
    arguments(o, path, false, out);
    path.pop();
    path.push(hi);
    arguments(h, path, false, out);
    path.pop();
}

pub fn criterion_report(x: &ColoredTree) -> CriterionReport {
    let mut args = Vec::new();
    arguments(x, &mut Vec::new(), true, &mut args);
    let ((_, head), rest) = args.split_last().expect("a tree has a leaf");
    let grid = head.up_tuple();
    let mut receivers = Vec::new();
    let mut reason = None;
    for (p, c) in rest {
        match c.down_role() {
            Some(r) => receivers.push(r),
            None => {
                reason.get_or_insert_with(|| format!("argument at {p:?} is not a single receiver"));
            }
        }
    }
    if let Some(g) = &grid {
        if reason.is_none() && g.len() != rest.len() {
            reason = Some(format!("grid of length {} over {} other arguments", g.len(), rest.len()));
        }
        if reason.is_none() {
            let mut a = g.clone();
            let mut b = receivers.clone();
            a.sort();
            b.sort();
            if a != b {
                reason = Some("received roles do not match the grid".into());
            }
        }
    } else {
        reason.get_or_insert_with(|| "head is not a giver".into());
    }
    CriterionReport { holds: reason.is_none(), grid, receivers, reason }
}

/// An admissible cut with its two sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    pub cuts: BTreeSet<VertexPath>,
    /// The subtrees above the cut edges, in path order.
    pub pruned: Vec<ColoredTree>,
    /// Vertices left with a single child before splicing.
    pub spliced: Vec<VertexPath>,
    /// The deletion quotient; `None` when nothing remains.
    pub remainder: Option<ColoredTree>,
}

/// Cut, on every root-to-leaf path, the edge above the first vertex that
/// shows θ₀.
pub fn cut_c0(x: &ColoredTree) -> CutResult {
    fn go(t: &ColoredTree, path: &mut VertexPath, cuts: &mut BTreeSet<VertexPath>) {
        if !path.is_empty() && outer(t).is_theta0() {
            cuts.insert(path.clone());
            return;
        }
        if let Some(ch) = t.children() {
            for (i, c) in ch.iter().enumerate() {
                path.push(i as u8);
                go(c, path, cuts);
                path.pop();
            }
        }
    }
    let mut cuts = BTreeSet::new();
    go(x, &mut Vec::new(), &mut cuts);
    let pruned = cuts.iter().map(|p| x.get(p).expect("cut path").clone()).collect();
    let spliced = x
        .vertices()
        .into_iter()
        .filter(|p| {
            x.children().is_some()
                && !cuts.iter().any(|c| crate::so_core::is_prefix(c, p))
                && x.get(p).and_then(|v| v.children()).is_some_and(|_| {
                    let mut a = p.clone();
                    a.push(0);
                    let mut b = p.clone();
                    b.push(1);
                    cuts.contains(&a) != cuts.contains(&b)
                })
        })
        .collect();
    CutResult { remainder: x.delete(&cuts), cuts, pruned, spliced }
}

/// Result of repeating the cut on every pruned piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// Deletion quotients of every round, each free of θ₀ below its root.
    pub components: Vec<ColoredTree>,
    /// Lone leaves that show θ₀ (non-theta items and moved copies).
    pub residue: Vec<ColoredTree>,
}

/// Cut at first θ₀ positions, then cut each pruned piece the same way until
/// only θ₀-free quotients and lone θ₀ leaves are left. A moved vertex is the
/// root of its unit-rule layers; cutting those strips the layers.
pub fn project_tilde_pi0(x: &ColoredTree) -> Projection {
    let mut components = Vec::new();
    let mut residue = Vec::new();
    let mut queue = vec![x.clone()];
    while let Some(t) = queue.pop() {
        if t.is_leaf() {
            residue.push(t);
            continue;
        }
        let t = t.with_moved(0);
        let cut = cut_c0(&t);
        queue.extend(cut.pruned.into_iter().rev());
        match cut.remainder {
            None => {}
            Some(r) if r.is_leaf() && outer(&r).is_theta0() => residue.push(r),
            Some(r) => components.push(r),
        }
    }
    Projection { components, residue }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub tree: ColoredTree,
    pub passes: bool,
    pub criterion: CriterionReport,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceReport {
    pub membership: Membership,
    pub components: Vec<ComponentReport>,
    pub residue: Vec<ColoredTree>,
    pub balanced: bool,
}

/// In the complete language, and every piece of the recursive projection is
/// a bare structure below its root.
pub fn is_balanced(sys: &BudSystem, x: &ColoredTree) -> BalanceReport {
    let complete = sys.with_mode(Mode::Complete);
    let bare = sys.with_mode(Mode::Bare);
    let membership = complete.membership(x);
    let proj = project_tilde_pi0(x);
    let components: Vec<ComponentReport> = proj
        .components
        .into_iter()
        .map(|tree| {
            let criterion = criterion_report(&tree);
            if tree.is_leaf() {
                return ComponentReport {
                    tree,
                    passes: false,
                    criterion,
                    reason: Some("a theta-colored leaf left on its own".into()),
                };
            }
            let m = bare.membership_in(&tree);
            ComponentReport { tree, passes: m.member, criterion, reason: m.reason }
        })
        .collect();
    let balanced = membership.member && components.iter().all(|c| c.passes);
    BalanceReport { membership, components, residue: proj.residue, balanced }
}

/// Plain-text rendering of a balance report.
pub fn render_balance(r: &BalanceReport, inv: &RoleInventory) -> String {
    use crate::syntax::print_colored;
    let mut s = String::new();
    s.push_str(&format!(
        "complete membership: {}{}\n",
        r.membership.member,
        r.membership.reason.as_ref().map(|x| format!(" ({x})")).unwrap_or_default()
    ));
    for (i, c) in r.components.iter().enumerate() {
        let grid = c
            .criterion
            .grid
            .as_ref()
            .map(|g| ThetaColor::giver(g).show(inv))
            .unwrap_or_else(|| "-".into());
        let recv: Vec<&str> = c.criterion.receivers.iter().map(|r| inv.name(*r)).collect();
        s.push_str(&format!(
            "component {i}: {} {}\n  grid {grid} matched by [{}]{}\n",
            if c.passes { "ok" } else { "FAIL" },
            print_colored(&c.tree, inv),
            recv.join(","),
            c.reason.as_ref().map(|x| format!("\n  reason: {x}")).unwrap_or_default()
        ));
    }
    for l in &r.residue {
        s.push_str(&format!("non-theta leaf: {}\n", print_colored(l, inv)));
    }
    s.push_str(&format!("balanced: {}\n", r.balanced));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicon;
    use crate::syntax::{fully_colored, parse_colored};
    use crate::theta_colors::RoleInventory;

    fn uni() -> Lexicon {
        let inv = RoleInventory::new(&["agent", "theme", "goal"], &[("agent", "theme"), ("theme", "goal")], 3).unwrap();
        Lexicon::universal(inv)
    }

    fn colored(s: &str, lex: &Lexicon) -> ColoredTree {
        fully_colored(&parse_colored(s, lex).unwrap()).unwrap()
    }

    #[test]
    fn criterion_cases() {
        let lex = uni();
        assert!(theta_criterion(&colored("((d-agent:agent_v) (g-agent:agent^)^ :0)", &lex)));
        let bad = colored(
            "((d-agent:agent_v) ((d-theme:theme_v) (g-agent-goal:G[agent,goal])^ :agent^)^ :0)",
            &lex,
        );
        assert!(!theta_criterion(&bad));
        let other = colored(
            "((d-agent:agent_v) ((g-agent-theme-goal:G[agent,theme,goal])^ ((d-theme:theme_v) (d-goal:goal_v) :theme_v) :agent^)^ :0)",
            &lex,
        );
        assert!(theta_criterion(&other));
        let nested = colored(
            "(((d-theme:theme_v) (g-theme:theme^)^ :agent_v) (g-agent:agent^)^ :0)",
            &lex,
        );
        assert!(theta_criterion(&nested));
        assert_eq!(criterion_report(&nested).receivers, vec![0]);
    }

    #[test]
    fn cut_on_rule4() {
        let lex = uni();
        let x = colored("((d-agent:agent_v)^ (z:0) :agent_v)", &lex);
        let cut = cut_c0(&x);
        assert_eq!(cut.cuts.len(), 1);
        assert_eq!(cut.pruned[0].label().unwrap().as_ref(), "z");
        assert_eq!(cut.remainder.as_ref().unwrap().label().unwrap().as_ref(), "d-agent");
        assert_eq!(cut.spliced, vec![Vec::<u8>::new()]);
        let plain = colored("((d-agent:agent_v) (g-agent:agent^)^ :0)", &lex);
        let c = cut_c0(&plain);
        assert!(c.pruned.is_empty());
        assert_eq!(c.remainder, Some(plain.clone()));
        assert_eq!(project_tilde_pi0(&plain), Projection { components: vec![plain], residue: vec![] });
    }

    #[test]
    fn balance_cases() {
        let lex = uni();
        let sys = BudSystem::new(lex.clone(), Mode::Complete);
        let full = colored(
            "((d-agent:agent_v) ((d-theme:theme_v) ((d-goal:goal_v) (g-agent-theme-goal:G[agent,theme,goal])^ :G[agent,theme])^ :agent^)^ :agent_v)",
            &lex,
        );
        assert!(is_balanced(&sys, &full).balanced);
        // one discharge short of the full comb
        let short = colored("((d-goal:goal_v) (g-agent-theme-goal:G[agent,theme,goal])^ :G[agent,theme])", &lex);
        let r = is_balanced(&sys, &short);
        assert!(r.membership.member);
        assert!(!r.balanced);
        assert!(!theta_criterion(&short));
        // an adjunct is cut away and the rest is a comb
        let adj = colored(
            "((d-agent:agent_v) ((g-agent:agent^)^ (z:0) :agent^)^ :0)",
            &lex,
        );
        let r = is_balanced(&sys, &adj);
        assert!(r.balanced);
        assert_eq!(r.residue.len(), 1);
        assert_eq!(r.components.len(), 1);
    }
}
