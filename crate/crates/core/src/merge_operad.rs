//! The Merge operad with heads: insertion, composition and the action on
//! syntactic objects.
//!
//! An operation of arity n is a headed tree with n holes. Inputs are numbered
//! 1..=n in head-final leaf order.

use crate::error::{Error, Result};
use crate::so_core::{Decor, Kind, So, Tree};

pub type OperadElement = So;

/// The identity operation.
pub fn unit() -> OperadElement {
    So::hole(())
}

/// The binary operation `𝔐`. Input 2 is the head.
pub fn cherry() -> OperadElement {
    So::branch([unit(), unit()], 0, ())
}

pub fn arity<C>(x: &Tree<C>) -> usize {
    x.leaf_count()
}

/// `x ∘ᵢ y`: graft `y` at input `i` (1-based, head-final order).
pub fn insert<C: Decor>(x: &Tree<C>, i: usize, y: &Tree<C>) -> Result<Tree<C>> {
    let leaves = x.leaves_head_final();
    if i == 0 || i > leaves.len() {
        return Err(Error::Arity(format!("input {i} of an operation of arity {}", leaves.len())));
    }
    Ok(x.replace(&leaves[i - 1], y.clone()))
}

/// `γ(x; y₁,…,yₙ) = (⋯(x ∘ₙ yₙ)⋯) ∘₁ y₁`.
pub fn compose<C: Decor>(x: &Tree<C>, ys: &[Tree<C>]) -> Result<Tree<C>> {
    let n = x.leaf_count();
    if ys.len() != n {
        return Err(Error::Arity(format!("{} arguments for an operation of arity {n}", ys.len())));
    }
    let mut acc = x.clone();
    for i in (1..=n).rev() {
        acc = insert(&acc, i, &ys[i - 1])?;
    }
    Ok(acc)
}

/// The action on syntactic objects: plug the roots of `args` into the holes.
pub fn act(x: &OperadElement, args: &[So]) -> Result<So> {
    if let Some(bad) = x.leaves().iter().find(|l| !matches!(l.kind, Kind::Hole)) {
        return Err(Error::Arity(format!("operation has a labeled leaf {:?}", bad.label())));
    }
    compose(x, args)
}

/// `𝔐(T, 1) = T`.
pub fn merge_unary<C: Clone>(t: &Tree<C>) -> Tree<C> {
    t.clone()
}

/// All headed shapes with `n` holes.
pub fn shapes(n: usize) -> Vec<OperadElement> {
    let mut table: Vec<Vec<OperadElement>> = vec![vec![], vec![unit()]];
    for k in 2..=n {
        let mut out = std::collections::BTreeSet::new();
        for a in 1..=k / 2 {
            let b = k - a;
            for x in &table[a] {
                for y in &table[b] {
                    out.insert(So::branch([x.clone(), y.clone()], 0, ()));
                    out.insert(So::branch([x.clone(), y.clone()], 1, ()));
                }
            }
        }
        table.push(out.into_iter().collect());
    }
    table.get(n).cloned().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_so;

    fn p(s: &str) -> So {
        parse_so(s, None).unwrap()
    }

    #[test]
    fn unit_laws() {
        let y = p("(* (*^ *))");
        assert_eq!(insert(&unit(), 1, &y).unwrap(), y);
        for i in 1..=3 {
            assert_eq!(insert(&y, i, &unit()).unwrap(), y);
        }
        assert_eq!(compose(&y, &[unit(), unit(), unit()]).unwrap(), y);
        assert_eq!(merge_unary(&p("a")), p("a"));
        assert_eq!(merge_unary(&p("(a b)")), p("(a b)"));
    }

    #[test]
    fn small_compositions() {
        let comb = insert(&cherry(), 2, &cherry()).unwrap();
        assert_eq!(comb, p("(* (*^ *)^)"));
        let balanced = compose(&cherry(), &[cherry(), cherry()]).unwrap();
        assert_eq!(balanced, p("((*^ *)^ (*^ *))"));
        assert!(matches!(insert(&cherry(), 3, &cherry()), Err(Error::Arity(_))));
        assert!(compose(&cherry(), &[unit()]).is_err());
    }

    #[test]
    fn action_on_displayed_example() {
        let x = p("(* (*^ *)^)");
        let args = [p("(alpha beta)"), p("(gamma delta)"), p("(epsilon (zeta eta))")];
        let out = act(&x, &args).unwrap();
        let strip_heads = |t: &So| print_shape(t);
        assert_eq!(strip_heads(&out), strip_heads(&p("((alpha beta) ((gamma delta) (epsilon (zeta eta))))")));
        assert_eq!(out.leaf_count(), 7);
    }

    fn print_shape(t: &So) -> String {
        match t.children() {
            None => crate::syntax::print_so(t),
            Some(ch) => {
                let mut v = [print_shape(&ch[0]), print_shape(&ch[1])];
                v.sort();
                format!("({} {})", v[0], v[1])
            }
        }
    }

    #[test]
    fn shape_counts() {
        // headed non-planar shapes: 1, 1, 2, 5, 14 (Catalan)
        let counts: Vec<usize> = (1..=5).map(|n| shapes(n).len()).collect();
        assert_eq!(counts, [1, 1, 2, 5, 14]);
    }
}
