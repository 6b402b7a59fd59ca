//! Theta roles as a colored operad over free symmetric Merge.
//!
//! Syntactic objects are built by [`so_core`], composed by the Merge operad in
//! [`merge_operad`], colored by the bud generating systems of [`bud_systems`],
//! checked against the theta criterion in [`criterion`], and acted on by free
//! and colored Merge in [`workspace_engine`].

pub mod bud_systems;
pub mod criterion;
pub mod error;
pub mod lexicon;
pub mod merge_operad;
pub mod so_core;
pub mod syntax;
pub mod theta_colors;
pub mod workspace_engine;

pub use error::{Error, Result};
pub use lexicon::{LexItem, Lexicon};
pub use so_core::{So, Tree, Workspace};
pub use theta_colors::{Mode, Pol, RoleInventory, ThetaColor};

/// A tree whose vertices all carry theta colors.
pub type ColoredTree = Tree<ThetaColor>;
