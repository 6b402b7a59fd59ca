//! Lexical items with their theta annotations, loaded from JSON.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so_core::Sym;
use crate::theta_colors::{Pol, RoleId, RoleInventory, ThetaColor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexItem {
    pub id: Sym,
    pub features: BTreeSet<String>,
    /// Giver tuples, external role first.
    pub grids: Vec<Vec<RoleId>>,
    pub receivable: BTreeSet<RoleId>,
    pub theta0_capable: bool,
}

impl LexItem {
    pub fn is_giver(&self) -> bool {
        !self.grids.is_empty()
    }

    /// Does this item license the terminal color `(self, c)`?
    pub fn licenses(&self, c: &ThetaColor) -> bool {
        match c {
            ThetaColor::Role(r, Pol::Down) => self.receivable.contains(r),
            ThetaColor::Role(r, Pol::Up) => self.grids.iter().any(|g| g.len() == 1 && g[0] == *r),
            ThetaColor::Grid(g) => self.grids.contains(g),
            ThetaColor::Theta0 => self.theta0_capable,
            _ => false,
        }
    }

    /// All colors `c` with `(self, c)` licensed, in color order.
    pub fn licensed_colors(&self) -> Vec<ThetaColor> {
        let mut out: Vec<ThetaColor> = self.receivable.iter().map(|r| ThetaColor::Role(*r, Pol::Down)).collect();
        out.extend(self.grids.iter().map(|g| ThetaColor::giver(g)));
        if self.theta0_capable {
            out.push(ThetaColor::Theta0);
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug)]
pub struct Lexicon {
    inv: RoleInventory,
    items: Vec<LexItem>,
    index: HashMap<Sym, usize>,
}

#[derive(Serialize, Deserialize)]
struct RolesFile {
    inventory: Vec<String>,
    #[serde(default)]
    preorder: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct ItemFile {
    id: String,
    #[serde(default)]
    features: Vec<String>,
    #[serde(default)]
    grids: Vec<Vec<String>>,
    #[serde(default)]
    receivable: Vec<String>,
    #[serde(default)]
    theta0_capable: bool,
}

#[derive(Serialize, Deserialize)]
struct LexiconFile {
    roles: RolesFile,
    #[serde(default = "default_n_max")]
    n_max: usize,
    items: Vec<ItemFile>,
}

fn default_n_max() -> usize {
    4
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id != "*" && id.chars().all(|c| c.is_ascii_alphanumeric() || "_*+-".contains(c))
}

impl Lexicon {
    pub fn new(inv: RoleInventory, items: Vec<LexItem>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, it) in items.iter().enumerate() {
            if !valid_id(&it.id) {
                return Err(Error::Lexicon(format!("bad item id {:?}", it.id)));
            }
            if index.insert(it.id.clone(), i).is_some() {
                return Err(Error::Lexicon(format!("duplicate item id {:?}", it.id)));
            }
            for g in &it.grids {
                if !inv.valid_tuple(g) {
                    return Err(Error::Lexicon(format!("item {:?} has an invalid grid", it.id)));
                }
            }
            if it.receivable.iter().any(|r| (*r as usize) >= inv.len()) {
                return Err(Error::Lexicon(format!("item {:?} receives an unknown role", it.id)));
            }
        }
        Ok(Lexicon { inv, items, index })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: LexiconFile = serde_json::from_str(text).map_err(|e| Error::Lexicon(e.to_string()))?;
        let names: Vec<&str> = f.roles.inventory.iter().map(|s| s.as_str()).collect();
        let pairs: Vec<(&str, &str)> = f.roles.preorder.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let inv = RoleInventory::new(&names, &pairs, f.n_max)?;
        let mut items = Vec::new();
        for it in f.items {
            let grids = it
                .grids
                .iter()
                .map(|g| g.iter().map(|r| inv.id(r)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let receivable = it.receivable.iter().map(|r| inv.id(r)).collect::<Result<BTreeSet<_>>>()?;
            items.push(LexItem {
                id: Sym::from(it.id.as_str()),
                features: it.features.into_iter().collect(),
                grids,
                receivable,
                theta0_capable: it.theta0_capable,
            });
        }
        Lexicon::new(inv, items)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let p = path.as_ref();
        let text = std::fs::read_to_string(p).map_err(|e| Error::Lexicon(format!("{}: {e}", p.display())))?;
        Lexicon::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let inv = &self.inv;
        let f = LexiconFile {
            roles: RolesFile {
                inventory: inv.roles().map(|r| inv.name(r).to_string()).collect(),
                preorder: inv
                    .preorder_pairs()
                    .into_iter()
                    .filter(|(a, b)| a != b)
                    .map(|(a, b)| (inv.name(a).to_string(), inv.name(b).to_string()))
                    .collect(),
            },
            n_max: inv.n_max(),
            items: self
                .items
                .iter()
                .map(|it| ItemFile {
                    id: it.id.to_string(),
                    features: it.features.iter().cloned().collect(),
                    grids: it.grids.iter().map(|g| g.iter().map(|r| inv.name(*r).to_string()).collect()).collect(),
                    receivable: it.receivable.iter().map(|r| inv.name(*r).to_string()).collect(),
                    theta0_capable: it.theta0_capable,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("lexicon serializes")
    }

    /// One item per licensable color: receivers `d-<role>`, givers
    /// `g-<role>-...`, and a non-theta item `z`.
    pub fn universal(inv: RoleInventory) -> Self {
        let mut items = Vec::new();
        for r in inv.roles() {
            items.push(LexItem {
                id: Sym::from(format!("d-{}", inv.name(r)).as_str()),
                features: BTreeSet::new(),
                grids: vec![],
                receivable: [r].into_iter().collect(),
                theta0_capable: false,
            });
        }
        for t in inv.tuples() {
            let name: Vec<&str> = t.iter().map(|r| inv.name(*r)).collect();
            items.push(LexItem {
                id: Sym::from(format!("g-{}", name.join("-")).as_str()),
                features: BTreeSet::new(),
                grids: vec![t],
                receivable: BTreeSet::new(),
                theta0_capable: false,
            });
        }
        items.push(LexItem {
            id: Sym::from("z"),
            features: BTreeSet::new(),
            grids: vec![],
            receivable: BTreeSet::new(),
            theta0_capable: true,
        });
        Lexicon::new(inv, items).expect("universal lexicon is well formed")
    }

    pub fn inventory(&self) -> &RoleInventory {
        &self.inv
    }

    pub fn items(&self) -> &[LexItem] {
        &self.items
    }

    pub fn get(&self, id: &str) -> Option<&LexItem> {
        self.index.get(id).map(|&i| &self.items[i])
    }

    pub fn require(&self, id: &str) -> Result<&LexItem> {
        self.get(id).ok_or_else(|| Error::Lexicon(format!("unknown lexical item {id:?}")))
    }

    pub fn ids(&self) -> Vec<Sym> {
        self.items.iter().map(|it| it.id.clone()).collect()
    }

    /// The universal item standing for a color (see [`Lexicon::universal`]).
    pub fn universal_item_for(&self, c: &ThetaColor) -> Option<&LexItem> {
        self.items.iter().find(|it| it.licensed_colors() == vec![c.clone()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GIVE: &str = r#"{
      "roles": {"inventory": ["agent","theme","goal"], "preorder": [["agent","theme"],["theme","goal"]]},
      "n_max": 4,
      "items": [
        {"id": "Mary", "features": ["N"], "receivable": ["agent"]},
        {"id": "gave", "features": ["V"], "grids": [["agent","theme","goal"]]},
        {"id": "often", "theta0_capable": true}
      ]
    }"#;

    #[test]
    fn loads_and_licenses() {
        let lex = Lexicon::from_json(GIVE).unwrap();
        let gave = lex.get("gave").unwrap();
        assert!(gave.licenses(&ThetaColor::Grid(vec![0, 1, 2])));
        assert!(!gave.licenses(&ThetaColor::Theta0));
        assert!(lex.get("often").unwrap().licenses(&ThetaColor::Theta0));
        assert_eq!(lex.get("Mary").unwrap().licensed_colors(), vec![ThetaColor::Role(0, Pol::Down)]);
        let again = Lexicon::from_json(&lex.to_json()).unwrap();
        assert_eq!(again.items(), lex.items());
    }

    #[test]
    fn rejects_bad_input() {
        let bad_role = GIVE.replace("[\"agent\",\"theme\",\"goal\"]]", "[\"agent\",\"nobody\"]]");
        assert!(matches!(Lexicon::from_json(&bad_role), Err(Error::Lexicon(_))));
        let bad_grid = GIVE.replace("[\"agent\",\"theme\",\"goal\"]]", "[\"agent\",\"goal\",\"theme\"]]");
        assert!(Lexicon::from_json(&bad_grid).is_err());
        let dup = GIVE.replace("\"often\"", "\"Mary\"");
        assert!(Lexicon::from_json(&dup).is_err());
    }

    #[test]
    fn universal_covers_colors() {
        let inv = RoleInventory::new(&["agent", "theme"], &[("agent", "theme")], 3).unwrap();
        let lex = Lexicon::universal(inv.clone());
        for c in inv.theta0_colors() {
            assert!(lex.universal_item_for(&c).is_some(), "{c:?}");
        }
    }
}
