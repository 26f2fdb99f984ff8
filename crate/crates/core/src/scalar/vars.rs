//! Variable registry.
//!
//! Every polynomial shares one ordered registry so exponent vectors can be
//! fixed-width arrays. Built-in names occupy the first slots; further names
//! are interned on first use and never removed, so an index is stable for the
//! life of the process.

use std::fmt;
use std::sync::{OnceLock, RwLock};

/// Maximum number of distinct variables.
pub const MAX_VARS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    /// Negative exponents allowed inside a single polynomial.
    pub laurent: bool,
    /// Exponent `e` stands for `name^(e/root)`.
    pub root: u32,
}

/// Index into the registry. Smaller index sorts first under graded-lex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub(crate) u8);

const BUILTIN: [(&str, bool); 9] = [
    ("v", true),
    ("y", true),
    ("z", true),
    ("w", true),
    ("a", true),
    ("xi", false),
    ("eta", false),
    ("gamma", false),
    ("sigma", false),
];

fn registry() -> &'static RwLock<Vec<VarInfo>> {
    static REG: OnceLock<RwLock<Vec<VarInfo>>> = OnceLock::new();
    REG.get_or_init(|| {
        RwLock::new(
            BUILTIN
                .iter()
                .map(|(n, l)| VarInfo {
                    name: n.to_string(),
                    laurent: *l,
                    root: 1,
                })
                .collect(),
        )
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VarError {
    #[error("variable registry is full ({MAX_VARS} names)")]
    Full,
    #[error("invalid variable name {0:?}")]
    BadName(String),
    #[error("variable {0} already registered with different flags")]
    Conflict(String),
}

fn valid_name(s: &str) -> bool {
    let mut it = s.chars();
    matches!(it.next(), Some(c) if c.is_ascii_alphabetic())
        && it.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "q"
}

impl Var {
    pub const V: Var = Var(0);
    pub const Y: Var = Var(1);
    pub const Z: Var = Var(2);
    pub const W: Var = Var(3);
    pub const A: Var = Var(4);
    pub const XI: Var = Var(5);
    pub const ETA: Var = Var(6);
    pub const GAMMA: Var = Var(7);
    pub const SIGMA: Var = Var(8);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Look up a name, registering it (non-Laurent, root 1) if new.
    pub fn named(name: &str) -> Result<Var, VarError> {
        if let Some(v) = Var::lookup(name) {
            return Ok(v);
        }
        Var::register(name, false, 1)
    }

    pub fn lookup(name: &str) -> Option<Var> {
        let reg = registry().read().unwrap();
        reg.iter().position(|i| i.name == name).map(|i| Var(i as u8))
    }

    pub fn register(name: &str, laurent: bool, root: u32) -> Result<Var, VarError> {
        if !valid_name(name) || root == 0 {
            return Err(VarError::BadName(name.to_string()));
        }
        let mut reg = registry().write().unwrap();
        if let Some(i) = reg.iter().position(|i| i.name == name) {
            let info = &reg[i];
            if info.laurent != laurent || info.root != root {
                return Err(VarError::Conflict(name.to_string()));
            }
            return Ok(Var(i as u8));
        }
        if reg.len() >= MAX_VARS {
            return Err(VarError::Full);
        }
        reg.push(VarInfo {
            name: name.to_string(),
            laurent,
            root,
        });
        Ok(Var((reg.len() - 1) as u8))
    }

    pub fn info(self) -> VarInfo {
        registry().read().unwrap()[self.index()].clone()
    }

    pub fn name(self) -> String {
        self.info().name
    }

    pub fn count() -> usize {
        registry().read().unwrap().len()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
