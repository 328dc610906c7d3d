use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::error::SymError;
use super::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    Coordinate,
    Momentum,
    Velocity,
    Parameter,
}

/// Index of a symbol inside its [`SymbolTable`]; also the variable index of
/// the polynomial ring, so registration order fixes the monomial order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub(crate) usize);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    /// Parameter declared strictly positive.
    pub positive: bool,
    /// For velocities, the coordinate they are the time derivative of.
    pub partner: Option<SymbolId>,
}

/// Alias definition `symbol := numerator / denominator`, stored as raw
/// polynomials so the table does not own expressions referring back to it.
#[derive(Clone, Debug)]
pub(crate) struct AliasDef {
    pub symbol: SymbolId,
    pub num: Poly,
    pub den: Poly,
}

/// Frozen registry of symbols. Shared behind an `Arc` by every expression.
#[derive(Debug)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
    pub(crate) aliases: Vec<AliasDef>,
}

impl SymbolTable {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, name: &str) -> Result<SymbolId, SymError> {
        self.lookup(name)
            .ok_or_else(|| SymError::UnknownIdentifier {
                name: name.to_string(),
                position: 0,
            })
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.0]
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0].name
    }

    pub fn kind(&self, id: SymbolId) -> SymbolKind {
        self.symbols[id.0].kind
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbols.len()).map(SymbolId)
    }

    pub fn of_kind(&self, kind: SymbolKind) -> Vec<SymbolId> {
        self.ids().filter(|&id| self.kind(id) == kind).collect()
    }

    /// Velocity symbol paired with `coordinate`, if one was registered.
    pub fn velocity_of(&self, coordinate: SymbolId) -> Option<SymbolId> {
        self.ids().find(|&id| {
            self.kind(id) == SymbolKind::Velocity && self.symbols[id.0].partner == Some(coordinate)
        })
    }

    pub fn has_aliases(&self) -> bool {
        !self.aliases.is_empty()
    }
}

#[derive(Default, Debug)]
pub struct SymbolTableBuilder {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
    aliases: Vec<(String, String)>,
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SymbolTableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(
        &mut self,
        name: &str,
        kind: SymbolKind,
        positive: bool,
        partner: Option<SymbolId>,
    ) -> Result<SymbolId, SymError> {
        if !valid_identifier(name) {
            return Err(SymError::InvalidName(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(SymError::DuplicateSymbol(name.to_string()));
        }
        let id = SymbolId(self.symbols.len());
        self.symbols.push(Symbol {
            name: name.to_string(),
            kind,
            positive,
            partner,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn coordinate(&mut self, name: &str) -> Result<SymbolId, SymError> {
        self.push(name, SymbolKind::Coordinate, false, None)
    }

    pub fn momentum(&mut self, name: &str) -> Result<SymbolId, SymError> {
        self.push(name, SymbolKind::Momentum, false, None)
    }

    pub fn velocity(&mut self, name: &str, coordinate: &str) -> Result<SymbolId, SymError> {
        let partner = *self
            .by_name
            .get(coordinate)
            .ok_or_else(|| SymError::UnknownIdentifier {
                name: coordinate.to_string(),
                position: 0,
            })?;
        if self.symbols[partner.0].kind != SymbolKind::Coordinate {
            return Err(SymError::VelocityPairing(name.to_string()));
        }
        if self
            .symbols
            .iter()
            .any(|s| s.kind == SymbolKind::Velocity && s.partner == Some(partner))
        {
            return Err(SymError::VelocityPairing(name.to_string()));
        }
        self.push(name, SymbolKind::Velocity, false, Some(partner))
    }

    pub fn parameter(&mut self, name: &str, positive: bool) -> Result<SymbolId, SymError> {
        self.push(name, SymbolKind::Parameter, positive, None)
    }

    /// Registers `name := definition`; `name` must be a parameter and the
    /// definition may only mention parameters.
    pub fn alias(&mut self, name: &str, definition: &str) -> Result<(), SymError> {
        self.aliases
            .push((name.to_string(), definition.to_string()));
        Ok(())
    }

    pub fn build(self) -> Result<Arc<SymbolTable>, SymError> {
        let plain = Arc::new(SymbolTable {
            symbols: self.symbols.clone(),
            by_name: self.by_name.clone(),
            aliases: Vec::new(),
        });
        let mut aliases = Vec::new();
        for (name, text) in &self.aliases {
            let id = plain
                .lookup(name)
                .ok_or_else(|| SymError::UnknownIdentifier {
                    name: name.clone(),
                    position: 0,
                })?;
            if plain.kind(id) != SymbolKind::Parameter {
                return Err(SymError::InvalidAlias {
                    name: name.clone(),
                    reason: "only parameters can be aliased".into(),
                });
            }
            let def = super::parse(text, &plain)?;
            if def
                .free_symbols()
                .iter()
                .any(|&s| plain.kind(s) != SymbolKind::Parameter)
            {
                return Err(SymError::InvalidAlias {
                    name: name.clone(),
                    reason: "definition must contain parameters only".into(),
                });
            }
            if def.depends_on(id) {
                return Err(SymError::InvalidAlias {
                    name: name.clone(),
                    reason: "definition refers to itself".into(),
                });
            }
            aliases.push(AliasDef {
                symbol: id,
                num: def.numerator().clone(),
                den: def.denominator().clone(),
            });
        }
        let table = Arc::new(SymbolTable {
            symbols: self.symbols,
            by_name: self.by_name,
            aliases,
        });
        super::expr::check_aliases_acyclic(&table)?;
        Ok(table)
    }
}

/// Ordered canonical pairs `(q_i, p_i)` with `{q_i, p_j} = δ_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSpace {
    pairs: Vec<(SymbolId, SymbolId)>,
}

impl PhaseSpace {
    pub fn new(pairs: Vec<(SymbolId, SymbolId)>) -> Result<Self, SymError> {
        let mut seen = std::collections::HashSet::new();
        for &(q, p) in &pairs {
            if !seen.insert(q) || !seen.insert(p) {
                return Err(SymError::OverlappingPhaseSpace);
            }
        }
        Ok(PhaseSpace { pairs })
    }

    /// Pairs every registered coordinate with the momentum of the same rank.
    pub fn from_table(table: &SymbolTable) -> Result<Self, SymError> {
        let qs = table.of_kind(SymbolKind::Coordinate);
        let ps = table.of_kind(SymbolKind::Momentum);
        if qs.len() != ps.len() {
            return Err(SymError::OverlappingPhaseSpace);
        }
        Self::new(qs.into_iter().zip(ps).collect())
    }

    pub fn pairs(&self) -> &[(SymbolId, SymbolId)] {
        &self.pairs
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn coordinates(&self) -> Vec<SymbolId> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn momenta(&self) -> Vec<SymbolId> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    pub fn variables(&self) -> Vec<SymbolId> {
        self.coordinates()
            .into_iter()
            .chain(self.momenta())
            .collect()
    }

    pub fn contains(&self, s: SymbolId) -> bool {
        self.pairs.iter().any(|&(q, p)| q == s || p == s)
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SymbolKind::Coordinate => "coordinate",
            SymbolKind::Momentum => "momentum",
            SymbolKind::Velocity => "velocity",
            SymbolKind::Parameter => "parameter",
        };
        f.write_str(s)
    }
}
