//! Privacy budgets and per-mechanism accounting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A privacy budget: finite positive, or the infinite debug mode in which
/// every mechanism becomes its noiseless limit. The infinite mode exists so
/// oracle tests can check exact limits; the federation layer rejects it
/// unless its test flag is set.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::parameter(format!(
                "epsilon must be finite and positive, got {value}"
            )));
        }
        Ok(Epsilon(value))
    }

    pub fn infinite() -> Self {
        Epsilon(f64::INFINITY)
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::ops::Div<f64> for Epsilon {
    type Output = Epsilon;

    fn div(self, parts: f64) -> Epsilon {
        debug_assert!(parts > 0.0);
        Epsilon(self.0 / parts)
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Identifier of a participating entity. Ordering is lexicographic; synthetic
/// ids are zero-padded so index order and id order agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn from_index(i: usize) -> Self {
        EntityId(format!("e{i:03}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for EntityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// How a ledger's events compose into a total budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompositionRule {
    /// Repeated queries against one dataset: budgets add.
    SequentialWithinEntity,
    /// Disjoint datasets each querying once: the total is the maximum of the
    /// per-entity sequential totals.
    ParallelAcrossEntities,
}

/// One sub-mechanism invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEvent {
    pub mechanism: String,
    pub epsilon: Epsilon,
    pub delta: f64,
    pub entity: Option<EntityId>,
}

/// Record of every sub-mechanism invocation and its budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyLedger {
    events: Vec<LedgerEvent>,
    rule: CompositionRule,
}

impl PrivacyLedger {
    pub fn sequential() -> Self {
        PrivacyLedger {
            events: Vec::new(),
            rule: CompositionRule::SequentialWithinEntity,
        }
    }

    pub fn parallel() -> Self {
        PrivacyLedger {
            events: Vec::new(),
            rule: CompositionRule::ParallelAcrossEntities,
        }
    }

    pub fn rule(&self) -> CompositionRule {
        self.rule
    }

    pub fn events(&self) -> &[LedgerEvent] {
        &self.events
    }

    pub fn record(&mut self, mechanism: impl Into<String>, epsilon: Epsilon, delta: f64) {
        self.events.push(LedgerEvent {
            mechanism: mechanism.into(),
            epsilon,
            delta,
            entity: None,
        });
    }

    /// Fold another ledger's events in, attributing them to `entity`.
    pub fn absorb(&mut self, other: &PrivacyLedger, entity: &EntityId) {
        for ev in &other.events {
            self.events.push(LedgerEvent {
                mechanism: ev.mechanism.clone(),
                epsilon: ev.epsilon,
                delta: ev.delta,
                entity: Some(entity.clone()),
            });
        }
    }

    /// Sum of all event budgets.
    pub fn sequential_total(&self) -> f64 {
        self.events.iter().map(|e| e.epsilon.value()).sum()
    }

    /// Maximum over entities of their sequential totals. Events without an
    /// entity attribution form their own group.
    pub fn parallel_total(&self) -> f64 {
        let mut groups: std::collections::BTreeMap<Option<&EntityId>, f64> =
            std::collections::BTreeMap::new();
        for ev in &self.events {
            *groups.entry(ev.entity.as_ref()).or_insert(0.0) += ev.epsilon.value();
        }
        groups.values().fold(0.0, |acc, &v| acc.max(v))
    }

    /// Total budget under this ledger's composition rule.
    pub fn total_epsilon(&self) -> f64 {
        match self.rule {
            CompositionRule::SequentialWithinEntity => self.sequential_total(),
            CompositionRule::ParallelAcrossEntities => self.parallel_total(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps(v: f64) -> Epsilon {
        Epsilon::finite(v).unwrap()
    }

    #[test]
    fn epsilon_rejects_nonpositive() {
        assert!(Epsilon::finite(0.0).is_err());
        assert!(Epsilon::finite(-1.0).is_err());
        assert!(Epsilon::finite(f64::NAN).is_err());
        assert!(Epsilon::finite(f64::INFINITY).is_err());
    }

    #[test]
    fn sequential_total_sums() {
        let mut l = PrivacyLedger::sequential();
        l.record("a", eps(0.25), 0.0);
        l.record("b", eps(0.75), 0.1);
        assert!((l.total_epsilon() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_total_is_max_over_entities() {
        let mut global = PrivacyLedger::parallel();
        for (i, e) in [0.5, 0.5, 0.3].iter().enumerate() {
            let mut local = PrivacyLedger::sequential();
            local.record("proto", eps(*e), 0.1);
            local.record("proto", eps(*e), 0.1);
            global.absorb(&local, &EntityId::from_index(i));
        }
        assert!((global.total_epsilon() - 1.0).abs() < 1e-12);
        assert!((global.sequential_total() - 2.6).abs() < 1e-12);
    }

    #[test]
    fn parallel_le_sequential_equality_iff_single_entity() {
        let mut single = PrivacyLedger::parallel();
        let mut local = PrivacyLedger::sequential();
        local.record("m", eps(0.2), 0.0);
        local.record("m", eps(0.3), 0.0);
        single.absorb(&local, &EntityId::from_index(0));
        assert!((single.parallel_total() - single.sequential_total()).abs() < 1e-12);

        let mut multi = single.clone();
        multi.absorb(&local, &EntityId::from_index(1));
        assert!(multi.parallel_total() < multi.sequential_total());
    }
}
