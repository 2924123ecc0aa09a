//! Finitely generated discrete groups, word gauges and growth.

mod gauge;
mod group;
mod growth;

pub use gauge::{
    gauge_axioms, gauge_dominates, ConstantGauge, GaugeAxiomReport, Domination, Gauge, Normalized, WordGauge,
    DEFAULT_MEMORY_BUDGET, DEFAULT_RADIUS_CAP,
};
pub use group::{make_group, Element, FiniteTable, Group, GroupDescriptor, GroupKind};
pub use growth::{ball_sizes, GrowthClass, GrowthReport};
