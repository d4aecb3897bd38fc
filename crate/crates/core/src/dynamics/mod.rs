// Copyright 2026 The toystab Authors
// SPDX-License-Identifier: Apache-2.0

//! Measurements, partial traces, purifications and irreversible maps.

mod generalized;
mod measure;
mod purify;
mod trace;

pub use generalized::{averaged_channel, generalized_map, EnsembleMember, StateEnsemble};
pub use measure::{
    branch_probability, measure, measure_observable, outcomes, update_on_branch, update_on_observable, Measurement,
    Outcome,
};
pub use purify::{purify, relate_purifications};
pub use trace::{complement, partial_trace};

pub(crate) use trace::element_with_part;
