// Copyright 2026 The toystab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use crate::algebra::{echelon, site_columns, StabilizerGroup, ToyElement};
use crate::error::{Error, Result};

fn check_sites(n: usize, sites: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &s in sites {
        if s >= n || std::mem::replace(&mut seen[s], true) {
            return Err(Error::Precondition(format!("bad site list {sites:?} for {n} systems")));
        }
    }
    Ok(())
}

/// Complement of `sites` in `0..n`, ascending.
pub fn complement(n: usize, sites: &[usize]) -> Vec<usize> {
    (0..n).filter(|s| !sites.contains(s)).collect()
}

/// Reduced state on `keep` (in the given order): every group element that is
/// the identity on the discarded systems, restricted to the kept ones.
pub fn partial_trace(s: &StabilizerGroup, keep: &[usize]) -> Result<StabilizerGroup> {
    if keep.is_empty() {
        return Err(Error::Precondition("partial trace needs at least one kept system".into()));
    }
    check_sites(s.n(), keep)?;
    let discard = complement(s.n(), keep);
    let mut cols = site_columns(&discard);
    cols.extend(site_columns(keep));
    let ech = echelon(s.generators(), &cols);
    let first_kept = 2 * discard.len();
    let gens: Vec<ToyElement> = ech
        .rows
        .into_iter()
        .filter(|(p, _)| cols.iter().position(|c| c == p).is_some_and(|k| k >= first_kept))
        .map(|(_, r)| r.elem.restrict(keep))
        .collect();
    StabilizerGroup::new(keep.len(), gens).map_err(|e| Error::Internal(format!("partial trace: {e}")))
}

/// An element of `s` whose symbols on `sites` equal those of `target`
/// (an element on `sites.len()` systems), if one exists.
pub(crate) fn element_with_part(s: &StabilizerGroup, sites: &[usize], target: &ToyElement) -> Option<ToyElement> {
    let cols = site_columns(sites);
    let ech = echelon(s.generators(), &cols);
    let mut residue = target.with_sign(false).embed(s.n(), sites);
    let mut product = ToyElement::identity(s.n());
    for (p, row) in &ech.rows {
        if cols.contains(p) && crate::algebra::column(&residue, *p) {
            residue.mul_assign(&row.elem);
            product.mul_assign(&row.elem);
        }
    }
    let clear = sites.iter().all(|&q| residue.get(q) == crate::algebra::ToySymbol::I);
    clear.then_some(product)
}
