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

//! Symplectic Gram-Schmidt over the symbol space of `n` systems.

use super::element::{ToyElement, ToySymbol};

/// A symplectic basis adapted to an isotropic list of stabilizers.
#[derive(Clone, Debug)]
pub struct SymplecticBasis {
    /// The stabilizers, possibly multiplied among themselves.
    pub stabilizers: Vec<ToyElement>,
    /// `destabilizers[i]` is incompatible with `stabilizers[i]` only.
    pub destabilizers: Vec<ToyElement>,
    /// Logical `(X, Z)`-type pairs compatible with everything above.
    pub logicals: Vec<(ToyElement, ToyElement)>,
}

fn project(u: &mut ToyElement, p: &ToyElement, q: &ToyElement) {
    // Remove the components of `u` along the hyperbolic pair (p, q).
    let up = u.symplectic(p);
    let uq = u.symplectic(q);
    if uq {
        u.mul_assign(p);
    }
    if up {
        u.mul_assign(q);
    }
}

/// Extend independent, pairwise compatible `stabs` to a full symplectic basis.
///
/// Destabilizers and logicals carry `+` signs.
pub fn symplectic_basis(n: usize, stabs: &[ToyElement]) -> SymplecticBasis {
    let mut pool: Vec<ToyElement> = (0..n)
        .flat_map(|i| [ToyElement::single(n, i, ToySymbol::X), ToyElement::single(n, i, ToySymbol::Z)])
        .collect();
    let mut stabs: Vec<ToyElement> = stabs.to_vec();
    let mut destabs = Vec::new();
    for i in 0..stabs.len() {
        let s = stabs[i].clone();
        let k = pool
            .iter()
            .position(|w| w.symplectic(&s))
            .expect("stabilizers must be independent");
        let d = pool.swap_remove(k).with_sign(false);
        for u in pool.iter_mut() {
            project(u, &s, &d);
        }
        for t in stabs.iter_mut().skip(i + 1) {
            if t.symplectic(&d) {
                t.mul_assign(&s);
            }
        }
        destabs.push(d);
    }
    let mut logicals = Vec::new();
    loop {
        pool.retain(|u| !u.is_identity_symbols());
        let Some(u) = pool.first().cloned() else { break };
        let k = pool.iter().position(|v| v.symplectic(&u)).expect("nondegenerate complement");
        let v = pool.swap_remove(k);
        pool.retain(|w| *w != u);
        let (u, v) = (u.with_sign(false), v.with_sign(false));
        for w in pool.iter_mut() {
            project(w, &u, &v);
        }
        logicals.push((u, v));
    }
    SymplecticBasis { stabilizers: stabs, destabilizers: destabs, logicals }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(n: usize, stabs: &[&str]) {
        let stabs: Vec<ToyElement> = stabs.iter().map(|s| s.parse().unwrap()).collect();
        let b = symplectic_basis(n, &stabs);
        assert_eq!(b.logicals.len(), n - stabs.len());
        let mut all: Vec<(ToyElement, ToyElement)> =
            b.stabilizers.iter().cloned().zip(b.destabilizers.iter().cloned()).collect();
        all.extend(b.logicals.iter().cloned());
        for (i, (p, q)) in all.iter().enumerate() {
            assert!(p.symplectic(q));
            for (j, (r, s)) in all.iter().enumerate() {
                if i != j {
                    assert!(!p.symplectic(r) && !p.symplectic(s) && !q.symplectic(r) && !q.symplectic(s));
                }
            }
        }
    }

    #[test]
    fn bases() {
        check(1, &[]);
        check(2, &["ZZ"]);
        check(3, &["XZI", "ZXZ"]);
        check(5, &["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]);
    }
}
