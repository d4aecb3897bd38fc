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


#![no_main]

use libfuzzer_sys::fuzz_target;
use toystab::algebra::StabilizerGroup;
use toystab::dynamics::{outcomes, Measurement};

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let n = usize::from(n % 4) + 1;
    let Ok(text) = std::str::from_utf8(rest) else { return };
    if let Ok(m) = Measurement::parse(n, text) {
        outcomes(&StabilizerGroup::maximally_mixed(n), &m).expect("a validated partition has outcomes");
    }
});
