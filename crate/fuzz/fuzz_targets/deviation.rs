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
use toystab::bvc::Deviation;
use toystab::mbtc::{OpenGraph, Pattern};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let p = Pattern::with_uniform_angle(OpenGraph::line(3).without_inputs(), 0).expect("line pattern");
    if let Ok(d) = Deviation::parse(&p, text) {
        assert_eq!(Deviation::parse(&p, &d.describe(&p)).expect("description re-parses"), d);
    }
});
