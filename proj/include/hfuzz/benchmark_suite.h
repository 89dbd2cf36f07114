// Copyright 2026 The hfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in benchmark targets with seeded buffer overruns.
//
// Two kinds of vulnerable write sites are mixed:
//  * "gated" sites sit behind byte comparisons that coverage feedback can
//    climb one byte at a time, followed by an unchecked length field. Any
//    coverage-guided fuzzer finds them.
//  * "gradual" sites write to table[count] where `count` grows one step at a
//    time through branch-free input processing (token counts, key matches,
//    run lengths). Coverage does not change as `count` grows; only the write
//    position does, so headroom feedback is the only signal available.
//
// All tables are written in 8-byte records so that with the default granule
// size every step moves the write by one granule.

#ifndef HFUZZ_BENCHMARK_SUITE_H_
#define HFUZZ_BENCHMARK_SUITE_H_

#include <string_view>
#include <vector>

#include "hfuzz/target_harness.h"

namespace hfuzz {

// The shipped suite, in a fixed order.
const std::vector<Target>& BuiltinSuite();

// nullptr when no target has that name.
const Target* FindTarget(std::string_view name);

}  // namespace hfuzz

#endif  // HFUZZ_BENCHMARK_SUITE_H_
