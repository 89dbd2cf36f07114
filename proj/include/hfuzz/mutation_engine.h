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

// Havoc-style genetic operators, offspring generation and the fuzz-potential
// heuristic.

#ifndef HFUZZ_MUTATION_ENGINE_H_
#define HFUZZ_MUTATION_ENGINE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "hfuzz/corpus.h"
#include "hfuzz/types.h"

namespace hfuzz {

// Seedable generator with a platform-independent stream (std distributions
// are not portable across standard libraries, so draws are done here).
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform in [0, n); n > 0.
  uint64_t Below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }
  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

enum class MutationKind : uint8_t {
  kBitFlip,
  kByteFlip,
  kArithByte,
  kInterestingByte,
  kCopyBytes,
  kOverwriteBlock,
  kInsertBytes,
  kDeleteBytes,
  kSplice,
};
inline constexpr size_t kNumMutationKinds = 9;

std::string_view MutationKindName(MutationKind kind);

namespace op {
struct BitFlip {
  size_t bit;  // bit 0 is the most significant bit of byte 0
};
struct ByteFlip {
  size_t position;
};
struct ArithByte {
  size_t position;
  int delta;  // [-35, 35]
};
struct InterestingByte {
  size_t position;
  uint8_t value;
};
struct CopyBytes {
  size_t src;
  size_t dst;
  size_t len;
};
struct OverwriteBlock {
  size_t dst;
  Bytes bytes;
};
struct InsertBytes {
  size_t dst;
  Bytes bytes;
};
struct DeleteBytes {
  size_t dst;
  size_t len;
};
struct Splice {
  Bytes other;
  size_t cut;  // result = data[0, cut) ++ other[cut, ...)
};
}  // namespace op

using MutationOp =
    std::variant<op::BitFlip, op::ByteFlip, op::ArithByte, op::InterestingByte,
                 op::CopyBytes, op::OverwriteBlock, op::InsertBytes,
                 op::DeleteBytes, op::Splice>;

MutationKind KindOf(const MutationOp& op);

inline constexpr std::array<uint8_t, 9> kInterestingBytes = {
    0x80, 0xff, 0x00, 0x01, 0x10, 0x20, 0x40, 0x64, 0x7f};

// Applies `op` in place. Out-of-range parameters are clamped so that the
// result stays within [1, max_len] bytes.
void ApplyMutation(const MutationOp& op, Bytes& data, size_t max_len);

using MutationWeights = std::array<double, kNumMutationKinds>;

inline constexpr MutationWeights kDefaultMutationWeights = {
    1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

// Parses {"weights": {"bit_flip": 2.0, ...}}; unnamed operators keep their
// default weight.
absl::StatusOr<MutationWeights> ParseMutationWeights(std::string_view json_text);

struct PotentialConfig {
  size_t n_min = 16;
  size_t n_max = 4096;
  double base = 256.0;
  double factor_min = 0.25;
  double factor_max = 4.0;
};

struct MutationConfig {
  size_t max_input_len = 4096;
  MutationWeights weights = kDefaultMutationWeights;
  // Each offspring stacks 2^k operators, k uniform in [0, max_stack_log2].
  int max_stack_log2 = 3;
  PotentialConfig potential;
};

// Corpus-wide averages that normalize the fuzz-potential factors.
struct CorpusStats {
  double mean_breadth = 1.0;
  double mean_length = 1.0;
};

// N = clamp(base * f * g * h, n_min, n_max) with every factor clamped to
// [factor_min, factor_max]:
//   f = coverage_breadth / mean_breadth   (broad inputs get more offspring)
//   g = 4 / (1 + depth)                   (shallow inputs get more)
//   h = mean_length / length              (short inputs get more)
size_t GetFuzzPotential(const TestInput& input, size_t coverage_breadth,
                        const CorpusStats& stats, const PotentialConfig& config);

MutationOp DrawMutation(Rng& rng, const Bytes& data, const CorpusTree* corpus,
                        const MutationConfig& config);

struct Offspring {
  Bytes data;
  std::vector<MutationKind> ops;
};

// Produces exactly `n` mutants of `parent.data`; `corpus` (may be null)
// supplies splice partners.
std::vector<Offspring> GenerateOffspring(const TestInput& parent, size_t n,
                                         Rng& rng, const CorpusTree* corpus,
                                         const MutationConfig& config);

}  // namespace hfuzz

#endif  // HFUZZ_MUTATION_ENGINE_H_
