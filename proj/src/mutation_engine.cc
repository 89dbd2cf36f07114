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

#include "hfuzz/mutation_engine.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace hfuzz {
namespace {

constexpr std::array<std::string_view, kNumMutationKinds> kKindNames = {
    "bit_flip",      "byte_flip",       "arith_byte",
    "interesting_byte", "copy_bytes",   "overwrite_block",
    "insert_bytes",  "delete_bytes",    "splice",
};

constexpr int kMaxArithDelta = 35;
constexpr size_t kMaxBlockLen = 32;

// Small blocks are much more likely than large ones.
size_t BlockLen(Rng& rng, size_t limit) {
  assert(limit >= 1);
  const size_t cap = std::min(limit, kMaxBlockLen);
  return 1 + rng.Below(1 + rng.Below(cap));
}

Bytes RandomBytes(Rng& rng, size_t n) {
  Bytes out(n);
  for (auto& b : out) b = static_cast<uint8_t>(rng.Below(256));
  return out;
}

MutationKind DrawKind(Rng& rng, const MutationWeights& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = rng.Uniform() * total;
  for (size_t i = 0; i < kNumMutationKinds; ++i) {
    if (u < weights[i]) return static_cast<MutationKind>(i);
    u -= weights[i];
  }
  // Rounding at the top end; pick the last operator with positive weight.
  for (size_t i = kNumMutationKinds; i-- > 0;) {
    if (weights[i] > 0) return static_cast<MutationKind>(i);
  }
  return MutationKind::kBitFlip;
}

op::OverwriteBlock DrawOverwrite(Rng& rng, size_t len) {
  const size_t n = BlockLen(rng, len);
  const size_t dst = rng.Below(len - n + 1);
  return op::OverwriteBlock{dst, RandomBytes(rng, n)};
}

}  // namespace

std::string_view MutationKindName(MutationKind kind) {
  return kKindNames[static_cast<size_t>(kind)];
}

MutationKind KindOf(const MutationOp& op) {
  return static_cast<MutationKind>(op.index());
}

void ApplyMutation(const MutationOp& mutation, Bytes& data, size_t max_len) {
  assert(max_len >= 1);
  struct Visitor {
    Bytes& data;
    size_t max_len;

    void operator()(const op::BitFlip& m) {
      if (data.empty()) return;
      const size_t bit = m.bit % (data.size() * 8);
      data[bit / 8] ^= static_cast<uint8_t>(0x80u >> (bit % 8));
    }
    void operator()(const op::ByteFlip& m) {
      if (data.empty()) return;
      data[m.position % data.size()] ^= 0xff;
    }
    void operator()(const op::ArithByte& m) {
      if (data.empty()) return;
      uint8_t& b = data[m.position % data.size()];
      b = static_cast<uint8_t>(b + m.delta);
    }
    void operator()(const op::InterestingByte& m) {
      if (data.empty()) return;
      data[m.position % data.size()] = m.value;
    }
    void operator()(const op::CopyBytes& m) {
      if (data.empty()) return;
      const size_t len = std::min(m.len, data.size());
      const size_t src = std::min(m.src, data.size() - len);
      const size_t dst = std::min(m.dst, data.size() - len);
      std::memmove(data.data() + dst, data.data() + src, len);
    }
    void operator()(const op::OverwriteBlock& m) {
      if (data.empty()) return;
      const size_t len = std::min(m.bytes.size(), data.size());
      const size_t dst = std::min(m.dst, data.size() - len);
      std::copy_n(m.bytes.begin(), len, data.begin() + dst);
    }
    void operator()(const op::InsertBytes& m) {
      const size_t room = max_len > data.size() ? max_len - data.size() : 0;
      const size_t len = std::min(m.bytes.size(), room);
      const size_t dst = std::min(m.dst, data.size());
      data.insert(data.begin() + dst, m.bytes.begin(), m.bytes.begin() + len);
    }
    void operator()(const op::DeleteBytes& m) {
      if (data.size() <= 1) return;
      const size_t len = std::min(m.len, data.size() - 1);
      const size_t dst = std::min(m.dst, data.size() - len);
      data.erase(data.begin() + dst, data.begin() + dst + len);
    }
    void operator()(const op::Splice& m) {
      const size_t cut = std::clamp<size_t>(m.cut, 1, std::max<size_t>(data.size(), 1));
      data.resize(std::min(cut, data.size()));
      if (m.other.size() > cut) {
        data.insert(data.end(), m.other.begin() + cut, m.other.end());
      }
      if (data.size() > max_len) data.resize(max_len);
    }
  };
  std::visit(Visitor{data, max_len}, mutation);
}

MutationOp DrawMutation(Rng& rng, const Bytes& data, const CorpusTree* corpus,
                        const MutationConfig& config) {
  const size_t len = data.size();
  if (len == 0) return op::InsertBytes{0, RandomBytes(rng, 1)};
  switch (DrawKind(rng, config.weights)) {
    case MutationKind::kBitFlip:
      return op::BitFlip{rng.Below(len * 8)};
    case MutationKind::kByteFlip:
      return op::ByteFlip{rng.Below(len)};
    case MutationKind::kArithByte: {
      const int magnitude = 1 + static_cast<int>(rng.Below(kMaxArithDelta));
      return op::ArithByte{rng.Below(len),
                           rng.Below(2) ? magnitude : -magnitude};
    }
    case MutationKind::kInterestingByte:
      return op::InterestingByte{
          rng.Below(len), kInterestingBytes[rng.Below(kInterestingBytes.size())]};
    case MutationKind::kCopyBytes: {
      const size_t n = BlockLen(rng, len);
      return op::CopyBytes{rng.Below(len - n + 1), rng.Below(len - n + 1), n};
    }
    case MutationKind::kOverwriteBlock:
      return DrawOverwrite(rng, len);
    case MutationKind::kInsertBytes: {
      if (len >= config.max_input_len) return DrawOverwrite(rng, len);
      const size_t n = BlockLen(rng, config.max_input_len - len);
      return op::InsertBytes{rng.Below(len + 1), RandomBytes(rng, n)};
    }
    case MutationKind::kDeleteBytes: {
      if (len == 1) return op::ByteFlip{0};
      const size_t n = BlockLen(rng, len - 1);
      return op::DeleteBytes{rng.Below(len - n + 1), n};
    }
    case MutationKind::kSplice: {
      if (corpus == nullptr || corpus->size() == 0) {
        return DrawOverwrite(rng, len);
      }
      const TestInput& other = corpus->node(rng.Below(corpus->size()));
      return op::Splice{other.data, 1 + rng.Below(len)};
    }
  }
  return op::ByteFlip{0};
}

std::vector<Offspring> GenerateOffspring(const TestInput& parent, size_t n,
                                         Rng& rng, const CorpusTree* corpus,
                                         const MutationConfig& config) {
  std::vector<Offspring> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Offspring child{parent.data, {}};
    if (child.data.size() > config.max_input_len) {
      child.data.resize(config.max_input_len);
    }
    const size_t stack = size_t{1} << rng.Below(config.max_stack_log2 + 1);
    child.ops.reserve(stack);
    for (size_t s = 0; s < stack; ++s) {
      MutationOp m = DrawMutation(rng, child.data, corpus, config);
      child.ops.push_back(KindOf(m));
      ApplyMutation(m, child.data, config.max_input_len);
    }
    out.push_back(std::move(child));
  }
  return out;
}

size_t GetFuzzPotential(const TestInput& input, size_t coverage_breadth,
                        const CorpusStats& stats, const PotentialConfig& config) {
  auto clamp_factor = [&](double x) {
    return std::clamp(x, config.factor_min, config.factor_max);
  };
  const double breadth = clamp_factor(
      static_cast<double>(coverage_breadth) / std::max(stats.mean_breadth, 1e-9));
  const double shallowness =
      clamp_factor(4.0 / (1.0 + static_cast<double>(input.depth)));
  const double shortness = clamp_factor(
      std::max(stats.mean_length, 1.0) /
      static_cast<double>(std::max<size_t>(input.data.size(), 1)));
  const double n = std::round(config.base * breadth * shallowness * shortness);
  return std::clamp(static_cast<size_t>(n), config.n_min, config.n_max);
}

absl::StatusOr<MutationWeights> ParseMutationWeights(std::string_view json_text) {
  using json = nlohmann::json;
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("mutation config is not a JSON object");
  }
  MutationWeights weights = kDefaultMutationWeights;
  if (!doc.contains("weights")) return weights;
  if (!doc["weights"].is_object()) {
    return absl::InvalidArgumentError("\"weights\" must be an object");
  }
  for (const auto& [name, value] : doc["weights"].items()) {
    auto it = std::find(kKindNames.begin(), kKindNames.end(), name);
    if (it == kKindNames.end()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown operator ", name));
    }
    if (!value.is_number() || value.get<double>() < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("weight for ", name, " must be a non-negative number"));
    }
    weights[static_cast<size_t>(it - kKindNames.begin())] = value.get<double>();
  }
  if (std::accumulate(weights.begin(), weights.end(), 0.0) <= 0) {
    return absl::InvalidArgumentError("all operator weights are zero");
  }
  return weights;
}

}  // namespace hfuzz
