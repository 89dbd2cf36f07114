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

// The tree of retained test inputs.
//
// Node 0 is the seed. Every other node records why it was retained: new
// coverage (kCoverageRetained) or a lowered headroom minimum reported by the
// driver (kHeadroomRetained). SelectNextH() alternates between those two
// classes and round-robins within each.
//
// On disk a tree is a directory of `<id>_<origin>.bin` payload files plus a
// `manifest.json` index with one {id, parent, origin, sha256, created_at}
// record per node.

#ifndef HFUZZ_CORPUS_H_
#define HFUZZ_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "hfuzz/types.h"

namespace hfuzz {

using InputId = uint64_t;

enum class Origin { kSeed, kCoverageRetained, kHeadroomRetained };

std::string_view OriginName(Origin origin);
std::optional<Origin> ParseOrigin(std::string_view name);

struct TestInput {
  InputId id = 0;
  Bytes data;
  std::optional<InputId> parent;
  Origin origin = Origin::kSeed;
  size_t depth = 0;
  // Logical creation time: the owning fuzzer's execution count when the node
  // was added. Monotonic in id order and reproducible across runs.
  uint64_t created_at = 0;

  friend bool operator==(const TestInput&, const TestInput&) = default;
};

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(ByteSpan data);

class CorpusTree {
 public:
  explicit CorpusTree(Bytes seed, uint64_t created_at = 0);

  // Adds `data` under `parent`. Returns the new id, or nullopt when a node
  // with identical bytes already exists. NotFound for an unknown parent;
  // InvalidArgument for origin kSeed.
  absl::StatusOr<std::optional<InputId>> AddChild(InputId parent, Bytes data,
                                                  Origin origin,
                                                  uint64_t created_at = 0);

  bool Contains(ByteSpan data) const;

  // Alternates between the coverage and headroom classes on successive calls,
  // round-robin by creation order within a class. Falls back to the other
  // class when the requested one is empty, and to the seed when both are.
  const TestInput& SelectNextH();

  const TestInput& root() const { return nodes_.front(); }
  const TestInput& node(InputId id) const { return nodes_.at(id); }
  const std::vector<TestInput>& nodes() const { return nodes_; }
  const std::vector<InputId>& children(InputId id) const {
    return children_.at(id);
  }
  const std::vector<InputId>& members(Origin origin) const;
  size_t size() const { return nodes_.size(); }
  size_t CountByOrigin(Origin origin) const;

  absl::Status Persist(const std::filesystem::path& dir) const;
  static absl::StatusOr<CorpusTree> Load(const std::filesystem::path& dir);

  // Node ids, parents, origins and payloads (not rotation state).
  friend bool operator==(const CorpusTree& a, const CorpusTree& b) {
    return a.nodes_ == b.nodes_;
  }

 private:
  InputId Append(TestInput node);

  std::vector<TestInput> nodes_;
  std::vector<std::vector<InputId>> children_;
  std::vector<InputId> coverage_class_;
  std::vector<InputId> headroom_class_;
  size_t coverage_cursor_ = 0;
  size_t headroom_cursor_ = 0;
  bool headroom_turn_ = false;
  std::unordered_map<std::string, InputId> by_digest_;
};

}  // namespace hfuzz

#endif  // HFUZZ_CORPUS_H_
