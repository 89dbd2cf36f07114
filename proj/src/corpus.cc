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

#include "hfuzz/corpus.h"

#include <openssl/sha.h>

#include <cassert>
#include <fstream>
#include <iterator>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace hfuzz {
namespace {

using json = nlohmann::json;

constexpr std::string_view kManifestName = "manifest.json";

std::string PayloadFileName(const TestInput& node) {
  return absl::StrCat(node.id, "_", std::string(OriginName(node.origin)), ".bin");
}

absl::StatusOr<Bytes> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

absl::Status WriteFile(const std::filesystem::path& path, ByteSpan data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path.string()));
  return absl::OkStatus();
}

}  // namespace

std::string_view OriginName(Origin origin) {
  switch (origin) {
    case Origin::kSeed:
      return "seed";
    case Origin::kCoverageRetained:
      return "coverage";
    case Origin::kHeadroomRetained:
      return "headroom";
  }
  return "?";
}

std::optional<Origin> ParseOrigin(std::string_view name) {
  for (Origin o : {Origin::kSeed, Origin::kCoverageRetained,
                   Origin::kHeadroomRetained}) {
    if (OriginName(o) == name) return o;
  }
  return std::nullopt;
}

std::string Sha256Hex(ByteSpan data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(data.data(), data.size(), digest);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * SHA256_DIGEST_LENGTH);
  for (unsigned char c : digest) {
    out.push_back(kHex[c >> 4]);
    out.push_back(kHex[c & 0xf]);
  }
  return out;
}

CorpusTree::CorpusTree(Bytes seed, uint64_t created_at) {
  Append(TestInput{0, std::move(seed), std::nullopt, Origin::kSeed, 0,
                   created_at});
}

InputId CorpusTree::Append(TestInput node) {
  const InputId id = nodes_.size();
  node.id = id;
  by_digest_.emplace(Sha256Hex(node.data), id);
  children_.emplace_back();
  if (node.parent) children_[*node.parent].push_back(id);
  if (node.origin == Origin::kCoverageRetained) coverage_class_.push_back(id);
  if (node.origin == Origin::kHeadroomRetained) headroom_class_.push_back(id);
  nodes_.push_back(std::move(node));
  return id;
}

bool CorpusTree::Contains(ByteSpan data) const {
  auto it = by_digest_.find(Sha256Hex(data));
  if (it == by_digest_.end()) return false;
  const Bytes& existing = nodes_[it->second].data;
  return std::equal(existing.begin(), existing.end(), data.begin(), data.end());
}

absl::StatusOr<std::optional<InputId>> CorpusTree::AddChild(InputId parent,
                                                            Bytes data,
                                                            Origin origin,
                                                            uint64_t created_at) {
  if (parent >= nodes_.size()) {
    return absl::NotFoundError(absl::StrCat("unknown parent id ", parent));
  }
  if (origin == Origin::kSeed) {
    return absl::InvalidArgumentError("only the root may have origin seed");
  }
  if (Contains(data)) return std::optional<InputId>();
  const size_t depth = nodes_[parent].depth + 1;
  return std::optional<InputId>(Append(
      TestInput{0, std::move(data), parent, origin, depth, created_at}));
}

const std::vector<InputId>& CorpusTree::members(Origin origin) const {
  static const std::vector<InputId> kRootOnly = {0};
  switch (origin) {
    case Origin::kCoverageRetained:
      return coverage_class_;
    case Origin::kHeadroomRetained:
      return headroom_class_;
    case Origin::kSeed:
      break;
  }
  return kRootOnly;
}

size_t CorpusTree::CountByOrigin(Origin origin) const {
  return origin == Origin::kSeed ? 1 : members(origin).size();
}

const TestInput& CorpusTree::SelectNextH() {
  const bool want_headroom = headroom_turn_;
  headroom_turn_ = !headroom_turn_;
  auto pick = [this](std::vector<InputId>& cls, size_t& cursor) {
    const InputId id = cls[cursor % cls.size()];
    cursor = (cursor % cls.size()) + 1;
    return id;
  };
  const bool has_cov = !coverage_class_.empty();
  const bool has_hdr = !headroom_class_.empty();
  if (want_headroom ? has_hdr : !has_cov && has_hdr) {
    return nodes_[pick(headroom_class_, headroom_cursor_)];
  }
  if (has_cov) return nodes_[pick(coverage_class_, coverage_cursor_)];
  return root();
}

absl::Status CorpusTree::Persist(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  json manifest = json::array();
  for (const TestInput& node : nodes_) {
    if (auto s = WriteFile(dir / PayloadFileName(node), node.data); !s.ok()) {
      return s;
    }
    manifest.push_back({
        {"id", node.id},
        {"parent", node.parent ? json(*node.parent) : json(nullptr)},
        {"origin", OriginName(node.origin)},
        {"sha256", Sha256Hex(node.data)},
        {"created_at", node.created_at},
    });
  }
  const std::string text = json{{"nodes", manifest}}.dump(2) + "\n";
  return WriteFile(dir / kManifestName,
                   ByteSpan(reinterpret_cast<const uint8_t*>(text.data()),
                            text.size()));
}

absl::StatusOr<CorpusTree> CorpusTree::Load(const std::filesystem::path& dir) {
  auto text = ReadFile(dir / kManifestName);
  if (!text.ok()) return text.status();
  json manifest = json::parse(text->begin(), text->end(), nullptr,
                              /*allow_exceptions=*/false);
  auto corrupt = [&](const std::string& why) {
    return absl::DataLossError(
        absl::StrCat("corrupt manifest in ", dir.string(), ": ", why));
  };
  if (manifest.is_discarded() || !manifest.contains("nodes") ||
      !manifest["nodes"].is_array() || manifest["nodes"].empty()) {
    return corrupt("missing or empty node list");
  }

  std::optional<CorpusTree> tree;
  for (const json& rec : manifest["nodes"]) {
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_number_unsigned() ||
        !rec.contains("origin") || !rec["origin"].is_string() ||
        !rec.contains("sha256") || !rec["sha256"].is_string() ||
        !rec.contains("parent")) {
      return corrupt("node record lacks id/parent/origin/sha256");
    }
    TestInput node;
    node.id = rec["id"].get<InputId>();
    const auto origin = ParseOrigin(rec["origin"].get<std::string>());
    if (!origin) return corrupt(absl::StrCat("node ", node.id, ": bad origin"));
    node.origin = *origin;
    if (rec.contains("created_at") && rec["created_at"].is_number_unsigned()) {
      node.created_at = rec["created_at"].get<uint64_t>();
    }
    const size_t expected_id = tree ? tree->size() : 0;
    if (node.id != expected_id) {
      return corrupt(absl::StrCat("node ids must be dense; expected ",
                                  expected_id, ", found ", node.id));
    }
    if (!rec["parent"].is_null()) {
      if (!rec["parent"].is_number_unsigned()) {
        return corrupt(absl::StrCat("node ", node.id, ": bad parent"));
      }
      node.parent = rec["parent"].get<InputId>();
    }
    auto data = ReadFile(dir / PayloadFileName(node));
    if (!data.ok()) return corrupt(std::string(data.status().message()));
    if (Sha256Hex(*data) != rec["sha256"].get<std::string>()) {
      return corrupt(absl::StrCat("node ", node.id, ": sha256 mismatch"));
    }
    if (!tree) {
      if (node.origin != Origin::kSeed || node.parent) {
        return corrupt("node 0 must be the seed and have no parent");
      }
      tree.emplace(std::move(*data), node.created_at);
      continue;
    }
    if (!node.parent || *node.parent >= node.id) {
      return corrupt(absl::StrCat("node ", node.id,
                                  ": dangling or forward parent link"));
    }
    auto added = tree->AddChild(*node.parent, std::move(*data), node.origin,
                                node.created_at);
    if (!added.ok()) return corrupt(std::string(added.status().message()));
    if (!added->has_value()) {
      return corrupt(absl::StrCat("node ", node.id, ": duplicate payload"));
    }
  }
  return *std::move(tree);
}

}  // namespace hfuzz
