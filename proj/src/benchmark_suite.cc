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

#include "hfuzz/benchmark_suite.h"

#include <algorithm>
#include <string>

namespace hfuzz {
namespace {

constexpr size_t kRecord = 8;

Bytes Str(std::string_view s) { return Bytes(s.begin(), s.end()); }

Bytes Cat(Bytes a, const Bytes& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

size_t CountByte(ByteSpan in, size_t from, uint8_t value) {
  size_t n = 0;
  for (size_t i = from; i < in.size(); ++i) n += (in[i] == value);
  return n;
}

// ---------------------------------------------------------------------------
// lenfield_copy: copies input[0] bytes into a 32-byte buffer.

constexpr LocationId kLfEntry = Loc("lenfield_copy:entry");
constexpr LocationId kLfEmpty = Loc("lenfield_copy:empty");
constexpr LocationId kLfLoop = Loc("lenfield_copy:loop");
constexpr LocationId kLfDone = Loc("lenfield_copy:done");
constexpr LocationId kLfAlloc = Loc("lenfield_copy.buffer");
constexpr LocationId kLfCopy = Loc("lenfield_copy.copy");

void LenfieldCopy(ByteSpan in, ExecContext& ctx) {
  ctx.Block(kLfEntry);
  const BufferHandle buf = ctx.Alloc(32, kLfAlloc);
  if (in.empty()) {
    ctx.Block(kLfEmpty);
    return;
  }
  const size_t n = in[0];
  for (size_t i = 0; i < n; ++i) {
    ctx.Block(kLfLoop);
    ctx.Write(buf, static_cast<int64_t>(i), 1, kLfCopy);
  }
  ctx.Block(kLfDone);
}

// ---------------------------------------------------------------------------
// magic_header: "FUZ" magic, then an option table indexed by the number of
// 0xEE option bytes, then a name copy of input[3] bytes into 16 bytes.

constexpr size_t kMhOptionRecords = 6;
constexpr LocationId kMhEntry = Loc("magic_header:entry");
constexpr LocationId kMhShort = Loc("magic_header:short");
constexpr LocationId kMhM1 = Loc("magic_header:magic1");
constexpr LocationId kMhM2 = Loc("magic_header:magic2");
constexpr LocationId kMhM3 = Loc("magic_header:magic3");
constexpr LocationId kMhReject = Loc("magic_header:reject");
constexpr LocationId kMhNameLoop = Loc("magic_header:name_loop");
constexpr LocationId kMhDone = Loc("magic_header:done");
constexpr LocationId kMhOptAlloc = Loc("magic_header.options");
constexpr LocationId kMhNameAlloc = Loc("magic_header.name");
constexpr LocationId kMhOption = Loc("magic_header.option_slot");
constexpr LocationId kMhName = Loc("magic_header.name_copy");

void MagicHeader(ByteSpan in, ExecContext& ctx) {
  ctx.Block(kMhEntry);
  const BufferHandle options = ctx.Alloc(kMhOptionRecords * kRecord, kMhOptAlloc);
  const BufferHandle name = ctx.Alloc(16, kMhNameAlloc);
  if (in.size() < 4) {
    ctx.Block(kMhShort);
    return;
  }
  if (in[0] != 'F') return ctx.Block(kMhReject);
  ctx.Block(kMhM1);
  if (in[1] != 'U') return ctx.Block(kMhReject);
  ctx.Block(kMhM2);
  if (in[2] != 'Z') return ctx.Block(kMhReject);
  ctx.Block(kMhM3);

  const size_t option_count = CountByte(in, 4, 0xEE);
  ctx.Write(options, static_cast<int64_t>(option_count * kRecord), kRecord,
            kMhOption);

  const size_t name_len = in[3];
  for (size_t i = 0; i < name_len; ++i) {
    ctx.Block(kMhNameLoop);
    ctx.Write(name, static_cast<int64_t>(i), 1, kMhName);
  }
  ctx.Block(kMhDone);
}

// ---------------------------------------------------------------------------
// token_histogram: counts 'Z' and '#' tokens, then bumps histogram[count].

constexpr size_t kThRecords = 6;
constexpr LocationId kThEntry = Loc("token_histogram:entry");
constexpr LocationId kThScan = Loc("token_histogram:scan");
constexpr LocationId kThTally = Loc("token_histogram:tally");
constexpr LocationId kThZAlloc = Loc("token_histogram.z_hist");
constexpr LocationId kThHashAlloc = Loc("token_histogram.hash_hist");
constexpr LocationId kThZ = Loc("token_histogram.z_slot");
constexpr LocationId kThHash = Loc("token_histogram.hash_slot");

void TokenHistogram(ByteSpan in, ExecContext& ctx) {
  ctx.Block(kThEntry);
  const BufferHandle z_hist = ctx.Alloc(kThRecords * kRecord, kThZAlloc);
  const BufferHandle hash_hist = ctx.Alloc(kThRecords * kRecord, kThHashAlloc);
  size_t z = 0;
  size_t hash = 0;
  for (uint8_t b : in) {
    ctx.Block(kThScan);
    z += (b == 'Z');
    hash += (b == '#');
  }
  ctx.Block(kThTally);
  ctx.Write(z_hist, static_cast<int64_t>(z * kRecord), kRecord, kThZ);
  ctx.Write(hash_hist, static_cast<int64_t>(hash * kRecord), kRecord, kThHash);
}

// ---------------------------------------------------------------------------
// keyed_match: scores the first 32 bytes against a positional key and
// records the score in a fixed table.

constexpr size_t kKmRecords = 6;
constexpr size_t kKmKeyLen = 32;
constexpr LocationId kKmEntry = Loc("keyed_match:entry");
constexpr LocationId kKmScan = Loc("keyed_match:scan");
constexpr LocationId kKmScore = Loc("keyed_match:score");
constexpr LocationId kKmAlloc = Loc("keyed_match.scores");
constexpr LocationId kKmSlot = Loc("keyed_match.score_slot");

constexpr uint8_t KeyAt(size_t i) {
  return static_cast<uint8_t>((i * 37 + 11) & 0xff);
}

void KeyedMatch(ByteSpan in, ExecContext& ctx) {
  ctx.Block(kKmEntry);
  const BufferHandle scores = ctx.Alloc(kKmRecords * kRecord, kKmAlloc);
  const size_t n = std::min(in.size(), kKmKeyLen);
  size_t matches = 0;
  for (size_t i = 0; i < n; ++i) {
    ctx.Block(kKmScan);
    matches += (in[i] == KeyAt(i));
  }
  ctx.Block(kKmScore);
  ctx.Write(scores, static_cast<int64_t>(matches * kRecord), kRecord, kKmSlot);
}

// ---------------------------------------------------------------------------
// sequence_run: longest ascending (+1) and descending (-1) byte runs index
// two run-length tables.

constexpr size_t kSrRecords = 5;
constexpr LocationId kSrEntry = Loc("sequence_run:entry");
constexpr LocationId kSrEmpty = Loc("sequence_run:empty");
constexpr LocationId kSrScan = Loc("sequence_run:scan");
constexpr LocationId kSrRecord = Loc("sequence_run:record");
constexpr LocationId kSrAscAlloc = Loc("sequence_run.ascending");
constexpr LocationId kSrDescAlloc = Loc("sequence_run.descending");
constexpr LocationId kSrAsc = Loc("sequence_run.ascending_slot");
constexpr LocationId kSrDesc = Loc("sequence_run.descending_slot");

void SequenceRun(ByteSpan in, ExecContext& ctx) {
  ctx.Block(kSrEntry);
  const BufferHandle asc_table = ctx.Alloc(kSrRecords * kRecord, kSrAscAlloc);
  const BufferHandle desc_table = ctx.Alloc(kSrRecords * kRecord, kSrDescAlloc);
  if (in.empty()) {
    ctx.Block(kSrEmpty);
    return;
  }
  size_t asc = 1, desc = 1, best_asc = 1, best_desc = 1;
  for (size_t i = 1; i < in.size(); ++i) {
    ctx.Block(kSrScan);
    const auto up = static_cast<size_t>(in[i] == static_cast<uint8_t>(in[i - 1] + 1));
    const auto down = static_cast<size_t>(in[i] == static_cast<uint8_t>(in[i - 1] - 1));
    asc = asc * up + 1;
    desc = desc * down + 1;
    best_asc = std::max(best_asc, asc);
    best_desc = std::max(best_desc, desc);
  }
  ctx.Block(kSrRecord);
  ctx.Write(asc_table, static_cast<int64_t>((best_asc - 1) * kRecord), kRecord,
            kSrAsc);
  ctx.Write(desc_table, static_cast<int64_t>((best_desc - 1) * kRecord),
            kRecord, kSrDesc);
}

// ---------------------------------------------------------------------------
// packet_parser: 0xCA 0xFE framing, then a type byte. Type 1 copies input[3]
// payload bytes into 24 bytes; type 2 counts "+3 chained" payload bytes into a
// link table.

constexpr size_t kPpLinkRecords = 6;
constexpr LocationId kPpEntry = Loc("packet_parser:entry");
constexpr LocationId kPpShort = Loc("packet_parser:short");
constexpr LocationId kPpReject = Loc("packet_parser:reject");
constexpr LocationId kPpSync1 = Loc("packet_parser:sync1");
constexpr LocationId kPpSync2 = Loc("packet_parser:sync2");
constexpr LocationId kPpType1 = Loc("packet_parser:type1");
constexpr LocationId kPpCopyLoop = Loc("packet_parser:copy_loop");
constexpr LocationId kPpType2 = Loc("packet_parser:type2");
constexpr LocationId kPpChainScan = Loc("packet_parser:chain_scan");
constexpr LocationId kPpOther = Loc("packet_parser:other");
constexpr LocationId kPpPayloadAlloc = Loc("packet_parser.payload");
constexpr LocationId kPpLinkAlloc = Loc("packet_parser.links");
constexpr LocationId kPpCopy = Loc("packet_parser.payload_copy");
constexpr LocationId kPpLink = Loc("packet_parser.link_slot");

void PacketParser(ByteSpan in, ExecContext& ctx) {
  ctx.Block(kPpEntry);
  const BufferHandle payload = ctx.Alloc(24, kPpPayloadAlloc);
  const BufferHandle links = ctx.Alloc(kPpLinkRecords * kRecord, kPpLinkAlloc);
  if (in.size() < 4) {
    ctx.Block(kPpShort);
    return;
  }
  if (in[0] != 0xCA) return ctx.Block(kPpReject);
  ctx.Block(kPpSync1);
  if (in[1] != 0xFE) return ctx.Block(kPpReject);
  ctx.Block(kPpSync2);
  switch (in[2]) {
    case 1: {
      ctx.Block(kPpType1);
      const size_t n = in[3];
      for (size_t i = 0; i < n; ++i) {
        ctx.Block(kPpCopyLoop);
        ctx.Write(payload, static_cast<int64_t>(i), 1, kPpCopy);
      }
      break;
    }
    case 2: {
      ctx.Block(kPpType2);
      size_t chained = 0;
      for (size_t i = 5; i < in.size(); ++i) {
        ctx.Block(kPpChainScan);
        chained += (in[i] == static_cast<uint8_t>(in[i - 1] + 3));
      }
      ctx.Write(links, static_cast<int64_t>(chained * kRecord), kRecord,
                kPpLink);
      break;
    }
    default:
      ctx.Block(kPpOther);
  }
}

std::vector<Target> BuildSuite() {
  std::vector<Target> suite;

  suite.push_back(Target{
      .name = "lenfield_copy",
      .entry = LenfieldCopy,
      .declared_vuln_sites = {kLfCopy},
      .site_labels = {{kLfCopy, "lenfield_copy.copy"}},
      .seed = Cat({8}, Str("payload!")),
      .witnesses = {{kLfCopy, Bytes{200}}},
  });

  suite.push_back(Target{
      .name = "magic_header",
      .entry = MagicHeader,
      .declared_vuln_sites = {kMhOption, kMhName},
      .site_labels = {{kMhOption, "magic_header.option_slot"},
                      {kMhName, "magic_header.name_copy"}},
      .seed = Cat(Str("ABC"), Cat({4}, Str("opts-and-name"))),
      .witnesses = {{kMhOption, Cat(Str("FUZ"), Bytes{2, 0xEE, 0xEE, 0xEE,
                                                      0xEE, 0xEE, 0xEE})},
                    {kMhName, Cat(Str("FUZ"), Bytes{40, 'x'})}},
  });

  suite.push_back(Target{
      .name = "token_histogram",
      .entry = TokenHistogram,
      .declared_vuln_sites = {kThZ, kThHash},
      .site_labels = {{kThZ, "token_histogram.z_slot"},
                      {kThHash, "token_histogram.hash_slot"}},
      .seed = Str("tokens: a b c d e f g"),
      .witnesses = {{kThZ, Str("ZZZZZZ")}, {kThHash, Str("######")}},
  });

  Bytes key_witness;
  for (size_t i = 0; i < kKmRecords; ++i) key_witness.push_back(KeyAt(i));
  suite.push_back(Target{
      .name = "keyed_match",
      .entry = KeyedMatch,
      .declared_vuln_sites = {kKmSlot},
      .site_labels = {{kKmSlot, "keyed_match.score_slot"}},
      .seed = Str("0123456789abcdef0123456789abcdef"),
      .witnesses = {{kKmSlot, key_witness}},
  });

  suite.push_back(Target{
      .name = "sequence_run",
      .entry = SequenceRun,
      .declared_vuln_sites = {kSrAsc, kSrDesc},
      .site_labels = {{kSrAsc, "sequence_run.ascending_slot"},
                      {kSrDesc, "sequence_run.descending_slot"}},
      .seed = Str("qwzqwzqwzqwz"),
      .witnesses = {{kSrAsc, Bytes{1, 2, 3, 4, 5, 6, 7}},
                    {kSrDesc, Bytes{7, 6, 5, 4, 3, 2, 1}}},
  });

  suite.push_back(Target{
      .name = "packet_parser",
      .entry = PacketParser,
      .declared_vuln_sites = {kPpCopy, kPpLink},
      .site_labels = {{kPpCopy, "packet_parser.payload_copy"},
                      {kPpLink, "packet_parser.link_slot"}},
      .seed = Cat(Str("PK"), Cat({2, 4}, Str("datadata"))),
      .witnesses = {{kPpCopy, Bytes{0xCA, 0xFE, 1, 50}},
                    {kPpLink, Bytes{0xCA, 0xFE, 2, 0, 10, 13, 16, 19, 22, 25,
                                    28}}},
  });

  return suite;
}

}  // namespace

const std::vector<Target>& BuiltinSuite() {
  static const std::vector<Target>* const suite =
      new std::vector<Target>(BuildSuite());
  return *suite;
}

const Target* FindTarget(std::string_view name) {
  for (const Target& t : BuiltinSuite()) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

}  // namespace hfuzz
