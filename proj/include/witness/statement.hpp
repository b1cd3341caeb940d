#pragma once

#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "witness/bloom.hpp"
#include "witness/common.hpp"

namespace witness {

struct Packet {
  std::uint32_t seq = 0;
  std::vector<std::uint8_t> bytes;
};

// One bloom filter covering a contiguous run of a witness's overheard packets.
struct WitnessStatement {
  std::string witness_id;
  std::uint64_t epoch_id = 0;
  std::uint32_t seq_start = 0;  // inclusive
  std::uint32_t seq_end = 0;    // inclusive
  BloomFilter filter;
  double declared_fpr = 0.0;
};

struct StatementPlan {
  std::uint64_t total_packets = 0;   // N
  std::uint64_t per_filter = 0;      // n
  std::uint64_t statement_count = 0; // m = ceil(N / n)
};

inline StatementPlan plan_statements(std::uint64_t total_packets, std::uint64_t per_filter) {
  if (total_packets < 1 || per_filter < 1)
    throw std::domain_error("packet and capacity counts must be >= 1");
  return StatementPlan{total_packets, per_filter,
                       (total_packets + per_filter - 1) / per_filter};
}

// Per-statement hash seed; distinct across witnesses and statement indices so
// their false positives stay independent.
inline std::uint64_t statement_seed(std::uint64_t base_seed, std::string_view witness_id,
                                    std::uint64_t epoch_id, std::uint64_t index) {
  std::uint64_t h = fnv1a64(witness_id, mix64(base_seed));
  h = combine_hash(h, epoch_id);
  return combine_hash(h, index);
}

// Partitions an ordered packet stream into statements of `params.capacity`
// packets each; the final statement may be partial but keeps full-capacity
// params, so its realized rate sits below the declared one.
inline std::vector<WitnessStatement> build_statements(
    std::span<const Packet> packets, const BloomParams& params,
    const std::string& witness_id, std::uint64_t epoch_id, std::uint64_t base_seed) {
  if (packets.empty()) return {};
  for (std::size_t i = 1; i < packets.size(); ++i) {
    if (packets[i].seq <= packets[i - 1].seq)
      throw std::invalid_argument("packet sequence numbers must be strictly increasing");
  }
  std::vector<WitnessStatement> out;
  const std::uint64_t n = params.capacity;
  std::size_t i = 0;
  std::uint64_t index = 0;
  while (i < packets.size()) {
    std::size_t end = std::min(i + n, packets.size());
    BloomFilter filter(params, statement_seed(base_seed, witness_id, epoch_id, index));
    for (std::size_t j = i; j < end; ++j) filter.insert(packets[j].bytes);
    out.push_back(WitnessStatement{witness_id, epoch_id, packets[i].seq,
                                   packets[end - 1].seq, std::move(filter),
                                   params.target_fpr});
    i = end;
    ++index;
  }
  return out;
}

inline const WitnessStatement& statement_covering(
    std::span<const WitnessStatement> statements, std::uint32_t seq) {
  for (const auto& s : statements) {
    if (seq >= s.seq_start && seq <= s.seq_end) return s;
  }
  throw std::out_of_range("no statement covers sequence number " + std::to_string(seq));
}

// Export format: one record per line,
//   witness_id,epoch_id,seq_start,seq_end,declared_fpr,<hex filter payload>
inline std::string export_statement(const WitnessStatement& s) {
  std::ostringstream os;
  os << s.witness_id << ',' << s.epoch_id << ',' << s.seq_start << ',' << s.seq_end
     << ',' << s.declared_fpr << ',' << to_hex(s.filter.serialize());
  return os.str();
}

inline WitnessStatement parse_statement(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 6) throw std::invalid_argument("malformed statement record");
  auto payload = from_hex(fields[5]);
  return WitnessStatement{fields[0],
                          std::stoull(fields[1]),
                          static_cast<std::uint32_t>(std::stoul(fields[2])),
                          static_cast<std::uint32_t>(std::stoul(fields[3])),
                          BloomFilter::deserialize(payload),
                          std::stod(fields[4])};
}

}  // namespace witness
