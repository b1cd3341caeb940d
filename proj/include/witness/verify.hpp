#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "witness/statement.hpp"

namespace witness {

enum class PacketStatus { ConsistentWithWitnesses, FlaggedTampered };

struct PacketVerdict {
  std::uint32_t seq = 0;
  PacketStatus status = PacketStatus::ConsistentWithWitnesses;
  std::vector<std::string> dissenting_witnesses;  // those returning DefinitelyAbsent
};

struct VerificationReport {
  std::uint64_t epoch_id = 0;
  std::vector<PacketVerdict> verdicts;
  std::size_t flagged_count = 0;
  double theoretical_verification_probability = 0.0;  // tau = 1 - prod f_i
  double empirical_detection_rate = 0.0;              // flagged / total
};

// tau = 1 - prod f_i over the consulted witnesses; no witnesses, no power.
inline double verification_probability(std::span<const double> fprs) {
  double product = 1.0;
  for (double f : fprs) {
    if (!(f > 0.0 && f < 1.0))
      throw std::domain_error("false-positive rate must be in (0,1)");
    product *= f;
  }
  return fprs.empty() ? 0.0 : 1.0 - product;
}

using StatementsByWitness = std::map<std::string, std::vector<WitnessStatement>>;

// A packet is flagged as soon as any witness's covering filter reports it
// absent; bloom filters cannot produce false negatives, so a genuine packet
// heard by every witness is never flagged.
inline PacketVerdict verify_packet(const Packet& packet,
                                   const StatementsByWitness& statements_by_witness) {
  PacketVerdict verdict;
  verdict.seq = packet.seq;
  for (const auto& [witness_id, statements] : statements_by_witness) {
    const WitnessStatement& s = statement_covering(statements, packet.seq);
    if (s.filter.contains(packet.bytes) == Membership::DefinitelyAbsent)
      verdict.dissenting_witnesses.push_back(witness_id);
  }
  verdict.status = verdict.dissenting_witnesses.empty()
                       ? PacketStatus::ConsistentWithWitnesses
                       : PacketStatus::FlaggedTampered;
  return verdict;
}

inline VerificationReport verify_epoch(std::span<const Packet> received,
                                       const StatementsByWitness& statements_by_witness,
                                       std::uint64_t epoch_id = 0) {
  VerificationReport report;
  report.epoch_id = epoch_id;
  std::vector<double> fprs;
  for (const auto& [id, statements] : statements_by_witness) {
    if (!statements.empty()) fprs.push_back(statements.front().declared_fpr);
  }
  report.theoretical_verification_probability = verification_probability(fprs);
  for (const Packet& p : received) {
    PacketVerdict v = verify_packet(p, statements_by_witness);
    if (v.status == PacketStatus::FlaggedTampered) ++report.flagged_count;
    report.verdicts.push_back(std::move(v));
  }
  report.empirical_detection_rate =
      received.empty() ? 0.0
                       : static_cast<double>(report.flagged_count) / received.size();
  return report;
}

// Tabular export: one row per packet plus a summary line.
inline std::string export_report(const VerificationReport& report) {
  std::ostringstream os;
  os << "seq,verdict,dissenting\n";
  for (const auto& v : report.verdicts) {
    os << v.seq << ','
       << (v.status == PacketStatus::FlaggedTampered ? "tampered" : "consistent")
       << ',' << v.dissenting_witnesses.size() << '\n';
  }
  os << "# tau=" << report.theoretical_verification_probability
     << " flagged=" << report.flagged_count << '\n';
  return os.str();
}

}  // namespace witness
