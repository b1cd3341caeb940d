#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "witness/ledger.hpp"
#include "witness/select.hpp"
#include "witness/statement.hpp"
#include "witness/trace.hpp"
#include "witness/verify.hpp"

namespace witness {

struct SimConfig {
  std::uint32_t filter_bits = 256;
  double packets_per_minute = 15.0;
  std::uint32_t epoch_minutes = 10;
  double f_high = 0.15;
  double f_low = 0.35;
  Centi alpha = 277;        // centicents per statement
  Centi budget = 9000;      // centicents per epoch
  double tamper_rate = 0.10;
  std::uint64_t master_seed = 1;
  std::uint32_t payload_bytes = 32;
  std::uint32_t day_start_minute = 480;  // 8am, CCDF window
  std::uint32_t day_end_minute = 1020;   // 5pm

  std::uint32_t packets_per_epoch() const {
    return static_cast<std::uint32_t>(std::lround(packets_per_minute * epoch_minutes));
  }

  void validate() const {
    if (filter_bits < 8 || packets_per_minute <= 0 || epoch_minutes == 0 ||
        kMinutesPerDay % epoch_minutes != 0)
      throw std::domain_error("invalid packet or epoch configuration");
    if (!(f_high > 0 && f_high < 1) || !(f_low > 0 && f_low < 1))
      throw std::domain_error("class false-positive rates must be in (0,1)");
    if (alpha <= 0 || budget < 0) throw std::domain_error("invalid pricing");
    if (tamper_rate < 0 || tamper_rate > 1)
      throw std::domain_error("tamper_rate must be in [0,1]");
    if (payload_bytes == 0) throw std::domain_error("payload_bytes must be positive");
  }
};

struct EpochOutcome {
  std::string zone;
  std::uint32_t epoch_id = 0;
  std::uint64_t high_avail = 0;
  std::uint64_t low_avail = 0;
  std::uint64_t high_sel = 0;
  std::uint64_t low_sel = 0;
  Centi total_cost = 0;
  Centi all_witness_cost = 0;   // cost of selecting every available witness
  double theoretical_error = 1.0;  // f_h^H_sel * f_l^L_sel
  std::size_t flagged_count = 0;
  std::size_t tampered_count = 0;
  bool optimization_engaged = false;
};

struct DayReport {
  std::vector<EpochOutcome> outcomes;
  std::vector<std::pair<double, double>> cost_ccdf;      // all-witness cost, daytime
  std::vector<std::pair<double, double>> max_cost_ccdf;  // per-zone daytime maximum
};

// Canonical on-air packet: seq | epoch_id | seeded pseudorandom payload. Both
// witnesses and the verifier hash exactly these bytes.
inline std::vector<Packet> make_packets(std::uint32_t count, std::uint64_t epoch_id,
                                        std::uint64_t seed,
                                        std::uint32_t payload_bytes = 32) {
  std::mt19937_64 rng(combine_hash(mix64(seed), epoch_id));
  std::vector<Packet> packets;
  packets.reserve(count);
  for (std::uint32_t i = 1; i <= count; ++i) {
    Packet p;
    p.seq = i;
    append_u32_be(p.bytes, i);
    append_u64_be(p.bytes, epoch_id);
    for (std::uint32_t b = 0; b < payload_bytes; ++b)
      p.bytes.push_back(static_cast<std::uint8_t>(rng() & 0xff));
    packets.push_back(std::move(p));
  }
  return packets;
}

struct TamperResult {
  std::vector<Packet> packets;
  std::set<std::uint32_t> tampered_seqs;  // ground truth
};

// Each packet is independently replaced with probability `rate`; a tampered
// copy differs from the original in at least one byte.
inline TamperResult tamper(std::span<const Packet> packets, double rate,
                           std::uint64_t seed) {
  if (rate < 0 || rate > 1) throw std::domain_error("tamper rate must be in [0,1]");
  std::mt19937_64 rng(mix64(seed ^ 0x7a3f9d2c15e8b461ULL));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TamperResult out;
  out.packets.assign(packets.begin(), packets.end());
  for (Packet& p : out.packets) {
    if (unit(rng) >= rate) continue;
    std::uniform_int_distribution<std::size_t> pos_dist(0, p.bytes.size() - 1);
    std::uniform_int_distribution<int> delta_dist(1, 255);
    p.bytes[pos_dist(rng)] ^= static_cast<std::uint8_t>(delta_dist(rng));
    out.tampered_seqs.insert(p.seq);
  }
  return out;
}

// One full witnessing episode for a (zone, epoch) scenario: request, offers
// from every available witness, optimal two-class selection, escrowed select,
// statement submission with automatic payment, then verification of the
// adversary-perturbed stream. The ledger, when requested, is left in its
// final state for inspection.
inline EpochOutcome run_protocol_epoch(const EpochScenario& scenario,
                                       const SimConfig& config, std::uint64_t seed,
                                       Ledger* ledger_out = nullptr) {
  config.validate();
  const std::uint32_t packet_count = config.packets_per_epoch();
  const BloomParams params_high = params_from_error(config.filter_bits, config.f_high);
  const BloomParams params_low = params_from_error(config.filter_bits, config.f_low);
  const Centi cost_high =
      witness_cost(packet_count, config.filter_bits, config.f_high, config.alpha);
  const Centi cost_low =
      witness_cost(packet_count, config.filter_bits, config.f_low, config.alpha);
  const auto expected_high = static_cast<std::uint32_t>(
      plan_statements(packet_count, params_high.capacity).statement_count);
  const auto expected_low = static_cast<std::uint32_t>(
      plan_statements(packet_count, params_low.capacity).statement_count);

  Ledger local;
  Ledger& ledger = ledger_out ? *ledger_out : local;
  const std::string hsp = "hsp";
  ledger.create_account(hsp, Role::HSP, config.budget);

  auto witness_name = [](const char* prefix, std::uint64_t i) {
    std::ostringstream os;
    os << prefix << (i < 10 ? "0" : "") << i;
    return os.str();
  };

  std::vector<std::string> high_ids, low_ids;
  for (std::uint64_t i = 1; i <= scenario.high_avail; ++i)
    high_ids.push_back(witness_name("h", i));
  for (std::uint64_t i = 1; i <= scenario.low_avail; ++i)
    low_ids.push_back(witness_name("l", i));
  for (const auto& id : high_ids) ledger.create_account(id, Role::Witness, 0);
  for (const auto& id : low_ids) ledger.create_account(id, Role::Witness, 0);

  ledger.tx_request(hsp, "sensor-" + scenario.zone, 1, scenario.zone);
  for (const auto& id : high_ids)
    ledger.tx_offer(id, scenario.zone, params_high.capacity, cost_high);
  for (const auto& id : low_ids)
    ledger.tx_offer(id, scenario.zone, params_low.capacity, cost_low);

  TwoClassMarket market{config.f_high, config.f_low, cost_high, cost_low,
                        scenario.high_avail, scenario.low_avail};
  SelectionResult selection = select_two_class(market, config.budget);

  std::map<std::string, Ledger::ChosenEntry> chosen;
  for (std::uint64_t i = 0; i < selection.high_count; ++i)
    chosen[high_ids[i]] = Ledger::ChosenEntry{cost_high, expected_high};
  for (std::uint64_t i = 0; i < selection.low_count; ++i)
    chosen[low_ids[i]] = Ledger::ChosenEntry{cost_low, expected_low};
  ledger.tx_select(hsp, chosen);

  const std::uint64_t epoch_key =
      combine_hash(fnv1a64(scenario.zone), scenario.epoch_id);
  const std::vector<Packet> true_packets = make_packets(
      packet_count, scenario.epoch_id, combine_hash(seed, epoch_key), config.payload_bytes);

  StatementsByWitness statements;
  for (const auto& [id, entry] : chosen) {
    const BloomParams& params =
        id.front() == 'h' ? params_high : params_low;
    auto stmts = build_statements(true_packets, params, id, scenario.epoch_id, seed);
    for (const auto& s : stmts) ledger.tx_submit(id, s);
    statements[id] = std::move(stmts);
  }

  TamperResult delivered =
      tamper(true_packets, config.tamper_rate, combine_hash(seed, epoch_key + 1));
  VerificationReport report =
      verify_epoch(delivered.packets, statements, scenario.epoch_id);

  EpochOutcome outcome;
  outcome.zone = scenario.zone;
  outcome.epoch_id = scenario.epoch_id;
  outcome.high_avail = scenario.high_avail;
  outcome.low_avail = scenario.low_avail;
  outcome.high_sel = selection.high_count;
  outcome.low_sel = selection.low_count;
  outcome.total_cost = selection.total_cost;
  outcome.all_witness_cost = static_cast<Centi>(scenario.high_avail) * cost_high +
                             static_cast<Centi>(scenario.low_avail) * cost_low;
  outcome.theoretical_error = selection.verification_error();
  outcome.flagged_count = report.flagged_count;
  outcome.tampered_count = delivered.tampered_seqs.size();
  outcome.optimization_engaged = outcome.all_witness_cost > config.budget;
  return outcome;
}

inline DayReport run_day(std::span<const SessionRecord> sessions, const ZoneMap& zones,
                         const SimConfig& config) {
  config.validate();
  DayReport report;
  const auto table = availability_table(sessions, zones, config.epoch_minutes);
  std::vector<double> day_costs;
  std::map<std::string, double> zone_max;
  for (const auto& scenario : table) {
    const std::uint64_t seed = combine_hash(
        config.master_seed, combine_hash(fnv1a64(scenario.zone), scenario.epoch_id));
    EpochOutcome outcome = run_protocol_epoch(scenario, config, seed);
    const bool daytime = scenario.start_minute >= config.day_start_minute &&
                         scenario.start_minute < config.day_end_minute;
    if (daytime) {
      const double cents = static_cast<double>(outcome.all_witness_cost) / 100.0;
      day_costs.push_back(cents);
      auto [it, inserted] = zone_max.try_emplace(scenario.zone, cents);
      if (!inserted && cents > it->second) it->second = cents;
    }
    report.outcomes.push_back(std::move(outcome));
  }
  if (!day_costs.empty()) report.cost_ccdf = ccdf(day_costs);
  std::vector<double> maxima;
  for (const auto& [zone, m] : zone_max) maxima.push_back(m);
  if (!maxima.empty()) report.max_cost_ccdf = ccdf(maxima);
  return report;
}

inline std::string serialize_outcomes(std::span<const EpochOutcome> outcomes) {
  std::ostringstream os;
  os << "zone,epoch,high_avail,low_avail,high_sel,low_sel,cost_cents,error,"
        "flagged,tampered,optimization_engaged\n";
  for (const auto& o : outcomes) {
    os << o.zone << ',' << o.epoch_id << ',' << o.high_avail << ',' << o.low_avail
       << ',' << o.high_sel << ',' << o.low_sel << ',' << format_cents(o.total_cost)
       << ',' << o.theoretical_error << ',' << o.flagged_count << ','
       << o.tampered_count << ',' << (o.optimization_engaged ? 1 : 0) << '\n';
  }
  return os.str();
}

inline std::string serialize_ccdf(std::span<const std::pair<double, double>> points) {
  std::ostringstream os;
  os << "x,fraction_above\n";
  for (const auto& [x, frac] : points) os << x << ',' << frac << '\n';
  return os.str();
}

}  // namespace witness
