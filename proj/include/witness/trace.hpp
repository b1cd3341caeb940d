#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "witness/common.hpp"

namespace witness {

constexpr std::uint32_t kMinutesPerDay = 1440;

// One WiFi association interval, minute resolution.
struct SessionRecord {
  std::string device_hash;
  std::string zone;
  std::uint32_t assoc_minute = 0;
  std::uint32_t disassoc_minute = 0;
  double avg_throughput_mbps = 0.0;

  bool operator==(const SessionRecord&) const = default;
};

struct ZoneMap {
  std::set<std::string> zones;
  std::map<std::string, std::set<std::string>> neighbors;

  void add_zone(const std::string& z) { zones.insert(z); }

  void add_edge(const std::string& a, const std::string& b) {
    if (a == b) throw std::invalid_argument("a zone cannot neighbor itself");
    zones.insert(a);
    zones.insert(b);
    neighbors[a].insert(b);
    neighbors[b].insert(a);
  }

  std::size_t degree(const std::string& z) const {
    auto it = neighbors.find(z);
    return it == neighbors.end() ? 0 : it->second.size();
  }
};

// Derived witness availability for one (zone, epoch): neighbor APs are the
// high-class pool, devices whose session spans the whole epoch the low-class
// pool.
struct EpochScenario {
  std::string zone;
  std::uint32_t epoch_id = 0;
  std::uint32_t start_minute = 0;
  std::uint32_t end_minute = 0;  // exclusive
  std::uint64_t high_avail = 0;
  std::uint64_t low_avail = 0;
};

// Session-log format: header row, then
//   device_hash,zone,assoc_minute,disassoc_minute,avg_throughput_mbps
inline std::vector<SessionRecord> parse_sessions(std::istream& in) {
  std::vector<SessionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!header_seen) {
      header_seen = true;  // first non-empty row is the header
      continue;
    }
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 5)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected 5 comma-separated fields");
    SessionRecord r;
    try {
      r.device_hash = fields[0];
      r.zone = fields[1];
      r.assoc_minute = static_cast<std::uint32_t>(std::stoul(fields[2]));
      r.disassoc_minute = static_cast<std::uint32_t>(std::stoul(fields[3]));
      r.avg_throughput_mbps = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": malformed field");
    }
    if (r.disassoc_minute < r.assoc_minute || r.disassoc_minute >= kMinutesPerDay)
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": minutes out of range");
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<SessionRecord> parse_sessions(const std::string& text) {
  std::istringstream is(text);
  return parse_sessions(is);
}

inline std::string serialize_sessions(std::span<const SessionRecord> sessions) {
  std::ostringstream os;
  os << "device_hash,zone,assoc_minute,disassoc_minute,avg_throughput_mbps\n";
  for (const auto& s : sessions) {
    os << s.device_hash << ',' << s.zone << ',' << s.assoc_minute << ','
       << s.disassoc_minute << ',' << s.avg_throughput_mbps << '\n';
  }
  return os.str();
}

// Zone adjacency format: zone,neighbor pairs, symmetrized on load. Lines with
// a single field declare an isolated zone.
inline ZoneMap parse_zones(std::istream& in) {
  ZoneMap zm;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      zm.add_zone(line);
    } else {
      zm.add_edge(line.substr(0, comma), line.substr(comma + 1));
    }
  }
  return zm;
}

inline ZoneMap parse_zones(const std::string& text) {
  std::istringstream is(text);
  return parse_zones(is);
}

inline std::string serialize_zones(const ZoneMap& zm) {
  std::ostringstream os;
  for (const auto& z : zm.zones) {
    auto it = zm.neighbors.find(z);
    if (it == zm.neighbors.end() || it->second.empty()) {
      os << z << '\n';
      continue;
    }
    for (const auto& n : it->second) {
      if (z < n) os << z << ',' << n << '\n';
    }
  }
  return os.str();
}

// A session covers epoch [start, end) iff assoc <= start and disassoc >= end.
// A device is a low-class candidate for (zone, epoch) iff it has a covering
// session in that zone and no session in any other zone overlapping the epoch
// (zone switchers are excluded everywhere).
inline EpochScenario epoch_availability(std::span<const SessionRecord> sessions,
                                        const ZoneMap& zones, std::uint32_t epoch_id,
                                        const std::string& zone,
                                        std::uint32_t epoch_minutes = 10) {
  if (!zones.zones.count(zone)) throw std::invalid_argument("unknown zone: " + zone);
  const std::uint32_t epochs_per_day = kMinutesPerDay / epoch_minutes;
  if (epoch_id >= epochs_per_day) throw std::invalid_argument("epoch_id out of range");
  const std::uint32_t start = epoch_id * epoch_minutes;
  const std::uint32_t end = start + epoch_minutes;

  std::set<std::string> covering;
  std::set<std::string> switched;
  for (const auto& s : sessions) {
    const bool overlaps = s.assoc_minute < end && s.disassoc_minute > start;
    if (!overlaps) continue;
    if (s.zone != zone) {
      switched.insert(s.device_hash);
    } else if (s.assoc_minute <= start && s.disassoc_minute >= end) {
      covering.insert(s.device_hash);
    }
  }
  std::uint64_t low = 0;
  for (const auto& d : covering)
    if (!switched.count(d)) ++low;

  return EpochScenario{zone, epoch_id, start, end, zones.degree(zone), low};
}

// All (zone, epoch) scenarios for a day in one pass over the sessions.
inline std::vector<EpochScenario> availability_table(
    std::span<const SessionRecord> sessions, const ZoneMap& zones,
    std::uint32_t epoch_minutes = 10) {
  const std::uint32_t epochs = kMinutesPerDay / epoch_minutes;
  // Per epoch, per device: zones overlapped at all and zones fully covered.
  struct DeviceEpoch {
    std::set<std::string> overlapped;
    std::set<std::string> covered;
  };
  std::vector<std::map<std::string, DeviceEpoch>> per_epoch(epochs);
  for (const auto& s : sessions) {
    const std::uint32_t first = s.assoc_minute / epoch_minutes;
    const std::uint32_t last = std::min((s.disassoc_minute == 0 ? 0 : s.disassoc_minute - 1) / epoch_minutes,
                                        epochs - 1);
    for (std::uint32_t e = first; e <= last; ++e) {
      const std::uint32_t start = e * epoch_minutes, end = start + epoch_minutes;
      if (!(s.assoc_minute < end && s.disassoc_minute > start)) continue;
      DeviceEpoch& de = per_epoch[e][s.device_hash];
      de.overlapped.insert(s.zone);
      if (s.assoc_minute <= start && s.disassoc_minute >= end) de.covered.insert(s.zone);
    }
  }
  std::map<std::string, std::vector<std::uint64_t>> low;  // zone -> per-epoch count
  for (const auto& z : zones.zones) low[z].assign(epochs, 0);
  for (std::uint32_t e = 0; e < epochs; ++e) {
    for (const auto& [device, de] : per_epoch[e]) {
      if (de.overlapped.size() != 1 || de.covered.empty()) continue;
      auto it = low.find(*de.covered.begin());
      if (it != low.end()) ++it->second[e];
    }
  }
  std::vector<EpochScenario> out;
  out.reserve(zones.zones.size() * epochs);
  for (const auto& z : zones.zones) {
    for (std::uint32_t e = 0; e < epochs; ++e) {
      out.push_back(EpochScenario{z, e, e * epoch_minutes, (e + 1) * epoch_minutes,
                                  zones.degree(z), low[z][e]});
    }
  }
  return out;
}

inline std::string serialize_availability(std::span<const EpochScenario> table) {
  std::ostringstream os;
  os << "zone,epoch,high_avail,low_avail\n";
  for (const auto& s : table)
    os << s.zone << ',' << s.epoch_id << ',' << s.high_avail << ',' << s.low_avail << '\n';
  return os.str();
}

// (threshold, fraction strictly greater) at each distinct observed value.
inline std::vector<std::pair<double, double>> ccdf(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("ccdf of empty sequence");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 == sorted.size() || sorted[i + 1] != sorted[i])
      out.emplace_back(sorted[i], static_cast<double>(sorted.size() - i - 1) / n);
  }
  return out;
}

inline double ccdf_at(std::span<const double> values, double threshold) {
  if (values.empty()) throw std::invalid_argument("ccdf of empty sequence");
  std::size_t above = 0;
  for (double v : values)
    if (v > threshold) ++above;
  return static_cast<double>(above) / static_cast<double>(values.size());
}

// Synthetic trace generator, calibrated against campus-trace statistics:
// session durations are a two-component exponential mixture tuned so that
// P(duration > 10 min) hits `p_duration_over_10`, and the zone graph follows
// a clipped binomial degree distribution realized via Havel-Hakimi.
struct SyntheticSpec {
  std::uint32_t zone_count = 31;
  double mean_degree = 5.0;
  std::uint32_t min_degree = 1;
  std::uint32_t max_degree = 11;
  double sessions_per_zone_per_hour = 11.0;
  double short_mean_minutes = 4.0;
  double long_mean_minutes = 100.0;
  double p_duration_over_10 = 0.52;
  double zone_switch_fraction = 0.10;  // devices given a follow-on session next door

  void validate() const {
    if (zone_count < 2) throw std::invalid_argument("need at least two zones");
    if (min_degree < 1 || min_degree > max_degree)
      throw std::invalid_argument("invalid degree bounds");
    if (mean_degree < min_degree || mean_degree > max_degree)
      throw std::invalid_argument("mean degree outside bounds");
    if (sessions_per_zone_per_hour <= 0 || short_mean_minutes <= 0 ||
        long_mean_minutes <= short_mean_minutes)
      throw std::invalid_argument("invalid session parameters");
    if (!(p_duration_over_10 > 0 && p_duration_over_10 < 1) ||
        zone_switch_fraction < 0 || zone_switch_fraction > 1)
      throw std::invalid_argument("invalid probabilities");
  }
};

struct SyntheticTrace {
  std::vector<SessionRecord> sessions;
  ZoneMap zones;
};

namespace detail {

inline std::string zone_name(std::uint32_t i) {
  std::ostringstream os;
  os << "ap" << (i < 10 ? "0" : "") << i;
  return os.str();
}

// Havel-Hakimi realization of a degree sequence; silently best-effort when the
// sampled sequence is not graphical (residual degrees are dropped).
inline ZoneMap build_zone_graph(const SyntheticSpec& spec, std::mt19937_64& rng) {
  // For small graphs the requested bounds may exceed what is realizable; clamp
  // everything to the hard ceiling of zone_count - 1 neighbors.
  const std::uint32_t hard_max = spec.zone_count - 1;
  const std::uint32_t max_deg = std::min(spec.max_degree, hard_max);
  const std::uint32_t min_deg = std::min(spec.min_degree, max_deg);
  const double mean_deg =
      std::clamp(spec.mean_degree, static_cast<double>(min_deg),
                 static_cast<double>(max_deg));
  const std::uint32_t span = max_deg - min_deg;
  const double p = span == 0 ? 0.0 : (mean_deg - min_deg) / span;
  std::binomial_distribution<std::uint32_t> deg_dist(span, p);

  std::vector<std::pair<std::int64_t, std::uint32_t>> residual;  // (degree, zone)
  for (std::uint32_t i = 0; i < spec.zone_count; ++i)
    residual.emplace_back(min_deg + deg_dist(rng), i);

  ZoneMap zm;
  for (std::uint32_t i = 0; i < spec.zone_count; ++i) zm.add_zone(zone_name(i));

  while (true) {
    std::sort(residual.begin(), residual.end(), std::greater<>());
    if (residual.empty() || residual.front().first <= 0) break;
    auto [d, z] = residual.front();
    residual.front().first = 0;
    for (std::int64_t j = 1; j <= d && j < static_cast<std::int64_t>(residual.size()); ++j) {
      if (residual[j].first <= 0) break;
      residual[j].first -= 1;
      zm.add_edge(zone_name(z), zone_name(residual[j].second));
    }
  }
  // No zone may end up isolated; give it one arbitrary neighbor.
  for (std::uint32_t i = 0; i < spec.zone_count; ++i) {
    if (zm.degree(zone_name(i)) == 0)
      zm.add_edge(zone_name(i), zone_name((i + 1) % spec.zone_count));
  }
  return zm;
}

}  // namespace detail

inline SyntheticTrace generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(mix64(seed));
  SyntheticTrace trace;
  trace.zones = detail::build_zone_graph(spec, rng);

  std::vector<std::string> zone_names(trace.zones.zones.begin(), trace.zones.zones.end());

  // Mixture weight for the short component so P(duration > 10) lands on target.
  // Roaming adds roughly `zone_switch_fraction` extra follow-on sessions drawn
  // from the short component, so the primary sessions aim slightly higher to
  // keep the pooled fraction on target.
  const double p_long = std::exp(-10.0 / spec.long_mean_minutes);
  const double p_short = std::exp(-10.0 / spec.short_mean_minutes);
  const double primary_target = std::clamp(
      spec.p_duration_over_10 * (1.0 + spec.zone_switch_fraction) -
          spec.zone_switch_fraction * p_short,
      0.0, 1.0);
  double w_short = (p_long - primary_target) / (p_long - p_short);
  w_short = std::clamp(w_short, 0.0, 1.0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint32_t per_zone =
      static_cast<std::uint32_t>(std::lround(spec.sessions_per_zone_per_hour * 24.0));

  std::uint64_t device_counter = 0;
  for (const auto& zone : zone_names) {
    for (std::uint32_t s = 0; s < per_zone; ++s) {
      const double mean =
          unit(rng) < w_short ? spec.short_mean_minutes : spec.long_mean_minutes;
      std::exponential_distribution<double> exp_dist(1.0 / mean);
      auto duration = static_cast<std::uint32_t>(std::ceil(exp_dist(rng)));
      duration = std::clamp<std::uint32_t>(duration, 1, kMinutesPerDay - 1);
      std::uniform_int_distribution<std::uint32_t> start_dist(
          0, kMinutesPerDay - 1 - duration);
      const std::uint32_t start = start_dist(rng);

      std::ostringstream dev;
      dev << "dev" << std::hex << mix64(seed ^ (0xABCDu + device_counter));
      ++device_counter;
      const double throughput = 0.1 + 5.0 * unit(rng);
      trace.sessions.push_back(
          SessionRecord{dev.str(), zone, start, start + duration, throughput});

      // Some devices roam: a follow-on session in a neighbor zone.
      const auto& nbrs = trace.zones.neighbors.at(zone);
      if (!nbrs.empty() && unit(rng) < spec.zone_switch_fraction &&
          start + duration < kMinutesPerDay - 2) {
        std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
        auto it = nbrs.begin();
        std::advance(it, pick(rng));
        std::exponential_distribution<double> follow_dist(1.0 / spec.short_mean_minutes);
        auto follow = static_cast<std::uint32_t>(std::ceil(follow_dist(rng)));
        follow = std::clamp<std::uint32_t>(
            follow, 1, kMinutesPerDay - 2 - (start + duration));
        trace.sessions.push_back(SessionRecord{trace.sessions.back().device_hash, *it,
                                               start + duration + 1,
                                               start + duration + follow, throughput});
      }
    }
  }
  std::sort(trace.sessions.begin(), trace.sessions.end(),
            [](const SessionRecord& a, const SessionRecord& b) {
              return std::tie(a.assoc_minute, a.device_hash, a.zone) <
                     std::tie(b.assoc_minute, b.device_hash, b.zone);
            });
  return trace;
}

// Mean over (zone, epoch) cells of the fraction of overlapping sessions that
// fail to cover the whole epoch. Cells with no overlapping session are skipped.
inline double mean_epoch_filter_fraction(std::span<const SessionRecord> sessions,
                                         const ZoneMap& zones,
                                         std::uint32_t epoch_minutes = 10) {
  const std::uint32_t epochs = kMinutesPerDay / epoch_minutes;
  double sum = 0.0;
  std::size_t cells = 0;
  for (const auto& zone : zones.zones) {
    for (std::uint32_t e = 0; e < epochs; ++e) {
      const std::uint32_t start = e * epoch_minutes;
      const std::uint32_t end = start + epoch_minutes;
      std::size_t overlapping = 0, covering = 0;
      for (const auto& s : sessions) {
        if (s.zone != zone) continue;
        if (s.assoc_minute < end && s.disassoc_minute > start) {
          ++overlapping;
          if (s.assoc_minute <= start && s.disassoc_minute >= end) ++covering;
        }
      }
      if (overlapping == 0) continue;
      sum += 1.0 - static_cast<double>(covering) / static_cast<double>(overlapping);
      ++cells;
    }
  }
  return cells == 0 ? 0.0 : sum / static_cast<double>(cells);
}

}  // namespace witness
