#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "witness/bloom.hpp"
#include "witness/statement.hpp"

namespace witness {

enum class OfferClass { High, Low, Other };

struct WitnessOffer {
  std::string witness_id;
  double declared_fpr = 0.0;       // f
  Centi statement_price = 0;       // alpha, per statement
  Centi cost = 0;                  // c = ceil(N/n(f)) * alpha
  OfferClass class_hint = OfferClass::Other;
};

// c = m * alpha with m = ceil(N / n(f)) and n from the filter sizing formula.
inline Centi witness_cost(std::uint64_t total_packets, std::uint32_t filter_bits,
                          double fpr, Centi statement_price) {
  if (statement_price <= 0) throw std::domain_error("statement price must be positive");
  BloomParams params = params_from_error(filter_bits, fpr);
  StatementPlan plan = plan_statements(total_packets, params.capacity);
  return static_cast<Centi>(plan.statement_count) * statement_price;
}

inline WitnessOffer make_offer(std::string witness_id, double fpr, Centi statement_price,
                               std::uint64_t total_packets, std::uint32_t filter_bits,
                               OfferClass hint = OfferClass::Other) {
  if (!(fpr > 0.0 && fpr < 1.0))
    throw std::domain_error("offer false-positive rate must be in (0,1)");
  Centi cost = witness_cost(total_packets, filter_bits, fpr, statement_price);
  return WitnessOffer{std::move(witness_id), fpr, statement_price, cost, hint};
}

struct SelectionResult {
  std::vector<std::string> chosen;      // witness ids (general form)
  std::uint64_t high_count = 0;         // H (two-class form)
  std::uint64_t low_count = 0;          // L
  Centi total_cost = 0;
  double log_error = 0.0;               // sum ln f_i; 0 for the empty selection

  double verification_error() const { return std::exp(log_error); }
  std::uint64_t witness_count() const {
    return chosen.empty() ? high_count + low_count : chosen.size();
  }
};

// Exact 0/1 knapsack over discretized cost: weight c_i, value -ln f_i.
// Ties broken by lower cost, then fewer witnesses; offer order (sorted by id)
// fixes any remaining ambiguity deterministically.
inline SelectionResult select_general(std::span<const WitnessOffer> offers, Centi budget) {
  if (budget < 0) throw std::domain_error("budget must be non-negative");
  std::vector<WitnessOffer> items(offers.begin(), offers.end());
  for (const auto& o : items) {
    if (!(o.declared_fpr > 0.0 && o.declared_fpr < 1.0))
      throw std::domain_error("offer false-positive rate must be in (0,1)");
    if (o.cost <= 0) throw std::domain_error("offer cost must be positive");
  }
  std::sort(items.begin(), items.end(),
            [](const WitnessOffer& a, const WitnessOffer& b) {
              return a.witness_id < b.witness_id;
            });

  Centi cost_sum = 0;
  for (const auto& o : items) cost_sum += o.cost;
  const Centi cap = std::min(budget, cost_sum);

  struct Cell {
    double value = 0.0;   // sum of -ln f over chosen
    Centi cost = 0;
    std::uint32_t count = 0;
  };
  auto better = [](const Cell& a, const Cell& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.count < b.count;
  };

  const std::size_t width = static_cast<std::size_t>(cap) + 1;
  std::vector<Cell> dp(width);
  std::vector<std::vector<std::uint8_t>> take(items.size(),
                                              std::vector<std::uint8_t>(width, 0));
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Centi c = items[i].cost;
    const double v = -std::log(items[i].declared_fpr);
    if (c > cap) continue;
    for (Centi w = cap; w >= c; --w) {
      Cell cand{dp[w - c].value + v, dp[w - c].cost + c, dp[w - c].count + 1};
      if (better(cand, dp[w])) {
        dp[w] = cand;
        take[i][w] = 1;
      }
    }
  }

  SelectionResult result;
  Centi w = cap;
  for (std::size_t i = items.size(); i-- > 0;) {
    if (take[i][w]) {
      result.chosen.push_back(items[i].witness_id);
      result.total_cost += items[i].cost;
      result.log_error += std::log(items[i].declared_fpr);
      if (items[i].class_hint == OfferClass::High) ++result.high_count;
      if (items[i].class_hint == OfferClass::Low) ++result.low_count;
      w -= items[i].cost;
    }
  }
  std::sort(result.chosen.begin(), result.chosen.end());
  return result;
}

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

// The two-class market: high-class witnesses quote (f_h, c_h), low-class
// (f_l, c_l). f_h < f_l with c_h > c_l is the expected regime; other orderings
// still solve but `regular_regime` reports false.
struct TwoClassMarket {
  double f_high = 0.0;
  double f_low = 0.0;
  Centi cost_high = 0;
  Centi cost_low = 0;
  std::uint64_t high_avail = kUnbounded;
  std::uint64_t low_avail = kUnbounded;

  void validate() const {
    if (!(f_high > 0.0 && f_high < 1.0) || !(f_low > 0.0 && f_low < 1.0))
      throw std::domain_error("class false-positive rates must be in (0,1)");
    if (cost_high <= 0 || cost_low <= 0)
      throw std::domain_error("class costs must be positive");
  }
  bool regular_regime() const { return f_high < f_low && cost_high > cost_low; }
};

namespace detail {

template <typename Objective>
inline SelectionResult enumerate_two_class(const TwoClassMarket& market, Centi budget,
                                           Objective&& objective_key) {
  market.validate();
  if (budget < 0) throw std::domain_error("budget must be non-negative");
  SelectionResult best;  // empty selection, always feasible
  auto best_key = objective_key(0, 0, Centi{0});
  const std::uint64_t h_max =
      std::min<std::uint64_t>(market.high_avail,
                              static_cast<std::uint64_t>(budget / market.cost_high));
  for (std::uint64_t h = 0; h <= h_max; ++h) {
    const Centi rem = budget - static_cast<Centi>(h) * market.cost_high;
    const std::uint64_t l =
        std::min<std::uint64_t>(market.low_avail,
                                static_cast<std::uint64_t>(rem / market.cost_low));
    const Centi cost = static_cast<Centi>(h) * market.cost_high +
                       static_cast<Centi>(l) * market.cost_low;
    auto key = objective_key(h, l, cost);
    if (key < best_key) {
      best_key = key;
      best.high_count = h;
      best.low_count = l;
      best.total_cost = cost;
      best.log_error = static_cast<double>(h) * std::log(market.f_high) +
                       static_cast<double>(l) * std::log(market.f_low);
    }
  }
  return best;
}

}  // namespace detail

// min H ln f_h + L ln f_l  s.t.  c_h H + c_l L <= C, availability caps.
// The canonical solver; ties broken by lower cost, then fewer witnesses.
inline SelectionResult select_two_class(const TwoClassMarket& market, Centi budget) {
  market.validate();
  const double lfh = std::log(market.f_high);
  const double lfl = std::log(market.f_low);
  return detail::enumerate_two_class(
      market, budget, [&](std::uint64_t h, std::uint64_t l, Centi cost) {
        return std::tuple(static_cast<double>(h) * lfh + static_cast<double>(l) * lfl,
                          cost, h + l);
      });
}

// The spend-maximizing linearization: max c_h H + c_l L under the same
// constraints. Spend ties are pervasive with ceiling costs, so ties fall back
// to the true log-error, then lower cost, then fewer witnesses.
inline SelectionResult select_paper_ilp(const TwoClassMarket& market, Centi budget) {
  market.validate();
  const double lfh = std::log(market.f_high);
  const double lfl = std::log(market.f_low);
  return detail::enumerate_two_class(
      market, budget, [&](std::uint64_t h, std::uint64_t l, Centi cost) {
        return std::tuple(-cost,
                          static_cast<double>(h) * lfh + static_cast<double>(l) * lfl,
                          cost, h + l);
      });
}

struct SweepPoint {
  Centi budget = 0;
  std::uint64_t high_count = 0;
  std::uint64_t low_count = 0;
  Centi total_cost = 0;
  double verification_error = 1.0;
};

inline std::vector<SweepPoint> budget_sweep(const TwoClassMarket& market,
                                            std::span<const Centi> budgets) {
  std::vector<SweepPoint> out;
  out.reserve(budgets.size());
  for (Centi c : budgets) {
    SelectionResult r = select_two_class(market, c);
    out.push_back(SweepPoint{c, r.high_count, r.low_count, r.total_cost,
                             r.verification_error()});
  }
  return out;
}

}  // namespace witness
