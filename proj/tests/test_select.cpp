#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "witness/select.hpp"

using namespace witness;

namespace {

// Independent oracle: exhaustive subset enumeration with the same tie-break
// hierarchy (max value, min cost, fewest witnesses).
struct BruteResult {
  double log_error = 0.0;
  Centi cost = 0;
  std::size_t count = 0;
};

BruteResult brute_force(const std::vector<WitnessOffer>& offers, Centi budget) {
  BruteResult best;
  const std::size_t n = offers.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Centi cost = 0;
    double log_error = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        cost += offers[i].cost;
        log_error += std::log(offers[i].declared_fpr);
        ++count;
      }
    }
    if (cost > budget) continue;
    if (log_error < best.log_error - 1e-12 ||
        (std::abs(log_error - best.log_error) <= 1e-12 &&
         (cost < best.cost || (cost == best.cost && count < best.count)))) {
      best = BruteResult{log_error, cost, count};
    }
  }
  return best;
}

WitnessOffer raw_offer(std::string id, double f, Centi cost) {
  return WitnessOffer{std::move(id), f, cost, cost, OfferClass::Other};
}

TwoClassMarket reference_market(std::uint64_t high_avail = kUnbounded,
                            std::uint64_t low_avail = kUnbounded) {
  return TwoClassMarket{0.15, 0.35, 831, 554, high_avail, low_avail};
}

}  // namespace

TEST(WitnessCost, ReferenceConstants) {
  EXPECT_EQ(witness_cost(150, 256, 0.15, 277), 831);  // c_h = 8.31 cents
  EXPECT_EQ(witness_cost(150, 256, 0.35, 277), 554);  // c_l = 5.54 cents
  EXPECT_EQ(witness_cost(64, 256, 0.15, 100), 100);   // one exactly-full statement
}

TEST(WitnessCost, DomainErrors) {
  EXPECT_THROW(witness_cost(150, 256, 1.5, 277), std::domain_error);
  EXPECT_THROW(witness_cost(150, 256, 0.15, 0), std::domain_error);
}

TEST(SelectGeneral, PrefersSingleStrongOfferOnValueTie) {
  // ln 4 = 2 ln 2: the single f=0.25 offer ties the two f=0.5 offers on
  // log-error; lower cost (15 < 20) breaks the tie.
  std::vector<WitnessOffer> offers{raw_offer("a", 0.5, 1000), raw_offer("b", 0.5, 1000),
                                   raw_offer("c", 0.25, 1500)};
  SelectionResult r = select_general(offers, 2000);
  ASSERT_EQ(r.chosen.size(), 1u);
  EXPECT_EQ(r.chosen[0], "c");
  EXPECT_EQ(r.total_cost, 1500);
}

TEST(SelectGeneral, ZeroBudgetPicksNothing) {
  std::vector<WitnessOffer> offers{raw_offer("a", 0.5, 100)};
  SelectionResult r = select_general(offers, 0);
  EXPECT_TRUE(r.chosen.empty());
  EXPECT_DOUBLE_EQ(r.verification_error(), 1.0);
}

TEST(SelectGeneral, SlackBudgetPicksEverything) {
  std::vector<WitnessOffer> offers{raw_offer("a", 0.5, 100), raw_offer("b", 0.3, 200),
                                   raw_offer("c", 0.9, 50)};
  SelectionResult r = select_general(offers, 1000);
  EXPECT_EQ(r.chosen.size(), 3u);
}

TEST(SelectGeneral, RejectsDegenerateOffers) {
  std::vector<WitnessOffer> offers{raw_offer("a", 1.0, 100)};
  EXPECT_THROW(select_general(offers, 100), std::domain_error);
  std::vector<WitnessOffer> zero_cost{raw_offer("a", 0.5, 0)};
  EXPECT_THROW(select_general(zero_cost, 100), std::domain_error);
  std::vector<WitnessOffer> ok{raw_offer("a", 0.5, 10)};
  EXPECT_THROW(select_general(ok, -1), std::domain_error);
}

TEST(SelectGeneral, MatchesBruteForce) {
  std::mt19937_64 rng(42);
  for (int instance = 0; instance < 500; ++instance) {
    const std::size_t n = 1 + rng() % 15;
    std::vector<WitnessOffer> offers;
    for (std::size_t i = 0; i < n; ++i) {
      double f = 0.05 + 0.90 * (static_cast<double>(rng() % 1000) / 1000.0);
      Centi cost = 1 + static_cast<Centi>(rng() % 2000);
      offers.push_back(raw_offer("w" + std::to_string(i), f, cost));
    }
    Centi budget = static_cast<Centi>(rng() % 6000);
    SelectionResult got = select_general(offers, budget);
    BruteResult expect = brute_force(offers, budget);
    EXPECT_NEAR(got.log_error, expect.log_error, 1e-9)
        << "instance " << instance << " budget " << budget;
    EXPECT_LE(got.total_cost, budget);
  }
}

TEST(SelectGeneral, ScaleInvarianceOfArgmin) {
  std::mt19937_64 rng(17);
  for (int instance = 0; instance < 50; ++instance) {
    std::vector<WitnessOffer> offers;
    const std::size_t n = 2 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      double f = 0.1 + 0.8 * (static_cast<double>(rng() % 100) / 100.0);
      offers.push_back(raw_offer("w" + std::to_string(i), f,
                                 1 + static_cast<Centi>(rng() % 300)));
    }
    Centi budget = static_cast<Centi>(rng() % 1000);
    SelectionResult base = select_general(offers, budget);
    auto scaled = offers;
    for (auto& o : scaled) o.cost *= 7;
    SelectionResult big = select_general(scaled, budget * 7);
    EXPECT_EQ(base.chosen, big.chosen);
  }
}

TEST(SelectTwoClass, ReferenceOptimumAtBudget30) {
  SelectionResult r = select_two_class(reference_market(), 3000);
  EXPECT_EQ(r.high_count, 2u);
  EXPECT_EQ(r.low_count, 2u);
  EXPECT_EQ(r.total_cost, 2770);
  EXPECT_NEAR(r.verification_error(), 2.7563e-3, 1e-6);
}

TEST(SelectTwoClass, InfeasibleBelowLowCost) {
  SelectionResult r = select_two_class(reference_market(), 500);
  EXPECT_EQ(r.high_count, 0u);
  EXPECT_EQ(r.low_count, 0u);
  EXPECT_DOUBLE_EQ(r.verification_error(), 1.0);
}

TEST(SelectTwoClass, Budget90Optimum) {
  SelectionResult r = select_two_class(reference_market(), 9000);
  EXPECT_EQ(r.high_count, 10u);
  EXPECT_EQ(r.low_count, 1u);
  EXPECT_EQ(r.total_cost, 8864);
  EXPECT_NEAR(r.verification_error(), 2.018e-9, 2e-12);
}

TEST(SelectTwoClass, AvailabilityCapsRespected) {
  SelectionResult r = select_two_class(reference_market(2, 6), 9000);
  EXPECT_LE(r.high_count, 2u);
  EXPECT_LE(r.low_count, 6u);
  EXPECT_EQ(r.high_count, 2u);  // all-available is affordable: 49.86 <= 90
  EXPECT_EQ(r.low_count, 6u);
}

TEST(SelectTwoClass, AgreesWithGeneralOnExpandedOffers) {
  std::mt19937_64 rng(77);
  for (int instance = 0; instance < 40; ++instance) {
    const std::uint64_t h_avail = rng() % 6;
    const std::uint64_t l_avail = rng() % 8;
    TwoClassMarket market = reference_market(h_avail, l_avail);
    const Centi budget = static_cast<Centi>(rng() % 10000);
    SelectionResult two = select_two_class(market, budget);
    std::vector<WitnessOffer> offers;
    for (std::uint64_t i = 0; i < h_avail; ++i)
      offers.push_back(WitnessOffer{"h" + std::to_string(i), market.f_high, 277,
                                    market.cost_high, OfferClass::High});
    for (std::uint64_t i = 0; i < l_avail; ++i)
      offers.push_back(WitnessOffer{"l" + std::to_string(i), market.f_low, 277,
                                    market.cost_low, OfferClass::Low});
    SelectionResult general = select_general(offers, budget);
    EXPECT_NEAR(two.log_error, general.log_error, 1e-9)
        << "H=" << h_avail << " L=" << l_avail << " C=" << budget;
  }
}

TEST(SelectPaperIlp, SpendTieBrokenByLogError) {
  // At C=30 both (2,2) and (0,5) spend 27.70; the log-error tie-break picks
  // (2,2) whose error 2.76e-3 beats (0,5)'s 5.25e-3.
  SelectionResult r = select_paper_ilp(reference_market(), 3000);
  EXPECT_EQ(r.total_cost, 2770);
  EXPECT_EQ(r.high_count, 2u);
  EXPECT_EQ(r.low_count, 2u);
}

TEST(SelectPaperIlp, Budget90) {
  SelectionResult r = select_paper_ilp(reference_market(), 9000);
  EXPECT_EQ(r.total_cost, 8864);
  EXPECT_EQ(r.high_count, 10u);
  EXPECT_EQ(r.low_count, 1u);
}

TEST(SelectPaperIlp, AgreesWithTwoClassAcrossSweep) {
  for (Centi cents = 0; cents <= 120; ++cents) {
    SelectionResult ilp = select_paper_ilp(reference_market(), cents * 100);
    SelectionResult knap = select_two_class(reference_market(), cents * 100);
    EXPECT_NEAR(ilp.log_error, knap.log_error, 1e-9) << "C=" << cents;
  }
}

TEST(BudgetSweep, FeasibilityBoundaryAndShape) {
  std::vector<Centi> budgets;
  for (Centi c = 0; c <= 12000; c += 100) budgets.push_back(c);
  auto points = budget_sweep(reference_market(), budgets);
  ASSERT_EQ(points.size(), 121u);

  // First feasible point at C=6: one low-class witness.
  EXPECT_EQ(points[5].high_count + points[5].low_count, 0u);
  EXPECT_EQ(points[6].high_count, 0u);
  EXPECT_EQ(points[6].low_count, 1u);

  // C=9 (first point above c_h=8.31): the high-class witness wins.
  EXPECT_EQ(points[9].high_count, 1u);
  EXPECT_EQ(points[9].low_count, 0u);

  double prev_error = 2.0;
  std::uint64_t prev_count = 0;
  bool first = true;
  for (const auto& p : points) {
    if (!first) {
      EXPECT_LE(p.verification_error, prev_error + 1e-15);
      EXPECT_GE(p.high_count + p.low_count, prev_count);
    }
    prev_error = p.verification_error;
    prev_count = p.high_count + p.low_count;
    first = false;
  }
  EXPECT_LE(points[120].verification_error, points[90].verification_error);
}

TEST(BudgetSweep, ExactBoundaryBudgets) {
  SelectionResult at_cl = select_two_class(reference_market(), 554);
  EXPECT_EQ(at_cl.low_count, 1u);
  SelectionResult at_ch = select_two_class(reference_market(), 831);
  EXPECT_EQ(at_ch.high_count, 1u);
  EXPECT_EQ(at_ch.low_count, 0u);
}
