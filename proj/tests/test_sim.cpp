#include <gtest/gtest.h>

#include <random>

#include "witness/sim.hpp"

using namespace witness;

namespace {

EpochScenario scenario(std::uint64_t high, std::uint64_t low, const char* zone = "z",
                       std::uint32_t epoch = 50) {
  return EpochScenario{zone, epoch, epoch * 10, epoch * 10 + 10, high, low};
}

}  // namespace

TEST(MakePackets, DeterministicAndDistinct) {
  auto a = make_packets(150, 7, 123);
  auto b = make_packets(150, 7, 123);
  ASSERT_EQ(a.size(), 150u);
  EXPECT_EQ(a[0].bytes, b[0].bytes);
  EXPECT_NE(a[0].bytes, a[1].bytes);
  auto c = make_packets(150, 8, 123);
  EXPECT_NE(a[0].bytes, c[0].bytes);
}

TEST(Tamper, RateZeroIsIdentity) {
  auto packets = make_packets(50, 0, 1);
  TamperResult r = tamper(packets, 0.0, 9);
  EXPECT_TRUE(r.tampered_seqs.empty());
  for (std::size_t i = 0; i < packets.size(); ++i)
    EXPECT_EQ(r.packets[i].bytes, packets[i].bytes);
}

TEST(Tamper, RateOneChangesEverything) {
  auto packets = make_packets(50, 0, 2);
  TamperResult r = tamper(packets, 1.0, 9);
  EXPECT_EQ(r.tampered_seqs.size(), 50u);
  for (std::size_t i = 0; i < packets.size(); ++i)
    EXPECT_NE(r.packets[i].bytes, packets[i].bytes);
}

TEST(Tamper, BinomialCount) {
  auto packets = make_packets(150, 0, 3);
  double total = 0;
  const int seeds = 60;
  for (int s = 0; s < seeds; ++s)
    total += static_cast<double>(tamper(packets, 0.1, 1000 + s).tampered_seqs.size());
  // Binomial(150, 0.1): mean 15, sd 3.67; the seed-mean is much tighter.
  EXPECT_NEAR(total / seeds, 15.0, 3.0);
  EXPECT_THROW(tamper(packets, 1.5, 0), std::domain_error);
}

TEST(RunProtocolEpoch, LowDensityNeedsNoOptimization) {
  SimConfig cfg;
  Ledger ledger;
  EpochOutcome o = run_protocol_epoch(scenario(2, 6), cfg, 42, &ledger);
  EXPECT_FALSE(o.optimization_engaged);
  EXPECT_EQ(o.high_sel, 2u);
  EXPECT_EQ(o.low_sel, 6u);
  EXPECT_EQ(o.total_cost, 2 * 831 + 6 * 554);  // 49.86 cents
  EXPECT_NEAR(o.theoretical_error, std::pow(0.15, 2) * std::pow(0.35, 6), 1e-12);
  EXPECT_EQ(ledger.phase(), Phase::Settled);
  EXPECT_EQ(ledger.escrow(), 0);
  EXPECT_TRUE(ledger.verify_log());
}

TEST(RunProtocolEpoch, HighDensityEngagesOptimization) {
  SimConfig cfg;
  EpochOutcome o = run_protocol_epoch(scenario(6, 24), cfg, 42);
  EXPECT_TRUE(o.optimization_engaged);
  EXPECT_EQ(o.total_cost, 8864);
  EXPECT_LE(o.total_cost, cfg.budget);
  EXPECT_LE(o.theoretical_error, 2.6e-8);
}

TEST(RunProtocolEpoch, EmptyScenario) {
  SimConfig cfg;
  EpochOutcome o = run_protocol_epoch(scenario(0, 0), cfg, 42);
  EXPECT_EQ(o.high_sel + o.low_sel, 0u);
  EXPECT_EQ(o.total_cost, 0);
  EXPECT_DOUBLE_EQ(o.theoretical_error, 1.0);
  EXPECT_EQ(o.flagged_count, 0u);
}

TEST(RunProtocolEpoch, FundConservation) {
  SimConfig cfg;
  Ledger ledger;
  run_protocol_epoch(scenario(3, 5), cfg, 17, &ledger);
  // Everything the HSP escrowed went to paid witnesses.
  Centi witness_total = 0;
  for (const auto& [id, commit] : ledger.selected()) {
    EXPECT_TRUE(commit.paid);
    witness_total += commit.price;
  }
  EXPECT_EQ(ledger.balance("hsp") + witness_total, cfg.budget);
  EXPECT_EQ(ledger.total_funds(), cfg.budget);
}

TEST(RunProtocolEpoch, DetectionMatchesTheory) {
  SimConfig cfg;
  cfg.tamper_rate = 0.5;
  std::uint64_t tampered_total = 0, flagged_total = 0;
  double tau = 0.0;
  for (int s = 0; s < 30; ++s) {
    EpochOutcome o = run_protocol_epoch(scenario(2, 2), cfg, 9000 + s);
    tampered_total += o.tampered_count;
    flagged_total += o.flagged_count;
    tau = 1.0 - o.theoretical_error;
  }
  ASSERT_GT(tampered_total, 0u);
  const double rate = static_cast<double>(flagged_total) / tampered_total;
  const double se = std::sqrt(tau * (1 - tau) / static_cast<double>(tampered_total));
  // Declared FPRs cap the per-witness miss rate, so tau lower-bounds the
  // realized detection probability (partially-filled filters only detect more).
  EXPECT_GE(rate, tau - 3 * se - 1e-4);
  EXPECT_LE(rate, 1.0);
}

TEST(RunDay, DeterministicAndBudgetSafe) {
  SyntheticSpec spec;
  spec.zone_count = 4;
  spec.sessions_per_zone_per_hour = 6;
  SyntheticTrace trace = generate_synthetic(spec, 77);
  SimConfig cfg;
  cfg.master_seed = 5;
  DayReport a = run_day(trace.sessions, trace.zones, cfg);
  DayReport b = run_day(trace.sessions, trace.zones, cfg);
  EXPECT_EQ(serialize_outcomes(a.outcomes), serialize_outcomes(b.outcomes));
  EXPECT_EQ(serialize_ccdf(a.cost_ccdf), serialize_ccdf(b.cost_ccdf));
  ASSERT_EQ(a.outcomes.size(), 4u * 144u);
  for (const auto& o : a.outcomes) {
    EXPECT_LE(o.total_cost, cfg.budget);
    if (!o.optimization_engaged) {
      EXPECT_EQ(o.high_sel, o.high_avail);
      EXPECT_EQ(o.low_sel, o.low_avail);
    }
  }
}

TEST(SimConfig, Validation) {
  SimConfig cfg;
  EXPECT_EQ(cfg.packets_per_epoch(), 150u);
  cfg.tamper_rate = 1.5;
  EXPECT_THROW(cfg.validate(), std::domain_error);
  SimConfig bad_epoch;
  bad_epoch.epoch_minutes = 7;  // does not divide the day
  EXPECT_THROW(bad_epoch.validate(), std::domain_error);
}
