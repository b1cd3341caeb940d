#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "witness/common.hpp"
#include "witness/statement.hpp"

namespace witness {

enum class Role { HSP, Witness, Other };
enum class Phase { Idle, AwaitingOffers, AwaitingStatements, Settled };

enum class LedgerErrc {
  UnknownAccount,
  DuplicateAccount,
  AccessDenied,
  InvalidPhase,
  IneligibleWitness,
  InsufficientFunds,
  UnknownWitness,
  NotSelected,
  InvalidArgument,
};

class LedgerError : public std::runtime_error {
 public:
  LedgerError(LedgerErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  LedgerErrc code() const { return code_; }

 private:
  LedgerErrc code_;
};

struct GasSchedule {
  std::uint64_t gas_per_submit = 23000;
  double eth_per_megagas = 0.0075;
  double usd_per_eth = 160.36;
};

// gas -> centicents: gas/1e6 megagas, priced in ETH, converted to USD, cents.
inline Centi gas_cost_centi(const GasSchedule& schedule, std::uint64_t gas) {
  if (gas == 0) throw std::domain_error("gas must be positive");
  if (schedule.eth_per_megagas <= 0 || schedule.usd_per_eth <= 0 ||
      schedule.gas_per_submit == 0)
    throw std::domain_error("gas schedule fields must be positive");
  double cents = static_cast<double>(gas) / 1e6 * schedule.eth_per_megagas *
                 schedule.usd_per_eth * 100.0;
  return static_cast<Centi>(std::llround(cents * 100.0));
}

struct Account {
  std::string id;
  Role role = Role::Other;
  Centi balance = 0;
};

struct OfferRecord {
  std::string witness;
  std::string eligibility;       // zone identifier answering the challenge
  std::uint32_t granularity = 0; // packets per statement
  Centi price = 0;
  std::optional<std::uint64_t> deadline;  // stored, never acted on
};

struct SelectionCommitment {
  Centi price = 0;
  std::uint32_t expected_statements = 0;
  std::uint32_t received = 0;
  bool paid = false;
};

// One entry of the hash-chained transaction log. The reward field mirrors the
// on-chain transaction shape; it does not affect ordering here.
struct TxRecord {
  std::uint64_t index = 0;
  std::uint64_t prev_hash = 0;
  std::uint64_t hash = 0;
  std::string from;
  std::string function;
  std::uint64_t payload_digest = 0;
  Centi reward = 0;
};

inline std::uint64_t tx_hash(const TxRecord& r) {
  std::vector<std::uint8_t> buf;
  append_u64_be(buf, r.index);
  append_u64_be(buf, r.prev_hash);
  buf.insert(buf.end(), r.from.begin(), r.from.end());
  buf.push_back(0);
  buf.insert(buf.end(), r.function.begin(), r.function.end());
  buf.push_back(0);
  append_u64_be(buf, r.payload_digest);
  append_u64_be(buf, static_cast<std::uint64_t>(r.reward));
  return fnv1a64(buf);
}

inline bool verify_chain(std::span<const TxRecord> log) {
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const TxRecord& r = log[i];
    if (r.index != i || r.prev_hash != prev || r.hash != tx_hash(r)) return false;
    prev = r.hash;
  }
  return true;
}

// Simulated blockchain for one witnessing episode: accounts, the contract
// state machine Idle -> AwaitingOffers -> AwaitingStatements -> Settled, an
// escrow, and an append-only hash-chained log. Consensus is abstracted to an
// instantly finalized total order. Failed calls throw before any mutation.
class Ledger {
 public:
  void create_account(const std::string& id, Role role, Centi balance) {
    if (accounts_.count(id))
      throw LedgerError(LedgerErrc::DuplicateAccount, "account exists: " + id);
    if (balance < 0)
      throw LedgerError(LedgerErrc::InvalidArgument, "negative opening balance");
    accounts_[id] = Account{id, role, balance};
  }

  Centi balance(const std::string& id) const { return account(id).balance; }
  Role role(const std::string& id) const { return account(id).role; }
  Phase phase() const { return phase_; }
  Centi escrow() const { return escrow_; }
  const std::map<std::string, OfferRecord>& offers() const { return offers_; }
  const std::map<std::string, SelectionCommitment>& selected() const { return selected_; }
  const std::vector<TxRecord>& log() const { return log_; }
  bool verify_log() const { return verify_chain(log_); }

  Centi total_funds() const {
    Centi sum = escrow_;
    for (const auto& [id, a] : accounts_) sum += a.balance;
    return sum;
  }

  const TxRecord& tx_request(const std::string& from, const std::string& device_hash,
                             std::uint64_t duration_epochs, const std::string& zone,
                             Centi reward = 0) {
    const Account& caller = account(from);
    if (caller.role != Role::HSP)
      throw LedgerError(LedgerErrc::AccessDenied, "request is restricted to the HSP");
    if (phase_ != Phase::Idle)
      throw LedgerError(LedgerErrc::InvalidPhase, "request requires Idle phase");
    if (duration_epochs == 0)
      throw LedgerError(LedgerErrc::InvalidArgument, "duration must be positive");
    phase_ = Phase::AwaitingOffers;
    hsp_id_ = from;
    device_hash_ = device_hash;
    duration_epochs_ = duration_epochs;
    zone_ = zone;
    return append(from, "request",
                  fnv1a64(device_hash + "|" + zone + "|" + std::to_string(duration_epochs)),
                  reward);
  }

  const TxRecord& tx_offer(const std::string& from, const std::string& eligibility,
                           std::uint32_t granularity, Centi price,
                           std::optional<std::uint64_t> deadline = std::nullopt,
                           Centi reward = 0) {
    account(from);
    if (phase_ != Phase::AwaitingOffers)
      throw LedgerError(LedgerErrc::InvalidPhase, "offer requires AwaitingOffers phase");
    if (eligibility != zone_)
      throw LedgerError(LedgerErrc::IneligibleWitness,
                        "eligibility proof does not match the requested zone");
    if (granularity == 0 || price <= 0)
      throw LedgerError(LedgerErrc::InvalidArgument, "granularity and price must be positive");
    // A repeat offer from the same witness replaces the previous one.
    offers_[from] = OfferRecord{from, eligibility, granularity, price, deadline};
    return append(from, "offer",
                  fnv1a64(from + "|" + eligibility + "|" + std::to_string(granularity) +
                          "|" + std::to_string(price)),
                  reward);
  }

  struct ChosenEntry {
    Centi price = 0;
    std::uint32_t expected_statements = 0;
  };

  const TxRecord& tx_select(const std::string& from,
                            const std::map<std::string, ChosenEntry>& chosen,
                            Centi reward = 0) {
    Account& caller = account(from);
    if (caller.role != Role::HSP || from != hsp_id_)
      throw LedgerError(LedgerErrc::AccessDenied, "select is restricted to the HSP");
    if (phase_ != Phase::AwaitingOffers)
      throw LedgerError(LedgerErrc::InvalidPhase, "select requires AwaitingOffers phase");
    Centi total = 0;
    for (const auto& [id, entry] : chosen) {
      if (!offers_.count(id))
        throw LedgerError(LedgerErrc::UnknownWitness, "no offer on record from " + id);
      if (entry.price <= 0 || entry.expected_statements == 0)
        throw LedgerError(LedgerErrc::InvalidArgument, "invalid selection entry for " + id);
      total += entry.price;
    }
    if (caller.balance < total)
      throw LedgerError(LedgerErrc::InsufficientFunds, "HSP balance below committed total");
    caller.balance -= total;
    escrow_ += total;
    for (const auto& [id, entry] : chosen)
      selected_[id] = SelectionCommitment{entry.price, entry.expected_statements, 0, false};
    phase_ = chosen.empty() ? Phase::Settled : Phase::AwaitingStatements;
    std::uint64_t digest = fnv1a64(std::to_string(total));
    for (const auto& [id, entry] : chosen)
      digest = combine_hash(digest, fnv1a64(id + "|" + std::to_string(entry.price)));
    return append(from, "select", digest, reward);
  }

  const TxRecord& tx_submit(const std::string& from, const WitnessStatement& statement,
                            Centi reward = 0) {
    Account& caller = account(from);
    if (phase_ != Phase::AwaitingStatements)
      throw LedgerError(LedgerErrc::InvalidPhase, "submit requires AwaitingStatements phase");
    auto it = selected_.find(from);
    if (it == selected_.end())
      throw LedgerError(LedgerErrc::NotSelected, from + " was not selected");
    SelectionCommitment& commit = it->second;
    ++commit.received;
    if (!commit.paid && commit.received >= commit.expected_statements) {
      caller.balance += commit.price;
      escrow_ -= commit.price;
      commit.paid = true;
    }
    bool all_paid = true;
    for (const auto& [id, c] : selected_)
      if (!c.paid) all_paid = false;
    if (all_paid) phase_ = Phase::Settled;
    auto payload = statement.filter.serialize();
    return append(from, "submit", fnv1a64(payload), reward);
  }

  // Dump: index, prev_hash, from, function, payload digest, reward.
  std::string dump() const {
    std::ostringstream os;
    for (const auto& r : log_) {
      os << r.index << ',' << std::hex << r.prev_hash << ',' << std::dec << r.from
         << ',' << r.function << ',' << std::hex << r.payload_digest << std::dec
         << ',' << format_cents(r.reward) << '\n';
    }
    return os.str();
  }

 private:
  Account& account(const std::string& id) {
    auto it = accounts_.find(id);
    if (it == accounts_.end())
      throw LedgerError(LedgerErrc::UnknownAccount, "unknown account: " + id);
    return it->second;
  }
  const Account& account(const std::string& id) const {
    return const_cast<Ledger*>(this)->account(id);
  }

  const TxRecord& append(const std::string& from, const std::string& function,
                         std::uint64_t payload_digest, Centi reward) {
    TxRecord r;
    r.index = log_.size();
    r.prev_hash = log_.empty() ? 0 : log_.back().hash;
    r.from = from;
    r.function = function;
    r.payload_digest = payload_digest;
    r.reward = reward;
    r.hash = tx_hash(r);
    log_.push_back(std::move(r));
    return log_.back();
  }

  std::map<std::string, Account> accounts_;
  Phase phase_ = Phase::Idle;
  std::string hsp_id_;
  std::string device_hash_;
  std::uint64_t duration_epochs_ = 0;
  std::string zone_;
  std::map<std::string, OfferRecord> offers_;
  std::map<std::string, SelectionCommitment> selected_;
  Centi escrow_ = 0;
  std::vector<TxRecord> log_;
};

}  // namespace witness
