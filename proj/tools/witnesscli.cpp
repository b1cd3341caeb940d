// Command-line front end: filter sizing, witness selection, trace generation,
// the day-level simulation, and a scripted ledger demo. Every subcommand
// writes a run manifest sufficient to replay its outputs byte-identically.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "witness/witness.hpp"

namespace fs = std::filesystem;
using namespace witness;

namespace {

constexpr const char* kVersion = "1.0.0";

constexpr int kExitUsage = 2;
constexpr int kExitDomain = 3;

Centi parse_cents(const std::string& s) {
  auto dot = s.find('.');
  std::string whole = dot == std::string::npos ? s : s.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  if (frac.size() > 2) frac = frac.substr(0, 2);
  while (frac.size() < 2) frac.push_back('0');
  bool neg = !whole.empty() && whole[0] == '-';
  if (neg) whole = whole.substr(1);
  Centi v = (whole.empty() ? 0 : std::stoll(whole)) * 100 + std::stoll(frac);
  return neg ? -v : v;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string file_digest(const fs::path& path) {
  std::string data = read_file(path);
  std::ostringstream os;
  os << std::hex << fnv1a64(data);
  return os.str();
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("malformed key=value line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

using Manifest = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const fs::path& dir, const Manifest& entries) {
  std::ostringstream os;
  for (const auto& [k, v] : entries) os << k << '=' << v << '\n';
  write_file(dir / "manifest.txt", os.str());
}

SimConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  SimConfig cfg;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("filter_bits")) cfg.filter_bits = std::stoul(*v);
  if (auto* v = get("packets_per_minute")) cfg.packets_per_minute = std::stod(*v);
  if (auto* v = get("epoch_minutes")) cfg.epoch_minutes = std::stoul(*v);
  if (auto* v = get("f_high")) cfg.f_high = std::stod(*v);
  if (auto* v = get("f_low")) cfg.f_low = std::stod(*v);
  if (auto* v = get("alpha_cents")) cfg.alpha = parse_cents(*v);
  if (auto* v = get("budget_cents")) cfg.budget = parse_cents(*v);
  if (auto* v = get("tamper_rate")) cfg.tamper_rate = std::stod(*v);
  if (auto* v = get("master_seed")) cfg.master_seed = std::stoull(*v);
  cfg.validate();
  return cfg;
}

Manifest config_to_manifest(const SimConfig& cfg) {
  return {
      {"filter_bits", std::to_string(cfg.filter_bits)},
      {"packets_per_minute", std::to_string(cfg.packets_per_minute)},
      {"epoch_minutes", std::to_string(cfg.epoch_minutes)},
      {"f_high", std::to_string(cfg.f_high)},
      {"f_low", std::to_string(cfg.f_low)},
      {"alpha_cents", format_cents(cfg.alpha)},
      {"budget_cents", format_cents(cfg.budget)},
      {"tamper_rate", std::to_string(cfg.tamper_rate)},
      {"master_seed", std::to_string(cfg.master_seed)},
  };
}

SyntheticSpec spec_from_kv(const std::map<std::string, std::string>& kv) {
  SyntheticSpec spec;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (auto* v = get("zone_count")) spec.zone_count = std::stoul(*v);
    if (auto* v = get("mean_degree")) spec.mean_degree = std::stod(*v);
    if (auto* v = get("min_degree")) spec.min_degree = std::stoul(*v);
    if (auto* v = get("max_degree")) spec.max_degree = std::stoul(*v);
    if (auto* v = get("sessions_per_zone_per_hour"))
      spec.sessions_per_zone_per_hour = std::stod(*v);
    if (auto* v = get("short_mean_minutes")) spec.short_mean_minutes = std::stod(*v);
    if (auto* v = get("long_mean_minutes")) spec.long_mean_minutes = std::stod(*v);
    if (auto* v = get("p_duration_over_10")) spec.p_duration_over_10 = std::stod(*v);
    if (auto* v = get("zone_switch_fraction")) spec.zone_switch_fraction = std::stod(*v);
  } catch (const std::exception&) {
    throw std::runtime_error("malformed trace spec value");
  }
  for (const auto& [k, v] : kv) {
    static const std::set<std::string> known = {
        "zone_count",        "mean_degree",        "min_degree",
        "max_degree",        "sessions_per_zone_per_hour",
        "short_mean_minutes", "long_mean_minutes", "p_duration_over_10",
        "zone_switch_fraction"};
    if (!known.count(k)) throw std::runtime_error("unknown trace spec field: " + k);
  }
  spec.validate();
  return spec;
}

// --- subcommand bodies, shared between direct invocation and replay ---

void run_params(std::uint32_t bits, double fpr, std::uint64_t packets,
                const std::string& out_dir) {
  BloomParams params = params_from_error(bits, fpr);
  std::ostringstream os;
  os << "M=" << params.filter_bits << " f=" << params.target_fpr
     << " n=" << params.capacity << " k=" << params.hash_count;
  if (packets > 0) {
    StatementPlan plan = plan_statements(packets, params.capacity);
    os << " N=" << packets << " m=" << plan.statement_count;
  }
  os << '\n';
  std::cout << os.str();
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "params.txt", os.str());
    write_manifest(fs::path(out_dir),
                   {{"subcommand", "params"},
                    {"version", kVersion},
                    {"bits", std::to_string(bits)},
                    {"fpr", std::to_string(fpr)},
                    {"packets", std::to_string(packets)}});
  }
}

void run_select(const std::string& offers_file, double f_high, double f_low,
                const std::string& alpha, std::uint64_t packets, std::uint32_t bits,
                const std::string& budget, std::uint64_t high_avail,
                std::uint64_t low_avail, const std::string& sweep,
                const std::string& out_dir) {
  std::ostringstream os;
  const Centi budget_centi = parse_cents(budget);
  Manifest manifest{{"subcommand", "select"}, {"version", kVersion}};

  if (!offers_file.empty()) {
    std::vector<WitnessOffer> offers;
    std::istringstream is(read_file(offers_file));
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string id, f_str, a_str;
      if (!std::getline(ls, id, ',') || !std::getline(ls, f_str, ',') ||
          !std::getline(ls, a_str))
        throw std::runtime_error("malformed offer line: " + line);
      offers.push_back(
          make_offer(id, std::stod(f_str), parse_cents(a_str), packets, bits));
    }
    SelectionResult r = select_general(offers, budget_centi);
    os << "chosen,cost_cents,error\n";
    std::string ids;
    for (const auto& id : r.chosen) ids += (ids.empty() ? "" : ";") + id;
    os << ids << ',' << format_cents(r.total_cost) << ',' << r.verification_error()
       << '\n';
    manifest.emplace_back("offers_file", offers_file);
    manifest.emplace_back("digest.offers", file_digest(offers_file));
  } else {
    TwoClassMarket market{
        f_high,
        f_low,
        witness_cost(packets, bits, f_high, parse_cents(alpha)),
        witness_cost(packets, bits, f_low, parse_cents(alpha)),
        high_avail,
        low_avail};
    if (!sweep.empty()) {
      auto colon = sweep.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("--sweep expects LO:HI in whole cents");
      Centi lo = parse_cents(sweep.substr(0, colon));
      Centi hi = parse_cents(sweep.substr(colon + 1));
      std::vector<Centi> budgets;
      for (Centi c = lo; c <= hi; c += 100) budgets.push_back(c);
      os << "budget_cents,high,low,cost_cents,error\n";
      for (const auto& p : budget_sweep(market, budgets)) {
        os << format_cents(p.budget) << ',' << p.high_count << ',' << p.low_count
           << ',' << format_cents(p.total_cost) << ',' << p.verification_error << '\n';
      }
      manifest.emplace_back("sweep", sweep);
    } else {
      SelectionResult r = select_two_class(market, budget_centi);
      os << "high,low,cost_cents,error\n";
      os << r.high_count << ',' << r.low_count << ',' << format_cents(r.total_cost)
         << ',' << r.verification_error() << '\n';
    }
  }
  std::cout << os.str();
  if (!out_dir.empty()) {
    manifest.emplace_back("f_high", std::to_string(f_high));
    manifest.emplace_back("f_low", std::to_string(f_low));
    manifest.emplace_back("alpha_cents", alpha);
    manifest.emplace_back("packets", std::to_string(packets));
    manifest.emplace_back("bits", std::to_string(bits));
    manifest.emplace_back("budget_cents", budget);
    manifest.emplace_back("high_avail", std::to_string(high_avail));
    manifest.emplace_back("low_avail", std::to_string(low_avail));
    write_file(fs::path(out_dir) / "selection.csv", os.str());
    write_manifest(fs::path(out_dir), manifest);
  }
}

void run_simulate(const std::string& sessions_file, const std::string& zones_file,
                  const std::string& config_file, const std::string& out_dir) {
  SimConfig cfg;
  if (!config_file.empty()) cfg = config_from_kv(parse_kv(read_file(config_file)));
  auto sessions = parse_sessions(read_file(sessions_file));
  auto zones = parse_zones(read_file(zones_file));
  DayReport report = run_day(sessions, zones, cfg);

  fs::path dir(out_dir);
  write_file(dir / "epochs.csv", serialize_outcomes(report.outcomes));
  write_file(dir / "cost_ccdf.csv", serialize_ccdf(report.cost_ccdf));
  write_file(dir / "max_cost_ccdf.csv", serialize_ccdf(report.max_cost_ccdf));

  Manifest manifest{{"subcommand", "simulate"}, {"version", kVersion}};
  for (auto& kv : config_to_manifest(cfg)) manifest.push_back(kv);
  manifest.emplace_back("sessions_file", sessions_file);
  manifest.emplace_back("zones_file", zones_file);
  manifest.emplace_back("digest.sessions", file_digest(sessions_file));
  manifest.emplace_back("digest.zones", file_digest(zones_file));
  write_manifest(dir, manifest);
  std::cout << "simulated " << report.outcomes.size() << " zone-epochs -> " << out_dir
            << '\n';
}

void run_gen_trace(const std::string& spec_file, std::uint64_t seed,
                   const std::string& out_dir) {
  SyntheticSpec spec;
  if (!spec_file.empty()) spec = spec_from_kv(parse_kv(read_file(spec_file)));
  SyntheticTrace trace = generate_synthetic(spec, seed);
  fs::path dir(out_dir);
  write_file(dir / "sessions.csv", serialize_sessions(trace.sessions));
  write_file(dir / "zones.csv", serialize_zones(trace.zones));
  Manifest manifest{{"subcommand", "gen-trace"},
                    {"version", kVersion},
                    {"seed", std::to_string(seed)},
                    {"zone_count", std::to_string(spec.zone_count)},
                    {"mean_degree", std::to_string(spec.mean_degree)},
                    {"min_degree", std::to_string(spec.min_degree)},
                    {"max_degree", std::to_string(spec.max_degree)},
                    {"sessions_per_zone_per_hour",
                     std::to_string(spec.sessions_per_zone_per_hour)},
                    {"short_mean_minutes", std::to_string(spec.short_mean_minutes)},
                    {"long_mean_minutes", std::to_string(spec.long_mean_minutes)},
                    {"p_duration_over_10", std::to_string(spec.p_duration_over_10)},
                    {"zone_switch_fraction", std::to_string(spec.zone_switch_fraction)}};
  write_manifest(dir, manifest);
  std::cout << "generated " << trace.sessions.size() << " sessions across "
            << trace.zones.zones.size() << " zones -> " << out_dir << '\n';
}

void run_ledger_demo(const std::string& script_file, const std::string& out_dir) {
  Ledger ledger;
  std::ostringstream os;
  std::istringstream is(read_file(script_file));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    try {
      if (op == "account") {
        std::string id, role_str, balance;
        ls >> id >> role_str >> balance;
        Role role = role_str == "HSP" ? Role::HSP
                    : role_str == "Witness" ? Role::Witness
                                            : Role::Other;
        ledger.create_account(id, role, parse_cents(balance));
      } else if (op == "request") {
        std::string from, device, zone;
        std::uint64_t duration;
        ls >> from >> device >> duration >> zone;
        ledger.tx_request(from, device, duration, zone);
      } else if (op == "offer") {
        std::string from, zone, price;
        std::uint32_t granularity;
        ls >> from >> zone >> granularity >> price;
        ledger.tx_offer(from, zone, granularity, parse_cents(price));
      } else if (op == "select") {
        std::string from, entry;
        ls >> from;
        std::map<std::string, Ledger::ChosenEntry> chosen;
        while (ls >> entry) {
          auto c1 = entry.find(':');
          auto c2 = entry.find(':', c1 + 1);
          if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("select entry must be witness:price:count");
          chosen[entry.substr(0, c1)] = Ledger::ChosenEntry{
              parse_cents(entry.substr(c1 + 1, c2 - c1 - 1)),
              static_cast<std::uint32_t>(std::stoul(entry.substr(c2 + 1)))};
        }
        ledger.tx_select(from, chosen);
      } else if (op == "submit") {
        std::string from;
        std::uint32_t count = 1;
        ls >> from;
        ls >> count;
        BloomParams params = params_from_error(256, 0.35);
        for (std::uint32_t i = 0; i < count; ++i) {
          BloomFilter filter(params, i);
          WitnessStatement s{from, 0, 1, 1, std::move(filter), params.target_fpr};
          ledger.tx_submit(from, s);
        }
      } else {
        throw std::runtime_error("unknown script op: " + op);
      }
    } catch (const LedgerError& e) {
      os << "line " << lineno << " rejected: " << e.what() << '\n';
    }
  }
  os << "phase=" << static_cast<int>(ledger.phase()) << " escrow="
     << format_cents(ledger.escrow()) << '\n';
  os << "log:\n" << ledger.dump();
  os << "chain_valid=" << (ledger.verify_log() ? 1 : 0) << '\n';
  std::cout << os.str();
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "ledger.txt", os.str());
    write_manifest(fs::path(out_dir),
                   {{"subcommand", "ledger-demo"},
                    {"version", kVersion},
                    {"script_file", script_file},
                    {"digest.script", file_digest(script_file)}});
  }
}

void run_replay(const std::string& manifest_file, const std::string& out_dir) {
  auto kv = parse_kv(read_file(manifest_file));
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::runtime_error(std::string("manifest missing key: ") + key);
    return it->second;
  };
  auto opt = [&](const char* key, const std::string& dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  };
  auto check_digest = [&](const char* digest_key, const std::string& path) {
    auto it = kv.find(digest_key);
    if (it != kv.end() && file_digest(path) != it->second)
      throw std::runtime_error("input file changed since manifest was written: " + path);
  };
  const std::string& sub = need("subcommand");
  if (sub == "params") {
    run_params(std::stoul(need("bits")), std::stod(need("fpr")),
               std::stoull(need("packets")), out_dir);
  } else if (sub == "simulate") {
    const std::string sessions = need("sessions_file");
    const std::string zones = need("zones_file");
    check_digest("digest.sessions", sessions);
    check_digest("digest.zones", zones);
    std::ostringstream cfg_text;
    for (const auto& [k, v] : kv)
      if (k != "subcommand" && k != "version" && k.rfind("digest.", 0) != 0 &&
          k != "sessions_file" && k != "zones_file")
        cfg_text << k << '=' << v << '\n';
    fs::path tmp = fs::path(out_dir) / "replay_config.tmp";
    write_file(tmp, cfg_text.str());
    run_simulate(sessions, zones, tmp.string(), out_dir);
    fs::remove(tmp);
  } else if (sub == "gen-trace") {
    std::ostringstream spec_text;
    for (const auto& [k, v] : kv)
      if (k != "subcommand" && k != "version" && k != "seed")
        spec_text << k << '=' << v << '\n';
    fs::create_directories(out_dir);
    fs::path tmp = fs::path(out_dir) / "replay_spec.tmp";
    write_file(tmp, spec_text.str());
    SyntheticSpec spec = spec_from_kv(parse_kv(read_file(tmp)));
    fs::remove(tmp);
    SyntheticTrace trace = generate_synthetic(spec, std::stoull(need("seed")));
    write_file(fs::path(out_dir) / "sessions.csv", serialize_sessions(trace.sessions));
    write_file(fs::path(out_dir) / "zones.csv", serialize_zones(trace.zones));
  } else if (sub == "ledger-demo") {
    const std::string script = need("script_file");
    check_digest("digest.script", script);
    run_ledger_demo(script, out_dir);
  } else if (sub == "select") {
    run_select(opt("offers_file", ""), std::stod(opt("f_high", "0.15")),
               std::stod(opt("f_low", "0.35")), opt("alpha_cents", "2.77"),
               std::stoull(opt("packets", "150")), std::stoul(opt("bits", "256")),
               opt("budget_cents", "90"),
               std::stoull(opt("high_avail", std::to_string(kUnbounded))),
               std::stoull(opt("low_avail", std::to_string(kUnbounded))),
               opt("sweep", ""), out_dir);
  } else {
    throw std::runtime_error("manifest has unknown subcommand: " + sub);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"on-demand wireless data witnessing toolkit"};
  app.require_subcommand(1);

  // params
  auto* params_cmd = app.add_subcommand("params", "filter sizing from a target error");
  std::uint32_t bits = 256;
  double fpr = 0.15;
  std::uint64_t packets = 0;
  std::string out_dir;
  params_cmd->add_option("--bits,-M", bits, "filter size in bits");
  params_cmd->add_option("--fpr,-f", fpr, "target false-positive rate")
      ->check(CLI::Range(1e-9, 0.999999999))
      ->required();
  params_cmd->add_option("--packets,-N", packets, "packets per epoch (adds m)");
  params_cmd->add_option("--out", out_dir, "output directory for the run manifest");

  // select
  auto* select_cmd = app.add_subcommand("select", "budget-constrained witness selection");
  std::string offers_file, alpha = "2.77", budget = "90", sweep;
  double f_high = 0.15, f_low = 0.35;
  std::uint64_t sel_packets = 150, high_avail = kUnbounded, low_avail = kUnbounded;
  std::uint32_t sel_bits = 256;
  std::string sel_out;
  select_cmd->add_option("--offers", offers_file, "offer file: id,f,alpha_cents per line");
  select_cmd->add_option("--f-high", f_high, "high-class false-positive rate");
  select_cmd->add_option("--f-low", f_low, "low-class false-positive rate");
  select_cmd->add_option("--alpha", alpha, "price per statement, cents");
  select_cmd->add_option("--packets", sel_packets, "packets per epoch");
  select_cmd->add_option("--bits", sel_bits, "filter size in bits");
  select_cmd->add_option("--budget", budget, "budget, cents");
  select_cmd->add_option("--high-avail", high_avail, "high-class availability cap");
  select_cmd->add_option("--low-avail", low_avail, "low-class availability cap");
  select_cmd->add_option("--sweep", sweep, "budget sweep LO:HI in whole cents");
  select_cmd->add_option("--out", sel_out, "output directory");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "trace-driven day simulation");
  std::string sessions_file, zones_file, config_file, sim_out = "runs/simulate";
  sim_cmd->add_option("--sessions", sessions_file, "session log CSV")->required();
  sim_cmd->add_option("--zones", zones_file, "zone adjacency CSV")->required();
  sim_cmd->add_option("--config", config_file, "key=value simulation config");
  sim_cmd->add_option("--out", sim_out, "output directory");

  // gen-trace
  auto* gen_cmd = app.add_subcommand("gen-trace", "synthetic session trace generator");
  std::string spec_file, gen_out = "runs/gen-trace";
  std::uint64_t seed = 1;
  gen_cmd->add_option("--spec", spec_file, "key=value generator spec");
  gen_cmd->add_option("--seed", seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "output directory");

  // ledger-demo
  auto* demo_cmd = app.add_subcommand("ledger-demo", "run a protocol script");
  std::string script_file, demo_out;
  demo_cmd->add_option("--script", script_file, "protocol script file")->required();
  demo_cmd->add_option("--out", demo_out, "output directory");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded manifest");
  std::string manifest_file, replay_out = "runs/replay";
  replay_cmd->add_option("--manifest", manifest_file, "manifest.txt to replay")->required();
  replay_cmd->add_option("--out", replay_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*params_cmd) run_params(bits, fpr, packets, out_dir);
    if (*select_cmd)
      run_select(offers_file, f_high, f_low, alpha, sel_packets, sel_bits, budget,
                 high_avail, low_avail, sweep, sel_out);
    if (*sim_cmd) run_simulate(sessions_file, zones_file, config_file, sim_out);
    if (*gen_cmd) run_gen_trace(spec_file, seed, gen_out);
    if (*demo_cmd) run_ledger_demo(script_file, demo_out);
    if (*replay_cmd) run_replay(manifest_file, replay_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return 0;
}
