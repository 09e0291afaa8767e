// Copyright 2026 The dirtysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "dirtysim/analysis.h"
#include "dirtysim/channel.h"
#include "dirtysim/eviction_experiments.h"
#include "dirtysim/gadget.h"
#include "dirtysim/measurement.h"
#include "dirtysim/rng.h"
#include "dirtysim/sweep.h"

namespace dirtysim::cli {

namespace {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) {
      if (!joined.empty()) joined += ',';
      joined += json_scalar(item);
    }
    return joined;
  }
  return v.dump();
}

// Flat `key = value` lines (# comments), or a flat JSON object.
std::vector<std::pair<std::string, std::string>> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<std::pair<std::string, std::string>> items;
  if (trim(text).starts_with('{')) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      if (value.is_object()) throw ConfigError("config key '" + key + "' must not be nested");
      items.emplace_back(key, json_scalar(value));
    }
    return items;
  }
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key = value", path, number));
    }
    items.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return items;
}

bool flag_given(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
}

// Config values become --key=value arguments unless the flag is already on
// the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (!path) return args;
  std::vector<std::string> extra;
  for (const auto& [key, value] : load_config(*path)) {
    if (key == "config") throw ConfigError("config files cannot include other config files");
    if (!flag_given(args, key)) extra.push_back("--" + key + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

// Options every subcommand understands.
struct Common {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::string out;
  std::string config;
  std::string policy = "lru";
  std::string defense = "none";
  int jitter = 0;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, Common& c, std::uint64_t default_trials, const std::string& default_policy = "lru") {
  c.trials = default_trials;
  c.policy = default_policy;
  c.seed_opt = cmd->add_option("--seed", c.seed, "Seed for every random choice (or DIRTYSIM_SEED)")
                   ->envname("DIRTYSIM_SEED");
  cmd->add_option("--trials", c.trials, "Trials per configuration")->capture_default_str();
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
  cmd->add_option("--config", c.config, "Flat key = value (or JSON) file with option values");
  cmd->add_option("--policy", c.policy, "Replacement policy")
      ->check(CLI::IsMember({"lru", "tree-plru", "random"}))
      ->capture_default_str();
  cmd->add_option("--defense", c.defense, "Cache defense")
      ->check(CLI::IsMember({"none", "write-through", "partition"}))
      ->capture_default_str();
  cmd->add_option("--jitter", c.jitter, "Per-access latency jitter half-width in cycles")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void require_seed(const Common& c) {
  if (c.seed_opt->count() == 0) throw ConfigError("a seed is required (--seed, config file, or DIRTYSIM_SEED)");
}

void require_no_latency_options(const Common& c, std::string_view command) {
  if (c.defense != "none") throw ConfigError(fmt::format("{} does not take --defense", command));
  if (c.jitter != 0) throw ConfigError(fmt::format("{} does not take --jitter", command));
}

void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw ConfigError("cannot write " + c.out);
  file << text;
}

// --- evict-prob ---

struct EvictProb {
  Common common;
  std::vector<unsigned> n{8, 9, 10};
  unsigned ways = 8;
};

void add_evict_prob(CLI::App& app, EvictProb& o) {
  auto* cmd = app.add_subcommand("evict-prob", "Probability that a dirty line is evicted after N fresh lines");
  add_common(cmd, o.common, 10000);
  cmd->add_option("--n", o.n, "Replacement set sizes")->delimiter(',')->capture_default_str();
  cmd->add_option("--ways", o.ways, "Associativity")->capture_default_str();
}

std::string run_evict_prob(const EvictProb& o) {
  require_seed(o.common);
  require_no_latency_options(o.common, "evict-prob");
  const PolicyKind policy = parse_policy(o.common.policy);
  std::vector<unsigned> ns = o.n;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::string csv = "policy,N,trials,fraction\n";
  for (unsigned n : ns) {
    const auto r = eviction_distance_experiment(policy, n, o.common.trials, o.common.seed, o.ways);
    csv += fmt::format("{},{},{},{:.4f}\n", to_string(policy), n, r.trials, r.evicted_fraction);
  }
  return csv;
}

// --- dirty-evict ---

struct DirtyEvict {
  Common common;
  std::vector<unsigned> d{2, 3};
  std::vector<unsigned> l{8, 9, 10, 11, 12, 13};
  unsigned ways = 8;
};

void add_dirty_evict(CLI::App& app, DirtyEvict& o) {
  auto* cmd = app.add_subcommand("dirty-evict", "Random replacement: probability of evicting a dirty line");
  add_common(cmd, o.common, 10000, "random");
  cmd->add_option("--d", o.d, "Dirty line counts")->delimiter(',')->capture_default_str();
  cmd->add_option("--l", o.l, "Replacement set sizes")->delimiter(',')->capture_default_str();
  cmd->add_option("--ways", o.ways, "Associativity")->capture_default_str();
}

std::string run_dirty_evict(const DirtyEvict& o) {
  require_seed(o.common);
  require_no_latency_options(o.common, "dirty-evict");
  if (o.common.policy != "random") throw ConfigError("dirty-evict models random replacement only");
  auto ds = o.d;
  auto ls = o.l;
  std::sort(ds.begin(), ds.end());
  std::sort(ls.begin(), ls.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  std::string csv = "d,L,trials,mc_fraction,analytic_p\n";
  for (unsigned d : ds) {
    for (unsigned l : ls) {
      const auto r = dirty_eviction_experiment(d, l, o.common.trials, o.common.seed, o.ways);
      csv += fmt::format("{},{},{},{:.4f},{:.4f}\n", d, l, r.trials, r.evicted_fraction,
                         analytic_dirty_eviction_probability(o.ways, d, l));
    }
  }
  return csv;
}

// --- shared channel options ---

struct ChannelOptions {
  std::string encoding = "binary";
  unsigned d_one = 1;
  std::vector<unsigned> levels{0, 3, 5, 8};
  std::size_t message_bits = 0;
  std::string message;
  double noise_rate = 0.0;
  double noise_write_fraction = 0.0;
  Cycles slip = 0;
  unsigned target_set = 0;
  unsigned replacement_size = kDefaultReplacementSize;
  std::uint64_t calibration_trials = 32;
};

void add_channel_options(CLI::App* cmd, ChannelOptions& o, bool single_d) {
  cmd->add_option("--encoding", o.encoding, "Symbol encoding")
      ->check(CLI::IsMember({"binary", "multibit"}))
      ->capture_default_str();
  if (single_d) cmd->add_option("--d", o.d_one, "Dirty lines for a binary 1")->capture_default_str();
  cmd->add_option("--levels", o.levels, "Multi-bit dirty-line levels")->delimiter(',')->capture_default_str();
  cmd->add_option("--message-bits", o.message_bits, "Random message length (default 128 binary, 256 multi-bit)");
  cmd->add_option("--noise-rate", o.noise_rate, "Noise accesses per sender period")->capture_default_str();
  cmd->add_option("--noise-write-fraction", o.noise_write_fraction, "Fraction of noise accesses that write")
      ->capture_default_str();
  cmd->add_option("--slip", o.slip, "Max per-period wake-up delay in cycles")->capture_default_str();
  cmd->add_option("--target-set", o.target_set, "Target set index")->capture_default_str();
  cmd->add_option("--replacement-size", o.replacement_size, "Replacement set size L")->capture_default_str();
  cmd->add_option("--calibration-trials", o.calibration_trials, "Calibration runs per level")
      ->capture_default_str();
}

ChannelConfig make_channel(const Common& c, const ChannelOptions& o, unsigned d_one) {
  ChannelConfig cfg;
  cfg.policy = parse_policy(c.policy);
  cfg.defense = parse_defense(c.defense);
  cfg.latency.jitter = c.jitter;
  cfg.encoding = o.encoding == "binary" ? Encoding::Binary(d_one) : Encoding::MultiBit(o.levels);
  cfg.target_set = o.target_set;
  cfg.replacement_size = o.replacement_size;
  cfg.noise = {o.noise_rate, o.noise_write_fraction};
  cfg.slip = o.slip;
  cfg.seed = c.seed;
  const std::size_t bits = o.message_bits ? o.message_bits : (cfg.encoding.is_binary() ? 128 : 256);
  cfg.message = o.message.empty() ? random_bits(bits, Rng::Derive(c.seed, {0x3e55a9e}).next())
                                  : parse_bits(o.message);
  return cfg;
}

Calibration calibrate(const ChannelConfig& cfg, const ChannelOptions& o, std::uint64_t seed) {
  return calibrate_thresholds(cfg, o.calibration_trials, Rng::Derive(seed, {0xca1b}).next());
}

// --- latency-cdf ---

struct LatencyCdf {
  Common common;
  std::vector<unsigned> d{0, 1, 2, 3, 4, 5, 6, 7, 8};
  unsigned replacement_size = kDefaultReplacementSize;
  unsigned target_set = 0;
};

void add_latency_cdf(CLI::App& app, LatencyCdf& o) {
  auto* cmd = app.add_subcommand("latency-cdf", "Replacement-set latency samples for each dirty count");
  add_common(cmd, o.common, 1000);
  cmd->add_option("--d", o.d, "Dirty line counts")->delimiter(',')->capture_default_str();
  cmd->add_option("--l", o.replacement_size, "Replacement set size")->capture_default_str();
  cmd->add_option("--target-set", o.target_set, "Target set index")->capture_default_str();
}

std::string run_latency_cdf(const LatencyCdf& o) {
  require_seed(o.common);
  ChannelConfig shape;
  shape.defense = parse_defense(o.common.defense);
  CdfSetup setup;
  setup.geometry = shape.effective_geometry();
  setup.policy = parse_policy(o.common.policy);
  setup.latency.jitter = o.common.jitter;
  setup.target_set = o.target_set;
  setup.replacement_size = o.replacement_size;
  const auto rows = latency_cdf(setup, o.d, o.common.trials, o.common.seed);
  std::ostringstream csv;
  write_cdf_csv(csv, rows);
  return csv.str();
}

// --- run-channel ---

struct RunChannel {
  Common common;
  ChannelOptions channel;
  Cycles period = 5500;
  std::optional<Cycles> phase_offset;
  std::string trace;
};

void add_run_channel(CLI::App& app, RunChannel& o) {
  auto* cmd = app.add_subcommand("run-channel", "Run the covert channel once and report BER");
  add_common(cmd, o.common, 0);
  add_channel_options(cmd, o.channel, true);
  cmd->add_option("--period", o.period, "T_s = T_r in cycles")->capture_default_str();
  cmd->add_option("--phase-offset", o.phase_offset, "Receiver offset in cycles (default period / 2)");
  cmd->add_option("--message", o.channel.message, "Explicit message bits instead of a random one");
  cmd->add_option("--trace", o.trace, "Write the event trace CSV here");
}

json counters_json(const EventCounters& counters) {
  json j = json::object();
  auto name = [](ActorId id) -> std::string {
    switch (id) {
      case kSender:
        return "sender";
      case kReceiver:
        return "receiver";
      case kNoise:
        return "noise";
      default:
        return "actor" + std::to_string(id);
    }
  };
  for (const auto& [id, c] : counters.per_actor) {
    j[name(id)] = {{"loads", c.loads},         {"stores", c.stores},         {"l1_hits", c.l1_hits},
                   {"l1_misses", c.l1_misses}, {"writebacks", c.writebacks}, {"uncached", c.uncached}};
  }
  j["cycles"] = counters.cycles;
  return j;
}

std::string run_run_channel(const RunChannel& o, int& exit_code, std::ostream& err) {
  require_seed(o.common);
  ChannelConfig cfg = make_channel(o.common, o.channel, o.channel.d_one);
  cfg.sender_period = cfg.receiver_period = o.period;
  cfg.phase_offset = o.phase_offset;
  cfg.validate();
  // --trials, when given, overrides the calibration run count.
  ChannelOptions opts = o.channel;
  if (o.common.trials > 0) opts.calibration_trials = o.common.trials;
  const Calibration cal = calibrate(cfg, opts, o.common.seed);
  if (!cal.separated) {
    err << "calibration failed: " << cal.problem << '\n';
    exit_code = kExitCalibrationFailure;
    return {};
  }
  const ChannelReport report = run_channel(cfg, cal.thresholds);

  json j;
  j["encoding"] = cfg.encoding.name();
  j["levels"] = cfg.encoding.levels();
  j["period_cycles"] = cfg.sender_period;
  j["phase_offset"] = cfg.effective_phase_offset();
  j["policy"] = to_string(cfg.policy);
  j["defense"] = to_string(cfg.defense);
  j["seed"] = cfg.seed;
  j["rate_kbps"] = report.rate_kbps;
  j["sent_bits"] = format_bits(report.sent_bits);
  j["received_bits"] = format_bits(report.received_bits);
  j["alignment"] = {{"offset", report.alignment.offset},
                    {"distance", report.alignment.distance},
                    {"locked", report.alignment.locked}};
  j["edit_distance"] = report.edit_distance;
  j["ber"] = report.ber;
  j["ber_clamped"] = report.ber_clamped;
  j["thresholds"] = cal.thresholds.cuts;
  j["resident_hits"] = report.resident_hits;
  json trace = json::array();
  for (const auto& d : report.latency_trace) {
    trace.push_back({{"cycle", d.cycle}, {"total_cycles", d.total_cycles}, {"symbol", d.symbol}});
  }
  j["latency_trace"] = std::move(trace);
  j["counters"] = counters_json(report.counters);

  if (!o.trace.empty()) {
    std::ofstream file(o.trace, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + o.trace);
    write_trace_csv(file, report.trace);
  }
  return j.dump(2) + "\n";
}

// --- sweep ---

struct Sweep {
  Common common;
  ChannelOptions channel;
  std::vector<Cycles> periods{std::begin(kDefaultPeriods), std::end(kDefaultPeriods)};
  std::vector<unsigned> d{1};
};

void add_sweep(CLI::App& app, Sweep& o) {
  auto* cmd = app.add_subcommand("sweep", "Mean BER for each period");
  add_common(cmd, o.common, 10);
  add_channel_options(cmd, o.channel, false);
  cmd->add_option("--periods", o.periods, "T_s = T_r values")->delimiter(',')->capture_default_str();
  cmd->add_option("--d", o.d, "Binary dirty-line counts, one sweep each")->delimiter(',')->capture_default_str();
}

std::string run_sweep(const Sweep& o, std::ostream& err) {
  require_seed(o.common);
  std::vector<Cycles> periods = o.periods;
  std::sort(periods.begin(), periods.end());
  periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
  std::vector<unsigned> ds = o.channel.encoding == "binary" ? o.d : std::vector<unsigned>{0};
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());

  std::vector<SweepRow> rows;
  for (unsigned d : ds) {
    ChannelConfig cfg = make_channel(o.common, o.channel, d);
    cfg.validate();
    const Calibration cal = calibrate(cfg, o.channel, o.common.seed);
    if (!cal.separated) err << "warning: " << cal.problem << "; using midpoint thresholds\n";
    auto part = sweep_ber_vs_rate(cfg, periods, o.common.trials, cal.thresholds, o.common.seed);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  return csv.str();
}

// --- gadget ---

struct Gadget {
  Common common;
  std::string variant = "a";
  std::string scenario = "set-state-dirty";
  std::string placement = "distinct-sets";
  unsigned secret = 0;
  unsigned set_i = 0;
  CLI::Option* secret_opt = nullptr;
};

void add_gadget(CLI::App& app, Gadget& o) {
  auto* cmd = app.add_subcommand("gadget", "Infer a victim's secret through a write-back gadget");
  add_common(cmd, o.common, 1);
  cmd->add_option("--variant", o.variant, "Victim listing (a or b)")->capture_default_str();
  cmd->add_option("--scenario", o.scenario, "set-state-dirty|prime-with-dirty|victim-timing (or 1|2|3)")
      ->capture_default_str();
  cmd->add_option("--placement", o.placement, "same-line|same-set|distinct-sets")->capture_default_str();
  o.secret_opt = cmd->add_option("--secret", o.secret, "Victim secret bit")->check(CLI::Range(0, 1));
  cmd->add_option("--set", o.set_i, "Set holding line 0")->capture_default_str();
}

std::string run_gadget(const Gadget& o) {
  require_seed(o.common);
  if (o.secret_opt->count() == 0) throw ConfigError("--secret is required");
  GadgetConfig cfg;
  cfg.variant = parse_variant(o.variant);
  cfg.scenario = parse_scenario(o.scenario);
  cfg.placement = parse_placement(o.placement);
  cfg.policy = parse_policy(o.common.policy);
  cfg.latency.jitter = o.common.jitter;
  cfg.set_i = o.set_i;
  cfg.seed = o.common.seed;
  if (o.common.defense != "none") {
    ChannelConfig shape;
    shape.defense = parse_defense(o.common.defense);
    cfg.geometry = shape.effective_geometry();
    if (cfg.geometry.partition) {
      // Attacker takes the receiver's half, the victim the sender's.
      auto parts = *cfg.geometry.partition;
      cfg.geometry.partition = std::map<ActorId, std::vector<unsigned>>{{kAttacker, parts.at(kReceiver)},
                                                                         {kVictim, parts.at(kSender)}};
    }
  }
  const GadgetResult r = run_gadget_attack(cfg, o.secret);
  json j;
  j["scenario"] = to_string(cfg.scenario);
  j["variant"] = to_string(cfg.variant);
  j["placement"] = to_string(cfg.placement);
  j["policy"] = to_string(cfg.policy);
  j["secret"] = r.secret;
  j["inferred"] = r.inferred;
  j["latencies"] = {{"observed", r.observed},
                    {"secret0", r.profile_secret0},
                    {"secret1", r.profile_secret1},
                    {"delta", r.profile_secret1 - r.profile_secret0},
                    {"threshold", r.threshold}};
  return j.dump(2) + "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Write-back cache covert channel simulator", "dirtysim"};
  app.require_subcommand(1);

  EvictProb evict_prob;
  DirtyEvict dirty_evict;
  LatencyCdf latency_cdf_cmd;
  RunChannel run_channel_cmd;
  Sweep sweep;
  Gadget gadget;
  add_evict_prob(app, evict_prob);
  add_dirty_evict(app, dirty_evict);
  add_latency_cdf(app, latency_cdf_cmd);
  add_run_channel(app, run_channel_cmd);
  add_sweep(app, sweep);
  add_gadget(app, gadget);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::vector<const char*> argv{"dirtysim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    int code = kExitOk;
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    std::string text;
    const Common* common = nullptr;
    if (name == "evict-prob") {
      text = run_evict_prob(evict_prob);
      common = &evict_prob.common;
    } else if (name == "dirty-evict") {
      text = run_dirty_evict(dirty_evict);
      common = &dirty_evict.common;
    } else if (name == "latency-cdf") {
      text = run_latency_cdf(latency_cdf_cmd);
      common = &latency_cdf_cmd.common;
    } else if (name == "run-channel") {
      text = run_run_channel(run_channel_cmd, code, err);
      common = &run_channel_cmd.common;
    } else if (name == "sweep") {
      text = run_sweep(sweep, err);
      common = &sweep.common;
    } else {
      text = run_gadget(gadget);
      common = &gadget.common;
    }
    if (code != kExitOk) return code;
    emit(*common, out, text);
    return kExitOk;
  } catch (const CalibrationError& e) {
    err << "calibration failed: " << e.what() << '\n';
    return kExitCalibrationFailure;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dirtysim::cli
