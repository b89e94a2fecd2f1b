// Copyright 2026 The poalab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// poalab: auction price-of-anarchy laboratory for risk-averse bidders.
//
// Subcommands: verify-theorem6, learn, certify, poa-sweep,
// check-normalization, verify-observation1, verify-two-item, lemma1-test.
// Exit codes: 0 pass, 1 usage error, 2 falsified, 3 uncertified.
//
// Every run is driven by one JSON config (defaults, overlaid by --config,
// overlaid by explicit flags); outputs embed the tool version and the hash
// of the effective config, and identical configs produce byte-identical
// files.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "poalab/constructions.hpp"
#include "poalab/equilibria.hpp"
#include "poalab/report.hpp"
#include "poalab/smoothness.hpp"

namespace {

using json = nlohmann::json;
using namespace poalab;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFalsified = 2;
constexpr int kExitUncertified = 3;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

MechanismKind parse_mechanism(const std::string& name) {
  if (name == "first-price") return MechanismKind::kFirstPrice;
  if (name == "second-price") return MechanismKind::kSecondPrice;
  if (name == "all-pay") return MechanismKind::kAllPay;
  throw std::invalid_argument("unknown mechanism: " + name);
}

/// "x1:h1,x2:h2,..." -> tabulated transform knots.
ConcaveTransform parse_knots(const std::string& text) {
  std::vector<double> xs, ys;
  std::stringstream ss(text);
  std::string pair_text;
  while (std::getline(ss, pair_text, ',')) {
    const auto colon = pair_text.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("knots must look like x:h(x),x:h(x),...");
    }
    xs.push_back(std::stod(pair_text.substr(0, colon)));
    ys.push_back(std::stod(pair_text.substr(colon + 1)));
  }
  return ConcaveTransform::tabulated(std::move(xs), std::move(ys));
}

UtilityModel parse_utility(const std::string& name, double slope,
                           const std::string& knots = "") {
  if (name == "quasilinear") return UtilityModel::quasilinear(1.0);
  if (name == "exponential") {
    return UtilityModel::scaled_risk_averse(1.0, ConcaveTransform::exponential());
  }
  if (name == "piecewise") {
    return UtilityModel::scaled_risk_averse(1.0,
                                            ConcaveTransform::piecewise_linear(slope));
  }
  if (name == "tabulated") {
    if (knots.empty()) throw std::invalid_argument("tabulated utility needs --knots");
    return UtilityModel::scaled_risk_averse(1.0, parse_knots(knots));
  }
  throw std::invalid_argument("unknown utility: " + name);
}

/// Effective run configuration: defaults, then the --config document, then
/// explicitly passed flags. Unknown config keys are rejected.
class Config {
 public:
  void set_default(const std::string& key, const json& v) { doc_[key] = v; }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config: " + path);
    json file = json::parse(in);
    for (auto& [k, v] : file.items()) {
      if (!doc_.contains(k)) {
        throw std::invalid_argument("unknown config key: " + k);
      }
      doc_[k] = v;
    }
  }

  void override_if(const CLI::Option* opt, const std::string& key, const json& v) {
    if (opt->count() > 0) doc_[key] = v;
  }

  double num(const std::string& key) const { return doc_.at(key).get<double>(); }
  std::int64_t integer(const std::string& key) const {
    return doc_.at(key).get<std::int64_t>();
  }
  std::string str(const std::string& key) const {
    return doc_.at(key).get<std::string>();
  }

  /// Canonical experiment description: every parameter except where the
  /// outputs are written, so the hash identifies the run, not the filename.
  std::string canonical() const {
    json c = doc_;
    c.erase("out");
    c.erase("trace_out");
    return c.dump();
  }
  std::string hash() const { return config_hash(canonical()); }

 private:
  json doc_;  // nlohmann::json sorts keys: canonical by construction
};

void emit_header(JsonWriter& w, const Config& cfg) {
  w.field("tool_version", kToolVersion);
  w.field("config_hash", cfg.hash());
  w.field("config", cfg.canonical());
}

// ---------------------------------------------------------------------------
// verify-theorem6
// ---------------------------------------------------------------------------

int cmd_theorem6_sweep(const Config& cfg) {
  const auto scales = parse_list(cfg.str("m_list"));
  for (double m : scales) {
    if (!(m > 5)) {
      std::cerr << "verify-theorem6: every M must be > 5\n";
      return kExitUsage;
    }
  }
  Theorem6Grids grids;
  grids.head_values = static_cast<int>(cfg.integer("grid_values")) / 2;
  grids.tail_values = static_cast<int>(cfg.integer("grid_values")) - grids.head_values;
  grids.extra_bids = static_cast<int>(cfg.integer("grid_bids"));
  grids.player3_bids = static_cast<int>(cfg.integer("grid_player3"));
  Theorem6Tolerances tol;
  tol.relative_regret = cfg.num("tol");
  const std::string head = CsvWriter::comment(
      std::string(kToolVersion) + " config=" + cfg.hash());
  CsvWriter csv({"M", "v3", "ratio_lower", "bne_regret"});
  bool all_pass = true;
  for (double m : scales) {
    const auto r = verify_theorem6(m, grids, tol);
    all_pass = all_pass && r.pass;
    csv.row({format_double(r.m), format_double(r.v3), format_double(r.ratio_lower),
             format_double(r.bne_max_relative_regret)});
  }
  write_output(cfg.str("out"), head + csv.str());
  return all_pass ? kExitOk : kExitFalsified;
}

int cmd_verify_theorem6(const Config& cfg) {
  if (!cfg.str("m_list").empty()) return cmd_theorem6_sweep(cfg);
  const double m = cfg.num("m");
  if (!(m > 5)) {
    std::cerr << "verify-theorem6: M must be > 5\n";
    return kExitUsage;
  }
  Theorem6Grids grids;
  grids.head_values = static_cast<int>(cfg.integer("grid_values")) / 2;
  grids.tail_values = static_cast<int>(cfg.integer("grid_values")) - grids.head_values;
  grids.extra_bids = static_cast<int>(cfg.integer("grid_bids"));
  grids.player3_bids = static_cast<int>(cfg.integer("grid_player3"));
  Theorem6Tolerances tol;
  tol.relative_regret = cfg.num("tol");
  const auto report = verify_theorem6(m, grids, tol);

  JsonWriter w;
  w.begin_object();
  emit_header(w, cfg);
  w.field("M", report.m);
  w.field("eps", report.eps);
  w.field("v3", report.v3);
  w.field("slope_C", report.slope_c);
  w.field("beta_at_M", report.beta_at_m);
  w.key("grids").begin_object();
  w.field("value_points", report.value_grid_size);
  w.field("bid_points", report.bid_grid_size);
  w.field("player3_points", report.player3_grid_size);
  w.end_object();
  w.field("bne_max_regret", report.bne_max_relative_regret);
  w.field("player3_max_utility", report.player3_max_utility);
  w.field("player3_argmax_bid", report.player3_argmax_bid);
  w.field("sw_eq", report.sw_eq);
  w.field("opt_hat", report.opt_hat);
  w.field("expected_v1", report.expected_v1);
  w.field("sw_upper_paper", report.sw_upper_paper);
  w.field("sw_upper_lemma1", 4.0 * report.expected_v1);
  w.field("opt_lower", report.opt_lower);
  w.field("ratio_lower", report.ratio_lower);
  w.key("checks").begin_object();
  w.field("bne_regret", report.bne_ok);
  w.field("player3_negative", report.player3_ok);
  w.field("ratio_closed_form", report.ratio_ok);
  w.end_object();
  w.field("pass", report.pass);
  w.end_object();
  write_output(cfg.str("out"), w.str());
  return report.pass ? kExitOk : kExitFalsified;
}

// ---------------------------------------------------------------------------
// learn
// ---------------------------------------------------------------------------

int cmd_learn(const Config& cfg) {
  const std::int64_t iters = cfg.integer("iters");
  if (iters <= 0) {
    std::cerr << "learn: iterations must be > 0\n";
    return kExitUsage;
  }
  const auto values = parse_list(cfg.str("values"));
  if (values.empty()) {
    std::cerr << "learn: need at least one valuation\n";
    return kExitUsage;
  }
  const MechanismKind kind = parse_mechanism(cfg.str("mechanism"));
  const UtilityModel proto = parse_utility(cfg.str("utility"), cfg.num("slope"));
  const double gamma = cfg.num("gamma");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  const int bid_points = static_cast<int>(cfg.integer("bids"));
  if (bid_points < 2) {
    std::cerr << "learn: need at least 2 bid grid points\n";
    return kExitUsage;
  }

  std::vector<UtilityModel> models;
  double vmax = 0;
  for (double v : values) {
    models.push_back(proto.with_valuation(v));
    vmax = std::max(vmax, v);
  }
  std::vector<double> grid;
  for (int k = 0; k < bid_points; ++k) {
    grid.push_back(vmax * static_cast<double>(k) / (bid_points - 1));
  }
  MechanismSpec mech{kind, TieBreak::kUniformRandom, static_cast<int>(values.size())};
  const auto game = complete_info_game(mech, grid, models);

  const std::string learner = cfg.str("learner");
  const std::string warm = cfg.str("warm_start");
  CorrelatedDist candidate;
  LearnResult learned;
  if (warm == "observation1") {
    if (values.size() != 2) {
      std::cerr << "learn: observation1 warm start needs exactly 2 players\n";
      return kExitUsage;
    }
    const int top = bid_points - 1;
    candidate.support.push_back({{top, 0}, 0.5});
    candidate.support.push_back({{0, top}, 0.5});
  } else if (learner == "regret-matching") {
    learned = learn_regret_matching(game, iters, seed);
    candidate = learned.empirical;
  } else if (learner == "hedge") {
    learned = learn_hedge(game, iters, HedgeSchedule{}, seed);
    candidate = learned.empirical;
  } else {
    std::cerr << "learn: unknown learner " << learner << "\n";
    return kExitUsage;
  }

  const bool coarse = learner == "hedge" && warm.empty();
  const RegretReport certification = coarse ? coarse_regret(game, candidate, gamma)
                                            : ce_regret(game, candidate, gamma);
  const double bound = cfg.num("certify_bound") * vmax;
  const bool certified = certification.max_regret <= bound;

  const auto allocations = single_item_allocations(models);
  const double opt_hat = optimal_value_welfare(allocations);
  const double opt =
      optimal_welfare(models, allocations,
                      static_cast<int>(cfg.integer("payment_points")))
          .value;

  JsonWriter w;
  w.begin_object();
  emit_header(w, cfg);
  w.field("mechanism", to_string(kind));
  w.field("gamma", gamma);
  w.field("seed", static_cast<std::uint64_t>(seed));
  w.field("iterations", iters);
  w.key("bid_grid").begin_object();
  w.field("points", bid_points);
  w.field("max", vmax);
  w.end_object();
  w.field("regret_notion", coarse ? "coarse" : "conditional");
  w.field("max_regret", certification.max_regret);
  w.field("certify_bound", bound);
  w.field("certified", certified);
  w.field("sw_eq", certification.welfare);
  w.field("opt_hat", opt_hat);
  w.field("opt", opt);
  w.field("support_size", static_cast<std::int64_t>(candidate.support.size()));
  w.key("regret_trace").begin_array();
  for (double r : learned.regret_trace) w.value(r);
  w.end_array();
  w.end_object();
  write_output(cfg.str("out"), w.str());

  if (!cfg.str("trace_out").empty()) {
    CsvWriter csv({"step", "avg_regret"});
    const std::string head =
        CsvWriter::comment(std::string(kToolVersion) + " config=" + cfg.hash());
    for (std::size_t i = 0; i < learned.regret_trace.size(); ++i) {
      csv.row({std::to_string(i), format_double(learned.regret_trace[i])});
    }
    write_output(cfg.str("trace_out"), head + csv.str());
  }
  return certified ? kExitOk : kExitUncertified;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

int cmd_certify(const Config& cfg) {
  const MechanismKind kind = parse_mechanism(cfg.str("mechanism"));
  const int players = static_cast<int>(cfg.integer("players"));
  const int value_points = static_cast<int>(cfg.integer("value_grid"));
  const int bid_points = static_cast<int>(cfg.integer("grid"));
  if (players < 2 || value_points < 1 || bid_points < 2) {
    std::cerr << "certify: bad grid sizes\n";
    return kExitUsage;
  }
  SmoothnessInstance inst;
  inst.mechanism = MechanismSpec{kind, TieBreak::kUniformRandom, players};
  for (int i = 0; i < players; ++i) {
    std::vector<double> vg;
    for (int k = 1; k <= value_points; ++k) {
      vg.push_back(static_cast<double>(k) / value_points);
    }
    inst.value_grids.push_back(vg);
  }
  for (int k = 0; k < bid_points; ++k) {
    inst.bid_grid.push_back(static_cast<double>(k) / (bid_points - 1));
  }
  inst.prototype = parse_utility(cfg.str("utility"), cfg.num("slope"));
  const auto budgets = parse_list(cfg.str("budgets"));
  if (!budgets.empty()) {
    if (static_cast<int>(budgets.size()) != players) {
      std::cerr << "certify: budgets arity mismatch\n";
      return kExitUsage;
    }
    inst.budgets = budgets;
  }

  const std::string dev_name = cfg.str("deviation");
  const DeviationGenerator dev = dev_name == "truthful"
                                     ? DeviationGenerator::truthful_bid()
                                     : DeviationGenerator::half_value_top_bidder();

  Benchmark benchmark = Benchmark::kValueWelfare;
  const std::string bench_name = cfg.str("benchmark");
  if (bench_name == "risk-averse") benchmark = Benchmark::kRiskAverseOpt;
  if (bench_name == "liquid") benchmark = Benchmark::kLiquidWelfare;

  const double mu2 = cfg.num("mu2");
  const bool weak = mu2 >= 0;
  Certificate cert;
  std::string mode;
  if (!inst.budgets.empty()) {
    mode = "budget-transfer";
    cert = budget_transfer_check(inst, dev, {cfg.num("lambda"), cfg.num("mu")});
  } else if (weak) {
    mode = "weak";
    cert = certify_weak_smoothness(inst, dev,
                                   {cfg.num("lambda"), cfg.num("mu"), mu2}, benchmark);
  } else {
    mode = "smooth";
    cert = certify_smoothness(inst, dev, {cfg.num("lambda"), cfg.num("mu")}, benchmark);
  }

  JsonWriter w;
  w.begin_object();
  emit_header(w, cfg);
  w.field("mechanism", to_string(kind));
  w.field("mode", mode);
  w.field("lambda", cfg.num("lambda"));
  w.field("mu", cfg.num("mu"));
  if (weak) w.field("mu2", mu2);
  w.key("grid").begin_object();
  w.field("players", players);
  w.field("value_points", value_points);
  w.field("bid_points", bid_points);
  w.end_object();
  w.field("profiles_checked", static_cast<std::int64_t>(cert.profiles_checked));
  w.field("certified", cert.certified);
  w.field("min_slack", cert.min_slack);
  if (!cert.note.empty()) w.field("note", cert.note);
  if (cert.counterexample) {
    w.key("counterexample").begin_object();
    w.key("values").begin_array();
    for (double v : cert.counterexample->values) w.value(v);
    w.end_array();
    w.key("bids").begin_array();
    for (double b : cert.counterexample->bids) w.value(b);
    w.end_array();
    w.field("lhs", cert.counterexample->lhs);
    w.field("rhs", cert.counterexample->rhs);
    w.end_object();
  }
  if (cert.certified) {
    const double bound = weak
                             ? weak_poa_bound({cfg.num("lambda"), cfg.num("mu"), mu2})
                             : poa_bound({cfg.num("lambda"), cfg.num("mu")});
    w.field("efficiency_bound", bound);
  }
  w.end_object();
  write_output(cfg.str("out"), w.str());
  return cert.certified ? kExitOk : kExitFalsified;
}

// ---------------------------------------------------------------------------
// poa-sweep
// ---------------------------------------------------------------------------

int cmd_poa_sweep(const Config& cfg) {
  GameFamily family;
  family.mechanism = parse_mechanism(cfg.str("mechanism"));
  family.n_players = static_cast<int>(cfg.integer("players"));
  family.v_min = cfg.num("vmin");
  family.v_max = cfg.num("vmax");
  family.bid_points = static_cast<int>(cfg.integer("bids"));
  const std::string utility = cfg.str("utility");
  if (utility == "quasilinear") {
    family.utility = FamilyUtility::kQuasilinear;
  } else if (utility == "exponential") {
    family.utility = FamilyUtility::kExponential;
  } else if (utility == "piecewise") {
    family.utility = FamilyUtility::kPiecewise;
    family.piecewise_slope = cfg.num("slope");
  } else {
    std::cerr << "poa-sweep: unknown utility " << utility << "\n";
    return kExitUsage;
  }
  const int n = static_cast<int>(cfg.integer("n"));
  if (n <= 0) {
    std::cerr << "poa-sweep: n must be > 0\n";
    return kExitUsage;
  }
  const LearnerKind learner = cfg.str("learner") == "hedge"
                                  ? LearnerKind::kHedge
                                  : LearnerKind::kRegretMatching;
  const auto sweep = empirical_poa(family, learner, n, cfg.integer("iters"),
                                   static_cast<std::uint64_t>(cfg.integer("seed")),
                                   cfg.num("certify_bound"));

  const std::string head = CsvWriter::comment(
      std::string(kToolVersion) + " config=" + cfg.hash() +
      " seed=" + std::to_string(cfg.integer("seed")) +
      " iters=" + std::to_string(cfg.integer("iters")) +
      " bids=" + std::to_string(family.bid_points));
  CsvWriter csv({"instance_id", "sw_eq", "opt", "opt_hat", "ratio", "regret",
                 "certified", "run_seed"});
  for (const auto& row : sweep.rows) {
    csv.row({std::to_string(row.instance), format_double(row.sw_eq),
             format_double(row.opt), format_double(row.opt_hat),
             format_double(row.ratio), format_double(row.regret),
             row.certified ? "1" : "0", std::to_string(row.seed)});
  }
  write_output(cfg.str("out"), head + csv.str());
  std::cerr << "worst certified ratio: " << format_double(sweep.worst_ratio) << " ("
            << sweep.certified_count << "/" << n << " certified)\n";
  return sweep.certified_count > 0 ? kExitOk : kExitUncertified;
}

// ---------------------------------------------------------------------------
// check-normalization / verify-observation1 / verify-two-item / lemma1-test
// ---------------------------------------------------------------------------

int cmd_check_normalization(const Config& cfg) {
  const UtilityModel proto =
      parse_utility(cfg.str("utility"), cfg.num("slope"), cfg.str("knots"));
  const auto values = parse_list(cfg.str("values"));
  if (values.empty()) {
    std::cerr << "check-normalization: need valuations\n";
    return kExitUsage;
  }
  const int points = static_cast<int>(cfg.integer("p_points"));
  double vmax = 0;
  for (double v : values) vmax = std::max(vmax, v);
  std::vector<double> p_grid;
  for (int k = 0; k <= points; ++k) {
    p_grid.push_back(2.0 * vmax * static_cast<double>(k) / points);
  }
  const auto report = check_normalization(proto, values, p_grid);
  JsonWriter w;
  w.begin_object();
  emit_header(w, cfg);
  w.field("pass", report.pass);
  if (report.violation) {
    w.key("violation").begin_object();
    w.field("valuation", report.violation->valuation);
    w.field("payment", report.violation->payment);
    w.field("property", report.violation->property);
    w.end_object();
  }
  w.end_object();
  write_output(cfg.str("out"), w.str());
  return report.pass ? kExitOk : kExitFalsified;
}

int cmd_verify_observation1(const Config& cfg) {
  const auto report = observation1_verify(cfg.num("gamma"));
  JsonWriter w;
  w.begin_object();
  emit_header(w, cfg);
  w.field("gamma", report.gamma);
  w.field("max_regret", report.max_regret);
  w.field("social_welfare", report.social_welfare);
  w.key("per_player_utility").begin_array();
  w.value(report.per_player_utility[0]);
  w.value(report.per_player_utility[1]);
  w.end_array();
  w.field("certified", report.certified);
  w.end_object();
  write_output(cfg.str("out"), w.str());
  return report.certified ? kExitOk : kExitFalsified;
}

int cmd_verify_two_item(const Config& cfg) {
  const auto report = two_item_verify(cfg.num("gamma"), cfg.num("eps1"));
  JsonWriter w;
  w.begin_object();
  emit_header(w, cfg);
  w.field("gamma", report.gamma);
  w.field("c", report.c);
  w.field("q", report.q);
  w.field("eps1", report.eps1);
  w.field("u2_participate_closed", report.u2_participate_closed);
  w.field("u2_participate_lottery", report.u2_participate_lottery);
  w.field("closed_form_gap", report.closed_form_gap);
  w.field("ne_certified", report.ne_certified);
  w.field("sw_eq", report.sw_eq);
  w.field("opt", report.opt);
  w.field("ratio", report.ratio);
  w.end_object();
  write_output(cfg.str("out"), w.str());
  return report.ne_certified ? kExitOk : kExitFalsified;
}

int cmd_lemma1_test(const Config& cfg) {
  const int n = static_cast<int>(cfg.integer("n"));
  if (n <= 0) {
    std::cerr << "lemma1-test: n must be > 0\n";
    return kExitUsage;
  }
  Rng rng(static_cast<std::uint64_t>(cfg.integer("seed")));
  int failures = 0;
  double worst_ratio = 0;
  for (int trial = 0; trial < n; ++trial) {
    const bool use_piecewise = rng.next_double() < 0.5;
    const int players = 2 + static_cast<int>(rng.next_index(2));
    std::vector<UtilityModel> models;
    for (int i = 0; i < players; ++i) {
      const double v = rng.uniform(0.05, 4.0);
      models.push_back(
          use_piecewise
              ? UtilityModel::scaled_risk_averse(
                    v, ConcaveTransform::piecewise_linear(1.0 + rng.uniform(0.0, 9.0)))
              : UtilityModel::scaled_risk_averse(v, ConcaveTransform::exponential()));
    }
    const auto allocations = single_item_allocations(models);
    const auto report = check_lemma1(models, allocations,
                                     static_cast<int>(cfg.integer("payment_points")));
    if (!report.pass || report.opt < report.opt_hat - 1e-9) ++failures;
    worst_ratio = std::max(worst_ratio, report.opt / report.opt_hat);
  }
  JsonWriter w;
  w.begin_object();
  emit_header(w, cfg);
  w.field("instances", n);
  w.field("failures", failures);
  w.field("worst_opt_to_opt_hat", worst_ratio);
  w.field("pass", failures == 0);
  w.end_object();
  write_output(cfg.str("out"), w.str());
  return failures == 0 ? kExitOk : kExitFalsified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poalab: auction price-of-anarchy laboratory for risk-averse bidders"};
  app.require_subcommand(1);

  // ---- verify-theorem6
  Config t6;
  t6.set_default("m", 8.0);
  t6.set_default("m_list", "");
  t6.set_default("tol", 1e-3);
  t6.set_default("grid_values", 400);
  t6.set_default("grid_bids", 100);
  t6.set_default("grid_player3", 2000);
  t6.set_default("out", "");
  auto* sub_t6 = app.add_subcommand("verify-theorem6",
                                    "all-pay lower bound: equilibrium and ratio checks");
  std::string t6_config;
  double t6_m = 8, t6_tol = 1e-3;
  std::int64_t t6_gv = 400, t6_gb = 100, t6_gp = 2000;
  std::string t6_out;
  sub_t6->add_option("--config", t6_config, "JSON config file");
  auto* o_m = sub_t6->add_option("--m", t6_m, "instance scale M (> 5)");
  std::string t6_mlist;
  auto* o_mlist = sub_t6->add_option("--m-list", t6_mlist,
                                     "comma-separated scales: emit a ratio-vs-M CSV");
  auto* o_tol = sub_t6->add_option("--tol", t6_tol, "relative regret tolerance");
  auto* o_gv = sub_t6->add_option("--grid-values", t6_gv, "total value grid points");
  auto* o_gb = sub_t6->add_option("--grid-bids", t6_gb, "extra deviation bids");
  auto* o_gp = sub_t6->add_option("--grid-player3", t6_gp, "player-3 bid grid points");
  auto* o_out = sub_t6->add_option("--out", t6_out, "output JSON path");

  // ---- learn
  Config lc;
  lc.set_default("mechanism", "first-price");
  lc.set_default("utility", "quasilinear");
  lc.set_default("slope", 1.0);
  lc.set_default("gamma", 0.0);
  lc.set_default("values", "1.0,1.0");
  lc.set_default("bids", 21);
  lc.set_default("iters", 100000);
  lc.set_default("seed", 1);
  lc.set_default("learner", "regret-matching");
  lc.set_default("warm_start", "");
  lc.set_default("certify_bound", 0.02);
  lc.set_default("payment_points", 512);
  lc.set_default("out", "");
  lc.set_default("trace_out", "");
  auto* sub_learn = app.add_subcommand("learn", "no-regret learning + certification");
  std::string l_config, l_mech = "first-price", l_util = "quasilinear",
              l_values = "1.0,1.0", l_learner = "regret-matching", l_warm, l_out,
              l_trace;
  double l_slope = 1.0, l_gamma = 0.0, l_bound = 0.02;
  std::int64_t l_bids = 21, l_iters = 100000, l_seed = 1;
  sub_learn->add_option("--config", l_config, "JSON config file");
  auto* lo_mech =
      sub_learn->add_option("--mechanism", l_mech, "first-price|second-price|all-pay");
  auto* lo_util =
      sub_learn->add_option("--utility", l_util, "quasilinear|exponential|piecewise");
  auto* lo_slope = sub_learn->add_option("--slope", l_slope, "piecewise slope C");
  auto* lo_gamma = sub_learn->add_option("--gamma", l_gamma, "variance-aversion gamma");
  auto* lo_values =
      sub_learn->add_option("--values", l_values, "comma-separated valuations");
  auto* lo_bids = sub_learn->add_option("--bids", l_bids, "bid grid points");
  auto* lo_iters = sub_learn->add_option("--iters", l_iters, "learning iterations");
  auto* lo_seed = sub_learn->add_option("--seed", l_seed, "rng seed");
  auto* lo_learner =
      sub_learn->add_option("--learner", l_learner, "regret-matching|hedge");
  auto* lo_warm = sub_learn->add_option("--warm-start", l_warm, "observation1");
  auto* lo_bound = sub_learn->add_option("--certify-bound", l_bound,
                                         "certification bound as a fraction of vmax");
  auto* lo_out = sub_learn->add_option("--out", l_out, "output JSON path");
  auto* lo_trace = sub_learn->add_option("--trace-out", l_trace, "regret trace CSV path");

  // ---- certify
  Config cc;
  cc.set_default("mechanism", "all-pay");
  cc.set_default("deviation", "half-value");
  cc.set_default("lambda", 0.5);
  cc.set_default("mu", 1.0);
  cc.set_default("mu2", -1.0);  // < 0: plain smoothness
  cc.set_default("players", 3);
  cc.set_default("grid", 21);
  cc.set_default("value_grid", 10);
  cc.set_default("utility", "quasilinear");
  cc.set_default("slope", 1.0);
  cc.set_default("benchmark", "value");
  cc.set_default("budgets", "");
  cc.set_default("out", "");
  auto* sub_cert = app.add_subcommand("certify", "grid smoothness certification");
  std::string c_config, c_mech = "all-pay", c_dev = "half-value",
              c_util = "quasilinear", c_bench = "value", c_budgets, c_out;
  double c_lambda = 0.5, c_mu = 1.0, c_mu2 = -1.0, c_slope = 1.0;
  std::int64_t c_players = 3, c_grid = 21, c_vgrid = 10;
  sub_cert->add_option("--config", c_config, "JSON config file");
  auto* co_mech = sub_cert->add_option("--mechanism", c_mech, "mechanism kind");
  auto* co_dev = sub_cert->add_option("--deviation", c_dev, "half-value|truthful");
  auto* co_lambda = sub_cert->add_option("--lambda", c_lambda, "lambda");
  auto* co_mu = sub_cert->add_option("--mu", c_mu, "mu (mu1 for weak)");
  auto* co_mu2 = sub_cert->add_option("--mu2", c_mu2, "mu2 (enables weak smoothness)");
  auto* co_players = sub_cert->add_option("--players", c_players, "player count");
  auto* co_grid = sub_cert->add_option("--grid", c_grid, "bid grid points");
  auto* co_vgrid = sub_cert->add_option("--value-grid", c_vgrid, "value grid points");
  auto* co_util = sub_cert->add_option("--utility", c_util, "utility shape");
  auto* co_slope = sub_cert->add_option("--slope", c_slope, "piecewise slope C");
  auto* co_bench =
      sub_cert->add_option("--benchmark", c_bench, "value|risk-averse|liquid");
  auto* co_budgets = sub_cert->add_option("--budgets", c_budgets,
                                          "comma-separated budgets (budget transfer)");
  auto* co_out = sub_cert->add_option("--out", c_out, "output JSON path");

  // ---- poa-sweep
  Config pc;
  pc.set_default("mechanism", "first-price");
  pc.set_default("utility", "quasilinear");
  pc.set_default("slope", 1.0);
  pc.set_default("players", 3);
  pc.set_default("vmin", 0.2);
  pc.set_default("vmax", 1.0);
  pc.set_default("bids", 21);
  pc.set_default("n", 10);
  pc.set_default("iters", 50000);
  pc.set_default("seed", 1);
  pc.set_default("learner", "regret-matching");
  pc.set_default("certify_bound", 0.02);
  pc.set_default("out", "");
  auto* sub_poa = app.add_subcommand("poa-sweep", "empirical PoA over a random family");
  std::string p_config, p_mech = "first-price", p_util = "quasilinear",
              p_learner = "regret-matching", p_out;
  double p_slope = 1.0, p_vmin = 0.2, p_vmax = 1.0, p_bound = 0.02;
  std::int64_t p_players = 3, p_bids = 21, p_n = 10, p_iters = 50000, p_seed = 1;
  sub_poa->add_option("--config", p_config, "JSON config file");
  auto* po_mech = sub_poa->add_option("--mechanism", p_mech, "mechanism kind");
  auto* po_util = sub_poa->add_option("--utility", p_util, "utility shape");
  auto* po_slope = sub_poa->add_option("--slope", p_slope, "piecewise slope C");
  auto* po_players = sub_poa->add_option("--players", p_players, "player count");
  auto* po_vmin = sub_poa->add_option("--vmin", p_vmin, "value lower bound");
  auto* po_vmax = sub_poa->add_option("--vmax", p_vmax, "value upper bound");
  auto* po_bids = sub_poa->add_option("--bids", p_bids, "bid grid points");
  auto* po_n = sub_poa->add_option("--n", p_n, "number of instances");
  auto* po_iters = sub_poa->add_option("--iters", p_iters, "learning iterations");
  auto* po_seed = sub_poa->add_option("--seed", p_seed, "rng seed");
  auto* po_learner = sub_poa->add_option("--learner", p_learner, "regret-matching|hedge");
  auto* po_bound = sub_poa->add_option("--certify-bound", p_bound, "certification bound");
  auto* po_out = sub_poa->add_option("--out", p_out, "output CSV path");

  // ---- check-normalization
  Config nc;
  nc.set_default("utility", "exponential");
  nc.set_default("slope", 1.0);
  nc.set_default("knots", "");
  nc.set_default("values", "0.5,1.0,2.0");
  nc.set_default("p_points", 64);
  nc.set_default("out", "");
  auto* sub_norm = app.add_subcommand("check-normalization",
                                      "normalized risk-aversion property check");
  std::string n_config, n_util = "exponential", n_values = "0.5,1.0,2.0", n_out;
  double n_slope = 1.0;
  std::int64_t n_points = 64;
  sub_norm->add_option("--config", n_config, "JSON config file");
  auto* no_util = sub_norm->add_option("--utility", n_util, "utility shape");
  auto* no_slope = sub_norm->add_option("--slope", n_slope, "piecewise slope C");
  auto* no_values =
      sub_norm->add_option("--values", n_values, "comma-separated valuations");
  auto* no_points = sub_norm->add_option("--p-points", n_points, "payment grid points");
  std::string n_knots;
  auto* no_knots = sub_norm->add_option("--knots", n_knots,
                                        "tabulated transform knots x:h,x:h,...");
  auto* no_out = sub_norm->add_option("--out", n_out, "output JSON path");

  // ---- verify-observation1
  Config oc;
  oc.set_default("gamma", 1.0);
  oc.set_default("out", "");
  auto* sub_obs = app.add_subcommand("verify-observation1",
                                     "zero-welfare second-price correlated equilibrium");
  std::string obs_config, obs_out;
  double obs_gamma = 1.0;
  sub_obs->add_option("--config", obs_config, "JSON config file");
  auto* oo_gamma = sub_obs->add_option("--gamma", obs_gamma, "variance-aversion gamma");
  auto* oo_out = sub_obs->add_option("--out", obs_out, "output JSON path");

  // ---- verify-two-item
  Config tc;
  tc.set_default("gamma", 1.0);
  tc.set_default("eps1", 0.01);
  tc.set_default("out", "");
  auto* sub_two = app.add_subcommand("verify-two-item",
                                     "smooth two-item mechanism with a bad equilibrium");
  std::string two_config, two_out;
  double two_gamma = 1.0, two_eps = 0.01;
  sub_two->add_option("--config", two_config, "JSON config file");
  auto* to_gamma = sub_two->add_option("--gamma", two_gamma, "variance-aversion gamma");
  auto* to_eps = sub_two->add_option("--eps1", two_eps, "player 1 value");
  auto* to_out = sub_two->add_option("--out", two_out, "output JSON path");

  // ---- lemma1-test
  Config mc;
  mc.set_default("n", 1000);
  mc.set_default("seed", 1);
  mc.set_default("payment_points", 64);
  mc.set_default("out", "");
  auto* sub_l1 = app.add_subcommand("lemma1-test", "randomized OPT <= 2 OPT-hat check");
  std::string l1_config, l1_out;
  std::int64_t l1_n = 1000, l1_seed = 1, l1_pp = 64;
  sub_l1->add_option("--config", l1_config, "JSON config file");
  auto* mo_n = sub_l1->add_option("--n", l1_n, "number of random instances");
  auto* mo_seed = sub_l1->add_option("--seed", l1_seed, "rng seed");
  auto* mo_pp = sub_l1->add_option("--payment-points", l1_pp, "payment grid points");
  auto* mo_out = sub_l1->add_option("--out", l1_out, "output JSON path");

  try {
    app.parse(argc, argv);

    if (*sub_t6) {
      if (!t6_config.empty()) t6.load_file(t6_config);
      t6.override_if(o_m, "m", t6_m);
      t6.override_if(o_mlist, "m_list", t6_mlist);
      t6.override_if(o_tol, "tol", t6_tol);
      t6.override_if(o_gv, "grid_values", t6_gv);
      t6.override_if(o_gb, "grid_bids", t6_gb);
      t6.override_if(o_gp, "grid_player3", t6_gp);
      t6.override_if(o_out, "out", t6_out);
      return cmd_verify_theorem6(t6);
    }
    if (*sub_learn) {
      if (!l_config.empty()) lc.load_file(l_config);
      lc.override_if(lo_mech, "mechanism", l_mech);
      lc.override_if(lo_util, "utility", l_util);
      lc.override_if(lo_slope, "slope", l_slope);
      lc.override_if(lo_gamma, "gamma", l_gamma);
      lc.override_if(lo_values, "values", l_values);
      lc.override_if(lo_bids, "bids", l_bids);
      lc.override_if(lo_iters, "iters", l_iters);
      lc.override_if(lo_seed, "seed", l_seed);
      lc.override_if(lo_learner, "learner", l_learner);
      lc.override_if(lo_warm, "warm_start", l_warm);
      lc.override_if(lo_bound, "certify_bound", l_bound);
      lc.override_if(lo_out, "out", l_out);
      lc.override_if(lo_trace, "trace_out", l_trace);
      return cmd_learn(lc);
    }
    if (*sub_cert) {
      if (!c_config.empty()) cc.load_file(c_config);
      cc.override_if(co_mech, "mechanism", c_mech);
      cc.override_if(co_dev, "deviation", c_dev);
      cc.override_if(co_lambda, "lambda", c_lambda);
      cc.override_if(co_mu, "mu", c_mu);
      cc.override_if(co_mu2, "mu2", c_mu2);
      cc.override_if(co_players, "players", c_players);
      cc.override_if(co_grid, "grid", c_grid);
      cc.override_if(co_vgrid, "value_grid", c_vgrid);
      cc.override_if(co_util, "utility", c_util);
      cc.override_if(co_slope, "slope", c_slope);
      cc.override_if(co_bench, "benchmark", c_bench);
      cc.override_if(co_budgets, "budgets", c_budgets);
      cc.override_if(co_out, "out", c_out);
      return cmd_certify(cc);
    }
    if (*sub_poa) {
      if (!p_config.empty()) pc.load_file(p_config);
      pc.override_if(po_mech, "mechanism", p_mech);
      pc.override_if(po_util, "utility", p_util);
      pc.override_if(po_slope, "slope", p_slope);
      pc.override_if(po_players, "players", p_players);
      pc.override_if(po_vmin, "vmin", p_vmin);
      pc.override_if(po_vmax, "vmax", p_vmax);
      pc.override_if(po_bids, "bids", p_bids);
      pc.override_if(po_n, "n", p_n);
      pc.override_if(po_iters, "iters", p_iters);
      pc.override_if(po_seed, "seed", p_seed);
      pc.override_if(po_learner, "learner", p_learner);
      pc.override_if(po_bound, "certify_bound", p_bound);
      pc.override_if(po_out, "out", p_out);
      return cmd_poa_sweep(pc);
    }
    if (*sub_norm) {
      if (!n_config.empty()) nc.load_file(n_config);
      nc.override_if(no_util, "utility", n_util);
      nc.override_if(no_slope, "slope", n_slope);
      nc.override_if(no_values, "values", n_values);
      nc.override_if(no_points, "p_points", n_points);
      nc.override_if(no_knots, "knots", n_knots);
      nc.override_if(no_out, "out", n_out);
      return cmd_check_normalization(nc);
    }
    if (*sub_obs) {
      if (!obs_config.empty()) oc.load_file(obs_config);
      oc.override_if(oo_gamma, "gamma", obs_gamma);
      oc.override_if(oo_out, "out", obs_out);
      return cmd_verify_observation1(oc);
    }
    if (*sub_two) {
      if (!two_config.empty()) tc.load_file(two_config);
      tc.override_if(to_gamma, "gamma", two_gamma);
      tc.override_if(to_eps, "eps1", two_eps);
      tc.override_if(to_out, "out", two_out);
      return cmd_verify_two_item(tc);
    }
    if (*sub_l1) {
      if (!l1_config.empty()) mc.load_file(l1_config);
      mc.override_if(mo_n, "n", l1_n);
      mc.override_if(mo_seed, "seed", l1_seed);
      mc.override_if(mo_pp, "payment_points", l1_pp);
      mc.override_if(mo_out, "out", l1_out);
      return cmd_lemma1_test(mc);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
