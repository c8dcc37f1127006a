// Copyright 2026 The qmonty Authors.
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

#include "cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmonty/angle.hpp"
#include "qmonty/equilibrium.hpp"
#include "qmonty/game.hpp"
#include "qmonty/montecarlo.hpp"
#include "qmonty/nstage.hpp"
#include "qmonty/service.hpp"
#include "qmonty/service_http.hpp"

namespace qmonty::cli {
namespace {

using Json = nlohmann::json;

enum class Format { kTable, kJson, kCsv };

// Collects one report and prints it in the requested format. Table and CSV
// put the banner and echoed parameters on leading lines; JSON carries them
// as fields.
class Report {
 public:
  Report(std::string command, Format format, bool banner)
      : command_(std::move(command)), format_(format), banner_(banner) {}

  void Param(const std::string& key, const std::string& text, Json value) {
    params_.emplace_back(key, text);
    json_params_[key] = std::move(value);
  }
  void Param(const std::string& key, double v) { Param(key, FormatDouble(v), v); }

  void Field(const std::string& key, const std::string& text, Json value) {
    fields_.emplace_back(key, text);
    json_fields_[key] = std::move(value);
  }
  void Field(const std::string& key, double v, int decimals = -1) {
    Field(key, decimals < 0 ? FormatDouble(v) : fmt::format("{:.{}f}", v, decimals), v);
  }

  void Print(std::ostream& out) const {
    if (format_ == Format::kJson) {
      Json doc;
      if (banner_) doc["version"] = kVersion;
      doc["command"] = command_;
      doc["params"] = json_params_.is_null() ? Json::object() : json_params_;
      for (auto& [k, v] : json_fields_.items()) doc[k] = v;
      out << doc.dump(2) << '\n';
      return;
    }
    const char* prefix = format_ == Format::kCsv ? "# " : "";
    PrintHeader(out, prefix);
    for (const auto& [k, v] : fields_) {
      if (format_ == Format::kCsv) {
        fmt::print(out, "{},{}\n", k, v);
      } else {
        fmt::print(out, "{:<16}{}\n", k, v);
      }
    }
  }

  void PrintHeader(std::ostream& out, const char* prefix) const {
    if (banner_) fmt::print(out, "{}qmonty {}\n", prefix, kVersion);
    std::string line = fmt::format("# {}", command_);
    for (const auto& [k, v] : params_) line += fmt::format(" {}={}", k, v);
    out << line << '\n';
  }

 private:
  std::string command_;
  Format format_;
  bool banner_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::vector<std::pair<std::string, std::string>> fields_;
  Json json_params_;
  Json json_fields_ = Json::object();
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double Angle(const std::string& text, const char* flag) {
  try {
    return ParseAngle(text);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::uint64_t DefaultSeed() {
  if (const char* env = std::getenv("QMONTY_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("QMONTY_SEED must be an unsigned integer");
    }
  }
  return kDefaultSeed;
}

SweepGrid ParseGrid(const std::string& text) {
  SweepGrid grid;
  char x1 = 0, x2 = 0;
  std::istringstream is(text);
  if (!(is >> grid.alpha0_steps >> x1 >> grid.alpha1_steps >> x2 >> grid.decision_steps) || x1 != 'x' ||
      x2 != 'x' || !is.eof()) {
    throw UsageError("--grid must look like 201x201x101");
  }
  if (grid.alpha0_steps < 2 || grid.alpha1_steps < 2 || grid.decision_steps < 2) {
    throw UsageError("--grid axes need at least 2 points");
  }
  return grid;
}

// "a0,a1,eta" with angles in radians or pi fractions, or the name "nash".
StrategyProfile ParseProfile(const std::string& text) {
  if (text == "nash") return StrategyProfile::Nash();
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--profile must be 'nash' or 'alpha0,alpha1,eta'");
  try {
    return {AliceMeasurementStrategy(Angle(parts[0], "--profile"), Angle(parts[1], "--profile")),
            BobStrategy::MakeMix(std::stod(parts[2]))};
  } catch (const Error& e) {
    throw UsageError(std::string("--profile: ") + e.what());
  } catch (const std::logic_error&) {
    throw UsageError("--profile: bad eta");
  }
}

BobPolicy ParsePolicy(const std::string& text, int n_boxes) {
  BobPolicy policy;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "stick") {
      policy.decisions.push_back(StageDecision::kStick);
    } else if (item == "switch") {
      policy.decisions.push_back(StageDecision::kSwitch);
    } else {
      throw UsageError("--policy entries must be stick or switch");
    }
  }
  if (static_cast<int>(policy.decisions.size()) != n_boxes - 2) {
    throw UsageError(fmt::format("--policy needs {} entries for {} boxes", n_boxes - 2, n_boxes));
  }
  return policy;
}

TieBreak ParseTieBreak(const std::string& text) {
  if (text == "uniform") return TieBreak::kUniform;
  if (text == "adversarial") return TieBreak::kAdversarial;
  throw UsageError("--tie-break must be uniform or adversarial");
}

std::string BoolText(bool b) { return b ? "true" : "false"; }

httplib::Server* g_server = nullptr;

extern "C" void StopServer(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Monty Hall: payoffs, equilibria, N-stage analysis and a play service", "qmonty"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format_text = "table";
  bool no_banner = false;
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--format", format_text, "table | json | csv")->check(CLI::IsMember({"table", "json", "csv"}));
  app.add_flag("--no-banner", no_banner, "omit the version banner");
  app.add_option("--seed", seed_flag, "random seed (default: $QMONTY_SEED or a fixed constant)");

  std::string a0_text = "pi/4", a1_text = "pi/4";
  std::optional<double> eta;
  std::string beta_text;
  auto* payoff = app.add_subcommand("payoff", "win probability and gain of a strategy profile");
  payoff->add_option("--alpha0", a0_text, "Alice's angle when the particle is in Bob's box")->required();
  payoff->add_option("--alpha1", a1_text, "Alice's angle when the particle is in the other box")->required();
  auto* eta_opt = payoff->add_option("--eta", eta, "probability that Bob sticks");
  auto* beta_opt = payoff->add_option("--beta", beta_text, "coherent decision angle");
  eta_opt->excludes(beta_opt);

  std::string grid_text = "201x201x101";
  bool quantum_bob = false;
  std::string out_path;
  auto* sweep = app.add_subcommand("sweep", "payoff table over (alpha0, alpha1, eta|beta)");
  sweep->add_option("--grid", grid_text, "points per axis, A0xA1xD");
  sweep->add_flag("--quantum-bob", quantum_bob, "sweep coherent decisions beta in [0, pi)");
  sweep->add_option("--out", out_path, "write the table to a file instead of stdout");

  double tol = 1e-9;
  double nash_eta = 0.5;
  std::string nash_a0 = "pi/4", nash_a1 = "pi/4";
  bool expect_nash = false;
  auto* nash = app.add_subcommand("nash", "verify a profile is a Nash equilibrium");
  nash->add_option("--alpha0", nash_a0);
  nash->add_option("--alpha1", nash_a1);
  nash->add_option("--eta", nash_eta);
  nash->add_option("--tol", tol);
  nash->add_flag("--expect-nash", expect_nash, "exit 1 unless the profile verifies");

  std::string step_text = "pi/200";
  double threshold = 0.2;
  auto* scan = app.add_subcommand("scan-pure", "exploitability scan over pure Bob strategies");
  scan->add_option("--step", step_text, "angle grid step");
  scan->add_option("--threshold", threshold, "minimum exploitability required of every pure profile");

  int n_boxes = 3;
  bool brute_force = false, quantum = false;
  std::string tie_break_text = "uniform";
  auto* nstage = app.add_subcommand("nstage", "N-box game: classical optimum and quantum last-step equilibrium");
  nstage->add_option("--n", n_boxes, "number of boxes")->required();
  nstage->add_flag("--brute-force", brute_force, "enumerate every classical policy exactly");
  nstage->add_flag("--quantum", quantum, "verify the last-step quantum equilibrium");
  nstage->add_option("--tie-break", tie_break_text, "uniform | adversarial");
  nstage->add_option("--tol", tol);

  std::int64_t trials = 100000;
  int chunks = kDefaultChunks;
  std::string profile_text = "nash";
  std::string policy_text;
  int mc_n = 3;
  auto* mc = app.add_subcommand("mc", "Monte Carlo estimate checked against the exact value");
  mc->add_option("--trials", trials)->check(CLI::PositiveNumber);
  mc->add_option("--chunks", chunks)->check(CLI::PositiveNumber);
  mc->add_option("--profile", profile_text, "'nash' or 'alpha0,alpha1,eta'");
  mc->add_option("--n", mc_n, "boxes; with --policy plays the classical N-stage game");
  mc->add_option("--policy", policy_text, "N-stage policy, e.g. stick,stick,switch");

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string persist_path;
  auto* serve = app.add_subcommand("serve", "run the HTTP session service");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--persist", persist_path, "write resolved-round transcripts here on shutdown");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  const Format format =
      format_text == "json" ? Format::kJson : (format_text == "csv" ? Format::kCsv : Format::kTable);
  const bool banner = !no_banner;

  try {
    const std::uint64_t seed = seed_flag ? *seed_flag : DefaultSeed();

    if (*payoff) {
      if (!eta && beta_text.empty()) throw UsageError("payoff needs --eta or --beta");
      const double a0 = Angle(a0_text, "--alpha0");
      const double a1 = Angle(a1_text, "--alpha1");
      const AliceMeasurementStrategy alice(a0, a1);
      std::optional<double> beta;
      if (!beta_text.empty()) beta = Angle(beta_text, "--beta");
      const BobStrategy bob = eta ? BobStrategy::MakeMix(*eta) : BobStrategy::MakeQuantum(*beta);
      const PayoffReport r = expected_payoff(alice, bob);
      if (format == Format::kCsv) {
        Report header("payoff", format, banner);
        header.Param("alpha0", a0);
        header.Param("alpha1", a1);
        if (eta) header.Param("eta", *eta);
        if (beta) header.Param("beta", *beta);
        header.PrintHeader(out, "# ");
        SweepRow row{a0, a1, std::nullopt, std::nullopt, r.p_win, r.gain};
        if (eta) row.eta = *eta;
        if (beta) row.beta = std::get<BobStrategy::Quantum>(bob.variant()).beta;
        WriteSweepCsv(out, {row});
        return kExitOk;
      }
      Report rep("payoff", format, banner);
      rep.Param("alpha0", a0);
      rep.Param("alpha1", a1);
      if (eta) rep.Param("eta", *eta);
      if (beta) rep.Param("beta", *beta);
      rep.Field("p_win", r.p_win, format == Format::kTable ? 6 : -1);
      rep.Field("gain", r.gain, format == Format::kTable ? 6 : -1);
      rep.Field("method", ToString(r.method), ToString(r.method));
      rep.Field("stderr", r.std_error);
      rep.Print(out);
      return kExitOk;
    }

    if (*sweep) {
      SweepGrid grid = ParseGrid(grid_text);
      grid.quantum_bob = quantum_bob;
      const auto rows = sweep_payoff(grid);
      Report header("sweep", format, banner);
      header.Param("grid", grid_text, grid_text);
      header.Param("quantum_bob", BoolText(quantum_bob), quantum_bob);
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw UsageError("cannot open --out file " + out_path);
      }
      std::ostream& dest = out_path.empty() ? out : file;
      if (format == Format::kJson) {
        if (out_path.empty()) {
          Json doc{{"command", "sweep"}, {"params", {{"grid", grid_text}, {"quantum_bob", quantum_bob}}},
                   {"rows", SweepToJson(rows)}};
          if (banner) doc["version"] = kVersion;
          out << doc.dump() << '\n';
        } else {
          header.PrintHeader(out, "");
          dest << SweepToJson(rows).dump() << '\n';
        }
      } else {
        header.PrintHeader(out, "# ");
        WriteSweepCsv(dest, rows);
      }
      if (!out_path.empty()) fmt::print(out, "wrote {} rows to {}\n", rows.size(), out_path);
      return kExitOk;
    }

    if (*nash) {
      const StrategyProfile profile{AliceMeasurementStrategy(Angle(nash_a0, "--alpha0"), Angle(nash_a1, "--alpha1")),
                                    BobStrategy::MakeMix(nash_eta)};
      const EquilibriumReport r = verify_nash(profile, tol);
      Report rep("nash", format, banner);
      rep.Param("alpha0", profile.alice.alpha0());
      rep.Param("alpha1", profile.alice.alpha1());
      rep.Param("eta", nash_eta);
      rep.Param("tol", tol);
      rep.Field("value", r.value);
      rep.Field("gain", r.gain());
      rep.Field("exploitability", r.exploitability);
      rep.Field("is_nash", BoolText(r.is_nash), r.is_nash);
      rep.Field("alice_best_dev",
                fmt::format("alpha0={} alpha1={} value={}", FormatDouble(r.alice_best_dev.strategy.alpha0()),
                            FormatDouble(r.alice_best_dev.strategy.alpha1()), FormatDouble(r.alice_best_dev.value)),
                ReportToJson(r)["alice_best_dev"]);
      rep.Field("bob_best_dev",
                fmt::format("{} value={}", r.bob_best_dev.strategy.Describe(), FormatDouble(r.bob_best_dev.value)),
                ReportToJson(r)["bob_best_dev"]);
      rep.Print(out);
      return expect_nash && !r.is_nash ? kExitCheckFailed : kExitOk;
    }

    if (*scan) {
      const double step = Angle(step_text, "--step");
      const PureScanCertificate c = no_pure_equilibrium_scan(step, threshold);
      Report rep("scan-pure", format, banner);
      rep.Param("step", step);
      rep.Param("threshold", threshold);
      rep.Field("points_per_axis", std::to_string(c.points_per_axis), c.points_per_axis);
      rep.Field("min_exploit", c.min_exploitability);
      rep.Field("argmin_alpha0", c.argmin_alpha0);
      rep.Field("argmin_alpha1", c.argmin_alpha1);
      rep.Field("argmin_eta", c.argmin_eta);
      rep.Field("argmin_p_win", c.argmin_value);
      rep.Field("min_stick", c.min_exploitability_stick);
      rep.Field("min_switch", c.min_exploitability_switch);
      rep.Field("violations", std::to_string(c.violations), c.violations);
      rep.Field("passed", BoolText(c.passed), c.passed);
      rep.Print(out);
      return c.passed ? kExitOk : kExitCheckFailed;
    }

    if (*nstage) {
      NStageConfig config{n_boxes, ParseTieBreak(tie_break_text)};
      if (n_boxes < 3) throw UsageError("--n must be >= 3");
      if (!brute_force && !quantum) {
        brute_force = n_boxes <= kBruteForceLimit;
        quantum = true;
      }
      if (brute_force && n_boxes > kBruteForceLimit) {
        throw UsageError(fmt::format("--brute-force supports n <= {}", kBruteForceLimit));
      }
      Report rep("nstage", format, banner);
      rep.Param("n", std::to_string(n_boxes), n_boxes);
      rep.Param("tie_break", tie_break_text, tie_break_text);
      bool ok = true;
      if (brute_force) {
        const PolicyValue best = optimal_classical_policy(config);
        const Json j = NStageReportJson(config, best);
        rep.Field("policy", best.policy.ToString(), j["policy"]);
        rep.Field("exact_value", RationalString(best.value), j["exact_value"]);
        rep.Field("float_value", best.value.convert_to<double>());
        ok = ok && best.policy == BobPolicy::StickThenSwitch(n_boxes) &&
             best.value == Rational(n_boxes - 1, n_boxes);
      }
      if (quantum) {
        rep.Param("tol", tol);
        const EquilibriumReport q = quantum_nstage_equilibrium(config, tol);
        rep.Field("quantum_value", q.value);
        rep.Field("quantum_gain", q.gain());
        rep.Field("exploitability", q.exploitability);
        rep.Field("is_nash", BoolText(q.is_nash), q.is_nash);
        ok = ok && q.is_nash;
      }
      rep.Print(out);
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*mc) {
      Report rep("mc", format, banner);
      rep.Param("trials", std::to_string(trials), trials);
      rep.Param("seed", std::to_string(seed), seed);
      rep.Param("chunks", std::to_string(chunks), chunks);
      if (!policy_text.empty()) {
        if (mc_n < 3) throw UsageError("--n must be >= 3");
        const BobPolicy policy = ParsePolicy(policy_text, mc_n);
        McScenario scenario{NStageConfig{mc_n, TieBreak::kUniform}, policy, false};
        const McEstimate est = simulate(StrategyProfile::Nash(), trials, seed, scenario, chunks);
        rep.Param("n", std::to_string(mc_n), mc_n);
        rep.Param("policy", policy_text, policy_text);
        rep.Field("p_hat", est.p_hat);
        rep.Field("stderr", est.std_error);
        bool pass = true;
        if (mc_n <= kBruteForceLimit) {
          const double exact = classical_value(policy, {mc_n, TieBreak::kUniform}).convert_to<double>();
          pass = std::abs(est.p_hat - exact) <= kSigmaBand * est.std_error;
          rep.Field("p_exact", exact);
          rep.Field("pass", BoolText(pass), pass);
        }
        rep.Print(out);
        return pass ? kExitOk : kExitCheckFailed;
      }
      const StrategyProfile profile = ParseProfile(profile_text);
      const McComparison c = compare_with_analytic(profile, trials, seed, chunks);
      rep.Param("profile", profile_text, profile_text);
      rep.Field("p_hat", c.estimate.p_hat);
      rep.Field("stderr", c.estimate.std_error);
      rep.Field("p_exact", c.p_exact);
      rep.Field("z_score", c.z_score);
      rep.Field("pass", BoolText(c.pass), c.pass);
      rep.Field("low_power", BoolText(c.low_power), c.low_power);
      rep.Print(out);
      return c.pass ? kExitOk : kExitCheckFailed;
    }

    if (*serve) {
      SessionService service;
      httplib::Server server;
      RegisterRoutes(server, service);
      g_server = &server;
      std::signal(SIGINT, StopServer);
      std::signal(SIGTERM, StopServer);
      if (banner) fmt::print(out, "qmonty {}\n", kVersion);
      fmt::print(out, "serving on http://{}:{}\n", host, port);
      out.flush();
      const bool ok = server.listen(host, port);
      g_server = nullptr;
      if (!persist_path.empty()) {
        std::ofstream file(persist_path);
        file << service.Snapshot().dump(2) << '\n';
      }
      if (!ok) {
        err << "error: could not listen on " << host << ":" << port << "\n";
        return kExitCheckFailed;
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace qmonty::cli
