// Copyright 2026 The AuctionLab Authors
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

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "auctionlab/auctionlab.h"
#include "manifest.hpp"

namespace {

using auctionlab_cli::fnv1a64;
using auctionlab_cli::RunManifest;

constexpr int kExitInput = AL_ERR_INPUT;

class Failure {
 public:
  explicit Failure(int code) : code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

// Prints the library message and unwinds with its status as exit code.
void check(al_status s, const char* context) {
  if (s == AL_OK) return;
  std::fprintf(stderr, "auctionlab: %s: %s\n", context, al_last_error());
  throw Failure(static_cast<int>(s));
}

[[noreturn]] void input_error(const std::string& msg) {
  std::fprintf(stderr, "auctionlab: %s\n", msg.c_str());
  throw Failure(kExitInput);
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) input_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::string& path, RunManifest m) {
  if (path.empty()) return;
  m.version = al_version();
  try {
    m.save(path);
  } catch (const std::exception& e) {
    input_error(std::string("manifest: ") + e.what());
  }
}

template <typename Handle, void (*Free)(Handle*)>
struct Owned {
  Handle* p = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(p); }
};

// ---- equilibrium ----------------------------------------------------------

struct EquilibriumArgs {
  std::string treatment;
  double gamma = 10.0;
  std::size_t grid = 1001;
  double tol = 1e-8;
  std::size_t max_sweeps = 10000;
  std::string out;
  bool revenue = false;
  std::string manifest;
};

int cmd_equilibrium(const EquilibriumArgs& a) {
  al_solver_options opts;
  al_solver_options_init(&opts);
  opts.grid_size = a.grid;
  opts.tolerance = a.tol;
  opts.max_sweeps = a.max_sweeps;
  Owned<al_bidfn, al_bidfn_free> f;
  check(al_bidfn_solve(a.treatment.c_str(), a.gamma, &opts, &f.p), "equilibrium");
  check(al_bidfn_write_csv(f.p, a.out.c_str()), "writing bid function");

  const bool ncsp = a.treatment == "ncsp" || a.treatment == "NCSP";
  std::printf("treatment: %s\n", a.treatment.c_str());
  if (ncsp) std::printf("gamma: %s\n", fixed(a.gamma, 4).c_str());
  std::printf("grid points: %zu\n", al_bidfn_size(f.p));
  if (ncsp) {
    double residual = 0.0;
    std::size_t sweeps = 0;
    check(al_bidfn_solver_info(f.p, &residual, &sweeps), "solver info");
    std::printf("sweeps: %zu\nfixed-point residual: %.3e\n", sweeps, residual);
    al_nesting nest;
    check(al_bidfn_check_nesting(f.p, &nest), "nesting check");
    std::printf("nesting fp(theta) <= b(theta) < theta: %s (%zu interior points, worst violation %.3e)\n",
                nest.holds ? "verified" : "violated", nest.checked_points, nest.worst_violation);
  }
  if (a.revenue) {
    const char* rule = ncsp ? "overcharge" : (a.treatment == "csp" || a.treatment == "CSP" ? "second" : "first");
    double rev = 0.0;
    check(al_bidfn_expected_revenue(f.p, rule, a.gamma, &rev), "expected revenue");
    std::printf("expected revenue: %s\n", fixed(rev, 4).c_str());
  }
  std::printf("wrote %s\n", a.out.c_str());

  RunManifest m;
  m.command = "equilibrium";
  const std::string canon = "treatment=" + a.treatment + "\ngamma=" + fixed(a.gamma, 12) +
                            "\ngrid=" + std::to_string(a.grid) + "\ntol=" + fixed(a.tol, 15) +
                            "\nmax_sweeps=" + std::to_string(a.max_sweeps) + "\n";
  m.config_hash = hash_hex(fnv1a64(canon));
  m.outputs = {a.out};
  write_manifest(a.manifest, m);
  return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> rounds;
  std::string out;
  std::string bids_out;
  std::string manifest;
};

int cmd_simulate(const SimulateArgs& a) {
  const std::string text = read_text(a.config);
  Owned<al_simconfig, al_simconfig_free> cfg;
  check(al_simconfig_parse(text.c_str(), &cfg.p), a.config.c_str());
  if (a.seed) check(al_simconfig_set_seed(cfg.p, *a.seed), "seed");
  if (a.rounds) check(al_simconfig_set_rounds(cfg.p, *a.rounds), "rounds");
  Owned<al_dataset, al_dataset_free> data;
  check(al_simulate(cfg.p, &data.p), "simulate");
  check(al_dataset_write_rounds(data.p, a.out.c_str()), "writing rounds");
  if (!a.bids_out.empty()) check(al_dataset_write_bids(data.p, a.bids_out.c_str()), "writing bids");

  al_sim_summary s;
  check(al_dataset_summary(data.p, &s), "summary");
  std::printf("rounds: %zu\n", s.n_rounds);
  std::printf("efficiency: %s\n", fixed(s.efficiency, 3).c_str());
  std::printf("mean revenue: %s (s.e. %s)\n", fixed(s.revenue_mean, 2).c_str(),
              fixed(s.revenue_std_error, 2).c_str());
  if (s.ncsp_rounds > 0) {
    std::printf("overcharging: %zu of %zu rounds with a defined ratio, mean ratio %s, share overcharging %s\n",
                s.overcharge_defined_rounds, s.ncsp_rounds, fixed(s.overcharge_mean_ratio, 3).c_str(),
                fixed(s.overcharge_share, 3).c_str());
  }
  std::printf("wrote %s\n", a.out.c_str());

  RunManifest m;
  m.command = "simulate";
  std::string canon = text + "\n--";
  if (a.rounds) canon += "rounds=" + std::to_string(*a.rounds);
  m.config_hash = hash_hex(fnv1a64(canon));
  m.seed = al_simconfig_seed(cfg.p);
  m.outputs = {a.out};
  if (!a.bids_out.empty()) m.outputs.push_back(a.bids_out);
  write_manifest(a.manifest, m);
  return 0;
}

// ---- test-rp --------------------------------------------------------------

struct TestRpArgs {
  std::string data;
  std::string treatment = "all";
  std::string belief = "equilibrium";
  std::string gamma = "auto";
  bool learning = false;
  double power = 0.10;
  std::size_t power_subjects = 1000;
  std::uint64_t seed = 1;
  std::string out;
  std::string manifest;
  bool corrected = false;
  bool reversed_signs = false;
};

int cmd_test_rp(const TestRpArgs& a) {
  Owned<al_dataset, al_dataset_free> data;
  check(al_dataset_load(a.data.c_str(), &data.p), a.data.c_str());
  std::size_t n_viol = 0;
  const char* report = nullptr;
  check(al_dataset_validate(data.p, &n_viol, &report), "validation");
  if (n_viol > 0) {
    std::fprintf(stderr, "auctionlab: %s: %zu schema violation(s)\n%s", a.data.c_str(), n_viol, report);
    return kExitInput;
  }

  al_rp_options o;
  al_rp_options_init(&o);
  o.treatment = a.treatment.c_str();
  o.belief = a.belief.c_str();
  o.learning = a.learning ? 1 : 0;
  o.power_p = a.power;
  o.power_subjects = a.power_subjects;
  o.seed = a.seed;
  o.corrected_supergradient = a.corrected ? 1 : 0;
  o.reversed_ncsp_signs = a.reversed_signs ? 1 : 0;
  RunManifest prior = a.manifest.empty() ? RunManifest{} : RunManifest::load_or_empty(a.manifest);
  if (a.gamma == "auto") {
    if (prior.gamma_hat) {
      o.gamma_auto = 0;
      o.gamma = *prior.gamma_hat;
    }
  } else {
    char* end = nullptr;
    const double g = std::strtod(a.gamma.c_str(), &end);
    if (end == a.gamma.c_str() || *end != '\0') input_error("--gamma expects 'auto' or a number");
    o.gamma_auto = 0;
    o.gamma = g;
  }

  Owned<al_rp_report, al_rp_report_free> rep;
  check(al_rp_run(data.p, &o, &rep.p), "test-rp");
  check(al_rp_report_write_csv(rep.p, a.out.c_str()), "writing report");
  std::fputs(al_rp_report_summary(rep.p), stdout);
  std::printf("wrote %s\n", a.out.c_str());

  RunManifest m;
  m.command = "test-rp";
  const std::string canon = read_text(a.data) + "\n--treatment=" + a.treatment + "\nbelief=" + a.belief +
                            "\ngamma=" + (o.gamma_auto ? std::string("auto") : fixed(o.gamma, 12)) +
                            "\nlearning=" + std::to_string(o.learning) + "\npower=" + fixed(a.power, 6) +
                            "\npower_subjects=" + std::to_string(a.power_subjects) +
                            "\ncorrected=" + std::to_string(o.corrected_supergradient) +
                            "\nreversed_signs=" + std::to_string(o.reversed_ncsp_signs) + "\n";
  m.config_hash = hash_hex(fnv1a64(canon));
  m.seed = a.seed;
  int has_gamma = 0;
  double gamma = 0.0;
  int estimated = 0;
  check(al_rp_report_gamma(rep.p, &has_gamma, &gamma, &estimated), "gamma");
  if (has_gamma) m.gamma_hat = gamma;
  m.outputs = {a.out};
  write_manifest(a.manifest, m);
  return 0;
}

// ---- estimate -------------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string what;
  std::string out;
  std::string manifest;
};

int cmd_estimate(const EstimateArgs& a) {
  Owned<al_dataset, al_dataset_free> data;
  check(al_dataset_load(a.data.c_str(), &data.p), a.data.c_str());
  std::optional<double> gamma_hat;
  if (a.what == "gamma") {
    al_gamma_estimate g;
    check(al_estimate_gamma(data.p, &g), "gamma");
    check(al_gamma_estimate_write_csv(&g, a.out.c_str()), "writing estimate");
    std::printf("gamma_hat: %s\n", fixed(g.gamma, 2).c_str());
    std::printf("sigma_hat: %s\n", fixed(g.sigma, 2).c_str());
    std::printf("rounds: %zu (uncensored %zu, at zero %zu, at the high bid %zu)\n", g.n_obs, g.n_uncensored,
                g.n_lower, g.n_upper);
    gamma_hat = g.gamma;
  } else if (a.what == "bidfn") {
    Owned<al_regression, al_regression_free> r;
    check(al_estimate_bidfn(data.p, &r.p), "bidding function");
    check(al_regression_write_csv(r.p, a.out.c_str()), "writing regression");
    std::fputs(al_regression_summary(r.p), stdout);
  } else if (a.what == "sellers") {
    Owned<al_seller_table, al_seller_table_free> t;
    check(al_classify_sellers(data.p, &t.p), "seller types");
    check(al_seller_table_write_csv(t.p, a.out.c_str()), "writing seller table");
    std::fputs(al_seller_table_summary(t.p), stdout);
  } else {
    input_error("--what expects gamma, bidfn or sellers");
  }
  std::printf("wrote %s\n", a.out.c_str());

  if (!a.manifest.empty()) {
    RunManifest m = RunManifest::load_or_empty(a.manifest);
    if (m.command.empty()) {
      m.command = "estimate";
      m.config_hash = hash_hex(fnv1a64(read_text(a.data) + "\n--what=" + a.what + "\n"));
    }
    if (gamma_hat) m.gamma_hat = gamma_hat;
    bool listed = false;
    for (const auto& o : m.outputs) listed = listed || o == a.out;
    if (!listed) m.outputs.push_back(a.out);
    write_manifest(a.manifest, m);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auction credibility toolkit: equilibria, simulation, revealed-preference tests, estimation"};
  app.set_version_flag("--version", std::string(al_version()));
  app.require_subcommand(1);

  EquilibriumArgs eq;
  auto* c_eq = app.add_subcommand("equilibrium", "Tabulate an equilibrium bidding function");
  c_eq->add_option("--treatment", eq.treatment, "fp, csp or ncsp")->required();
  c_eq->add_option("--gamma", eq.gamma, "seller rule-breaking tolerance (ncsp)")->capture_default_str();
  c_eq->add_option("--grid", eq.grid, "number of grid points")->capture_default_str();
  c_eq->add_option("--tol", eq.tol, "fixed-point tolerance")->capture_default_str();
  c_eq->add_option("--max-sweeps", eq.max_sweeps, "sweep limit of the ncsp solver")->capture_default_str();
  c_eq->add_option("--out", eq.out, "output CSV (theta,bid)")->required();
  c_eq->add_flag("--revenue", eq.revenue, "also print the expected revenue");
  c_eq->add_option("--manifest", eq.manifest, "write a run manifest");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate auction sessions");
  c_sim->add_option("--config", sim.config, "configuration file (key = value)")->required();
  c_sim->add_option("--seed", sim.seed, "master seed (overrides the config)");
  c_sim->add_option("--rounds", sim.rounds, "number of rounds (overrides the config)");
  c_sim->add_option("--out", sim.out, "output rounds CSV")->required();
  c_sim->add_option("--bids-out", sim.bids_out, "also write the bids CSV");
  c_sim->add_option("--manifest", sim.manifest, "write a run manifest");

  TestRpArgs rp;
  auto* c_rp = app.add_subcommand("test-rp", "Revealed-preference tests with power correction");
  c_rp->add_option("--data", rp.data, "bids or rounds CSV")->required();
  c_rp->add_option("--treatment", rp.treatment, "fp, ncsp or all")->capture_default_str();
  c_rp->add_option("--belief", rp.belief, "equilibrium or population")->capture_default_str();
  c_rp->add_option("--gamma", rp.gamma, "auto or a positive number")->capture_default_str();
  c_rp->add_flag("--learning", rp.learning, "also compute the learning-weighted HMI");
  c_rp->add_option("--power", rp.power, "additional significance level for the power correction")
      ->capture_default_str();
  c_rp->add_option("--power-subjects", rp.power_subjects, "synthetic random subjects per calibration")
      ->capture_default_str();
  c_rp->add_option("--seed", rp.seed, "calibration seed")->capture_default_str();
  c_rp->add_option("--out", rp.out, "per-subject CSV")->required();
  c_rp->add_option("--manifest", rp.manifest, "manifest to read gamma_hat from and rewrite");
  c_rp->add_flag("--corrected-supergradient", rp.corrected, "FP test with the bid-slope Jacobian");
  c_rp->add_flag("--reversed-ncsp-signs", rp.reversed_signs, "NCSP concavity rows with the reversed sign convention");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Estimate gamma, bidding functions or seller types");
  c_est->add_option("--data", est.data, "bids or rounds CSV")->required();
  c_est->add_option("--what", est.what, "gamma, bidfn or sellers")->required();
  c_est->add_option("--out", est.out, "output CSV")->required();
  c_est->add_option("--manifest", est.manifest, "manifest receiving gamma_hat");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*c_eq) return cmd_equilibrium(eq);
    if (*c_sim) return cmd_simulate(sim);
    if (*c_rp) return cmd_test_rp(rp);
    if (*c_est) return cmd_estimate(est);
  } catch (const Failure& f) {
    return f.code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "auctionlab: %s\n", e.what());
    return kExitInput;
  }
  return 0;
}
