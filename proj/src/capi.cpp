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

#include "auctionlab/auctionlab.h"

#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "auctionlab/csv_io.hpp"
#include "auctionlab/equilibrium.hpp"
#include "auctionlab/errors.hpp"
#include "auctionlab/estimate.hpp"
#include "auctionlab/pipeline.hpp"
#include "auctionlab/simulate.hpp"

struct al_bidfn {
  auctionlab::BidFunction fn;
};

struct al_simconfig {
  auctionlab::SimConfig cfg;
};

struct al_dataset {
  auctionlab::Dataset data;
  std::string report;
};

struct al_rp_report {
  auctionlab::RpReport report;
  std::string summary;
};

struct al_regression {
  auctionlab::RegressionResult result;
  std::string summary;
};

struct al_seller_table {
  auctionlab::SellerTypeTable table;
  std::vector<std::string> ids;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

using auctionlab::format_fixed;

template <typename F>
al_status guarded(F&& f) {
  try {
    f();
    return AL_OK;
  } catch (const auctionlab::Error& e) {
    g_last_error = e.what();
    return static_cast<al_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return AL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return AL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return AL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw auctionlab::InputError(std::string(what) + " must not be NULL");
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

extern "C" {

const char* al_last_error(void) { return g_last_error.c_str(); }

const char* al_version(void) { return AUCTIONLAB_VERSION; }

void al_solver_options_init(al_solver_options* opts) {
  if (opts == nullptr) return;
  const auctionlab::NcspSolverOptions d;
  opts->grid_size = d.grid_size;
  opts->tolerance = d.tolerance;
  opts->damping = d.damping;
  opts->max_sweeps = d.max_sweeps;
}

al_status al_bidfn_solve(const char* treatment, double gamma, const al_solver_options* opts,
                         al_bidfn** out) {
  return guarded([&] {
    require(treatment, "treatment");
    require(out, "out");
    *out = nullptr;
    const auctionlab::ValueDistribution F(0, 100);
    auctionlab::NcspSolverOptions o;
    if (opts != nullptr) {
      o.grid_size = opts->grid_size;
      o.tolerance = opts->tolerance;
      o.damping = opts->damping;
      o.max_sweeps = opts->max_sweeps;
    }
    if (o.grid_size < 2) throw auctionlab::InputError("grid size must be at least 2");
    if (!(o.tolerance > 0.0)) throw auctionlab::InputError("tolerance must be positive");
    auto f = std::make_unique<al_bidfn>();
    switch (auctionlab::parse_treatment(treatment)) {
      case auctionlab::Treatment::kFP: f->fn = auctionlab::tabulate_fp(F, 2, o.grid_size); break;
      case auctionlab::Treatment::kCSP: f->fn = auctionlab::tabulate_csp(F, o.grid_size); break;
      case auctionlab::Treatment::kNCSP: {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw auctionlab::DomainError("gamma must be positive");
        f->fn = auctionlab::solve_ncsp_equilibrium(F, 2, gamma, o);
        break;
      }
    }
    *out = f.release();
  });
}

void al_bidfn_free(al_bidfn* f) { delete f; }

size_t al_bidfn_size(const al_bidfn* f) { return f == nullptr ? 0 : f->fn.size(); }

al_status al_bidfn_point(const al_bidfn* f, size_t i, double* theta, double* bid) {
  return guarded([&] {
    require(f, "bid function");
    if (i >= f->fn.size()) throw auctionlab::InputError("grid index out of range");
    if (theta != nullptr) *theta = f->fn.grid()[i];
    if (bid != nullptr) *bid = f->fn.bids()[i];
  });
}

al_status al_bidfn_eval(const al_bidfn* f, double theta, double* bid) {
  return guarded([&] {
    require(f, "bid function");
    require(bid, "bid");
    *bid = f->fn(theta);
  });
}

al_status al_bidfn_solver_info(const al_bidfn* f, double* residual, size_t* sweeps) {
  return guarded([&] {
    require(f, "bid function");
    if (residual != nullptr) *residual = f->fn.residual();
    if (sweeps != nullptr) *sweeps = f->fn.sweeps();
  });
}

al_status al_bidfn_check_nesting(const al_bidfn* f, al_nesting* out) {
  return guarded([&] {
    require(f, "bid function");
    require(out, "out");
    const auto r = auctionlab::check_nesting(f->fn, auctionlab::ValueDistribution(0, 100), 2);
    out->holds = r.holds ? 1 : 0;
    out->worst_violation = r.worst_violation;
    out->checked_points = r.checked_points;
  });
}

al_status al_bidfn_expected_revenue(const al_bidfn* f, const char* rule, double gamma, double* out) {
  return guarded([&] {
    require(f, "bid function");
    require(rule, "rule");
    require(out, "out");
    const std::string r(rule);
    auctionlab::PricingRule pr;
    if (r == "first") {
      pr = auctionlab::PricingRule::first_price();
    } else if (r == "second") {
      pr = auctionlab::PricingRule::second_price();
    } else if (r == "overcharge") {
      pr = auctionlab::PricingRule::overcharge(gamma);
    } else {
      throw auctionlab::InputError("unknown pricing rule '" + r + "'");
    }
    *out = auctionlab::expected_revenue(f->fn, auctionlab::ValueDistribution(0, 100), 2, pr);
  });
}

al_status al_bidfn_write_csv(const al_bidfn* f, const char* path) {
  return guarded([&] {
    require(f, "bid function");
    require(path, "path");
    auctionlab::write_file_atomic(path, auctionlab::bid_function_csv(f->fn));
  });
}

al_status al_seller_best_response(double bid1, double bid2, double gamma, int* winner, double* price) {
  return guarded([&] {
    const double bids[2] = {bid1, bid2};
    const auto d = auctionlab::seller_best_response(bids, auctionlab::SellerParams{gamma});
    if (winner != nullptr) *winner = static_cast<int>(d.winner_index);
    if (price != nullptr) *price = d.price;
  });
}

al_status al_simconfig_parse(const char* text, al_simconfig** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    auto c = std::make_unique<al_simconfig>();
    c->cfg = auctionlab::parse_sim_config(text);
    *out = c.release();
  });
}

void al_simconfig_free(al_simconfig* cfg) { delete cfg; }

al_status al_simconfig_set_seed(al_simconfig* cfg, uint64_t seed) {
  return guarded([&] {
    require(cfg, "config");
    cfg->cfg.seed = seed;
  });
}

al_status al_simconfig_set_rounds(al_simconfig* cfg, int rounds) {
  return guarded([&] {
    require(cfg, "config");
    if (rounds < 1) throw auctionlab::InputError("rounds must be positive");
    cfg->cfg.n_rounds = rounds;
  });
}

uint64_t al_simconfig_seed(const al_simconfig* cfg) { return cfg == nullptr ? 0 : cfg->cfg.seed; }

al_status al_simulate(const al_simconfig* cfg, al_dataset** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = nullptr;
    auto d = std::make_unique<al_dataset>();
    d->data = auctionlab::run_session(cfg->cfg);
    *out = d.release();
  });
}

al_status al_dataset_load(const char* path, al_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto d = std::make_unique<al_dataset>();
    d->data = auctionlab::read_dataset(path);
    *out = d.release();
  });
}

void al_dataset_free(al_dataset* d) { delete d; }

size_t al_dataset_num_rounds(const al_dataset* d) { return d == nullptr ? 0 : d->data.rounds.size(); }

size_t al_dataset_num_bids(const al_dataset* d) { return d == nullptr ? 0 : d->data.bids.size(); }

al_status al_dataset_validate(al_dataset* d, size_t* n_violations, const char** report) {
  return guarded([&] {
    require(d, "dataset");
    const auto v = auctionlab::validate_dataset(d->data);
    d->report.clear();
    for (const auto& x : v) d->report += x.message + "\n";
    if (n_violations != nullptr) *n_violations = v.size();
    if (report != nullptr) *report = d->report.c_str();
  });
}

al_status al_dataset_write_rounds(const al_dataset* d, const char* path) {
  return guarded([&] {
    require(d, "dataset");
    require(path, "path");
    if (!d->data.has_rounds()) throw auctionlab::InputError("dataset has no round records");
    auctionlab::write_file_atomic(path, auctionlab::rounds_csv(d->data));
  });
}

al_status al_dataset_write_bids(const al_dataset* d, const char* path) {
  return guarded([&] {
    require(d, "dataset");
    require(path, "path");
    auctionlab::write_file_atomic(path, auctionlab::bids_csv(d->data));
  });
}

al_status al_dataset_summary(const al_dataset* d, al_sim_summary* out) {
  return guarded([&] {
    require(d, "dataset");
    require(out, "out");
    const auto rev = auctionlab::revenue_stats(d->data);
    const auto oc = auctionlab::overcharge_stats(d->data);
    out->n_rounds = d->data.rounds.size();
    out->efficiency = auctionlab::efficiency(d->data);
    out->revenue_mean = rev.mean;
    out->revenue_std_error = rev.std_error;
    out->ncsp_rounds = oc.ncsp_rounds;
    out->overcharge_defined_rounds = oc.defined_rounds;
    out->overcharge_mean_ratio = oc.mean_ratio;
    out->overcharge_share = oc.share_overcharging;
  });
}

void al_rp_options_init(al_rp_options* opts) {
  if (opts == nullptr) return;
  opts->treatment = "all";
  opts->belief = "equilibrium";
  opts->gamma_auto = 1;
  opts->gamma = 0.0;
  opts->learning = 0;
  opts->power_p = 0.10;
  opts->power_subjects = 1000;
  opts->seed = 1;
  opts->corrected_supergradient = 0;
  opts->reversed_ncsp_signs = 0;
}

al_status al_rp_run(const al_dataset* d, const al_rp_options* opts, al_rp_report** out) {
  return guarded([&] {
    require(d, "dataset");
    require(out, "out");
    *out = nullptr;
    al_rp_options o;
    al_rp_options_init(&o);
    if (opts != nullptr) o = *opts;
    auctionlab::RpOptions ro;
    const std::string t = o.treatment == nullptr ? "all" : o.treatment;
    if (t != "all") ro.treatments = {auctionlab::parse_treatment(t)};
    ro.belief = auctionlab::parse_belief(o.belief == nullptr ? "equilibrium" : o.belief);
    if (!o.gamma_auto) ro.gamma = o.gamma;
    ro.learning = o.learning != 0;
    ro.power_p = o.power_p;
    ro.power_subjects = o.power_subjects;
    ro.seed = o.seed;
    ro.supergradient =
        o.corrected_supergradient ? auctionlab::Supergradient::kCorrected : auctionlab::Supergradient::kDirect;
    ro.ncsp_signs = o.reversed_ncsp_signs ? auctionlab::NcspSigns::kReversed : auctionlab::NcspSigns::kSupergradient;
    auto r = std::make_unique<al_rp_report>();
    r->report = auctionlab::run_rp_test(d->data, ro);
    *out = r.release();
  });
}

void al_rp_report_free(al_rp_report* r) { delete r; }

size_t al_rp_report_num_subjects(const al_rp_report* r) { return r == nullptr ? 0 : r->report.rows.size(); }

al_status al_rp_report_subject(const al_rp_report* r, size_t i, const char** subject_id, const char** treatment,
                               double* hmi, int* pass_exact) {
  return guarded([&] {
    require(r, "report");
    if (i >= r->report.rows.size()) throw auctionlab::InputError("subject index out of range");
    const auto& row = r->report.rows[i];
    if (subject_id != nullptr) *subject_id = row.subject_id.c_str();
    if (treatment != nullptr) *treatment = auctionlab::to_string(row.treatment).data();
    if (hmi != nullptr) *hmi = row.result.hmi;
    if (pass_exact != nullptr) *pass_exact = row.pass_exact ? 1 : 0;
  });
}

al_status al_rp_report_gamma(const al_rp_report* r, int* has_gamma, double* gamma, int* estimated) {
  return guarded([&] {
    require(r, "report");
    if (has_gamma != nullptr) *has_gamma = r->report.gamma ? 1 : 0;
    if (gamma != nullptr) *gamma = r->report.gamma.value_or(0.0);
    if (estimated != nullptr) *estimated = r->report.gamma_estimated ? 1 : 0;
  });
}

const char* al_rp_report_summary(al_rp_report* r) {
  if (r == nullptr) return "";
  r->summary = r->report.summary();
  return r->summary.c_str();
}

al_status al_rp_report_write_csv(const al_rp_report* r, const char* path) {
  return guarded([&] {
    require(r, "report");
    require(path, "path");
    auctionlab::write_file_atomic(path, r->report.csv());
  });
}

al_status al_estimate_gamma(const al_dataset* d, al_gamma_estimate* out) {
  return guarded([&] {
    require(d, "dataset");
    require(out, "out");
    if (!d->data.has_rounds()) throw auctionlab::InputError("gamma estimation requires round-level data");
    const auto r = auctionlab::estimate_gamma(auctionlab::censored_sample(d->data));
    out->gamma = r.gamma;
    out->sigma = r.sigma;
    out->loglik = r.loglik;
    out->n_obs = r.n_obs;
    out->n_uncensored = r.n_uncensored;
    out->n_lower = r.n_lower;
    out->n_upper = r.n_upper;
  });
}

al_status al_gamma_estimate_write_csv(const al_gamma_estimate* g, const char* path) {
  return guarded([&] {
    require(g, "estimate");
    require(path, "path");
    using auctionlab::format_number;
    const std::string csv = "gamma,sigma,loglik,n_obs,n_uncensored,n_lower,n_upper\n" + format_number(g->gamma) +
                            ',' + format_number(g->sigma) + ',' + format_number(g->loglik) + ',' +
                            std::to_string(g->n_obs) + ',' + std::to_string(g->n_uncensored) + ',' +
                            std::to_string(g->n_lower) + ',' + std::to_string(g->n_upper) + '\n';
    auctionlab::write_file_atomic(path, csv);
  });
}

al_status al_estimate_bidfn(const al_dataset* d, al_regression** out) {
  return guarded([&] {
    require(d, "dataset");
    require(out, "out");
    *out = nullptr;
    auto r = std::make_unique<al_regression>();
    r->result = auctionlab::ols_origin(auctionlab::bid_value_design(d->data.bids));
    *out = r.release();
  });
}

void al_regression_free(al_regression* r) { delete r; }

size_t al_regression_num_terms(const al_regression* r) { return r == nullptr ? 0 : r->result.names.size(); }

al_status al_regression_term(const al_regression* r, size_t i, const char** name, double* coefficient,
                             double* std_error) {
  return guarded([&] {
    require(r, "regression");
    if (i >= r->result.names.size()) throw auctionlab::InputError("term index out of range");
    if (name != nullptr) *name = r->result.names[i].c_str();
    if (coefficient != nullptr) *coefficient = r->result.coefficients[i];
    if (std_error != nullptr) *std_error = r->result.std_errors[i];
  });
}

const char* al_regression_summary(al_regression* r) {
  if (r == nullptr) return "";
  const auto& res = r->result;
  std::string s = "Bidding function through the origin (clustered by subject)\n";
  s += pad("term", 16) + pad("coefficient", 14) + "std_error\n";
  for (std::size_t j = 0; j < res.names.size(); ++j) {
    s += pad(res.names[j], 16) + pad(format_fixed(res.coefficients[j], 3), 14) +
         format_fixed(res.std_errors[j], 3) + "\n";
  }
  s += "observations " + std::to_string(res.n_obs) + ", clusters " + std::to_string(res.n_clusters) + "\n";
  r->summary = std::move(s);
  return r->summary.c_str();
}

al_status al_regression_write_csv(const al_regression* r, const char* path) {
  return guarded([&] {
    require(r, "regression");
    require(path, "path");
    auctionlab::write_file_atomic(path, auctionlab::regression_csv(r->result));
  });
}

al_status al_classify_sellers(const al_dataset* d, al_seller_table** out) {
  return guarded([&] {
    require(d, "dataset");
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<al_seller_table>();
    t->table = auctionlab::classify_sellers(d->data);
    if (t->table.rows.empty()) throw auctionlab::InputError("no NCSP seller with a defined overcharging ratio");
    for (const auto& row : t->table.rows) t->ids.push_back(row.session_id + "/" + row.seller_id);
    *out = t.release();
  });
}

void al_seller_table_free(al_seller_table* t) { delete t; }

size_t al_seller_table_num_rows(const al_seller_table* t) { return t == nullptr ? 0 : t->table.rows.size(); }

al_status al_seller_table_row(const al_seller_table* t, size_t i, const char** seller_id, double* coefficient,
                              const char** type) {
  return guarded([&] {
    require(t, "seller table");
    if (i >= t->table.rows.size()) throw auctionlab::InputError("row index out of range");
    if (seller_id != nullptr) *seller_id = t->ids[i].c_str();
    if (coefficient != nullptr) *coefficient = t->table.rows[i].coefficient;
    if (type != nullptr) *type = auctionlab::to_string(t->table.rows[i].type).data();
  });
}

const char* al_seller_table_summary(al_seller_table* t) {
  if (t == nullptr) return "";
  using auctionlab::SellerType;
  const auto& tab = t->table;
  const std::size_t n = tab.rows.size();
  std::string s = "Seller types (NCSP)\n";
  s += pad("type", 12) + pad("sellers", 10) + pad("share", 10) + "mean coefficient\n";
  for (SellerType type : {SellerType::kNever, SellerType::kSometimes, SellerType::kAlways}) {
    std::size_t count = 0;
    double sum = 0.0;
    for (const auto& row : tab.rows) {
      if (row.type == type) {
        ++count;
        sum += row.coefficient;
      }
    }
    s += pad(std::string(auctionlab::to_string(type)), 12) + pad(std::to_string(count), 10) +
         pad(format_fixed(100.0 * static_cast<double>(count) / static_cast<double>(n), 1) + "%", 10) +
         (count > 0 ? format_fixed(sum / static_cast<double>(count), 2) : std::string("-")) + "\n";
  }
  if (!tab.excluded.empty()) {
    s += "excluded (no defined ratio):";
    for (const auto& id : tab.excluded) s += " " + id;
    s += "\n";
  }
  t->summary = std::move(s);
  return t->summary.c_str();
}

al_status al_seller_table_write_csv(const al_seller_table* t, const char* path) {
  return guarded([&] {
    require(t, "seller table");
    require(path, "path");
    auctionlab::write_file_atomic(path, auctionlab::seller_table_csv(t->table));
  });
}

}  // extern "C"
