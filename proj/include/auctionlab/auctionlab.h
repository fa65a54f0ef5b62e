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

/* C interface to the auctionlab library.
 *
 * Every function returns an al_status. On failure a thread-local message is
 * available from al_last_error() until the next failing call on the same
 * thread. Objects are opaque handles released with their *_free function;
 * strings returned by accessors are owned by the handle and stay valid until
 * the handle is freed or the accessor is called again on it. */
#ifndef AUCTIONLAB_AUCTIONLAB_H_
#define AUCTIONLAB_AUCTIONLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(AUCTIONLAB_BUILDING_LIBRARY)
#define AL_API __declspec(dllexport)
#else
#define AL_API __declspec(dllimport)
#endif
#else
#define AL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes of the command-line tool. */
typedef enum al_status {
  AL_OK = 0,
  AL_ERR_INPUT = 2,
  AL_ERR_SOLVER = 3,
  AL_ERR_SIZE = 4,
  AL_ERR_IDENTIFICATION = 5,
  AL_ERR_DOMAIN = 6,
  AL_ERR_UNDEFINED = 7,
  AL_ERR_DEGENERATE = 8,
  AL_ERR_INTERNAL = 9
} al_status;

AL_API const char* al_last_error(void);
AL_API const char* al_version(void);

/* ---- equilibrium ------------------------------------------------------- */

typedef struct al_bidfn al_bidfn;

typedef struct al_solver_options {
  size_t grid_size; /* 1001 */
  double tolerance; /* 1e-8 */
  double damping;   /* 0.5 */
  size_t max_sweeps; /* 10000 */
} al_solver_options;

AL_API void al_solver_options_init(al_solver_options* opts);

/* treatment: "fp", "csp" or "ncsp"; gamma is used by "ncsp" only. Two
 * bidders with values uniform on [0, 100]. opts may be NULL. */
AL_API al_status al_bidfn_solve(const char* treatment, double gamma, const al_solver_options* opts,
                                al_bidfn** out);
AL_API void al_bidfn_free(al_bidfn* f);
AL_API size_t al_bidfn_size(const al_bidfn* f);
AL_API al_status al_bidfn_point(const al_bidfn* f, size_t i, double* theta, double* bid);
AL_API al_status al_bidfn_eval(const al_bidfn* f, double theta, double* bid);
AL_API al_status al_bidfn_solver_info(const al_bidfn* f, double* residual, size_t* sweeps);

typedef struct al_nesting {
  int holds;
  double worst_violation;
  size_t checked_points;
} al_nesting;

AL_API al_status al_bidfn_check_nesting(const al_bidfn* f, al_nesting* out);

/* rule: "first", "second" or "overcharge" (which uses gamma). */
AL_API al_status al_bidfn_expected_revenue(const al_bidfn* f, const char* rule, double gamma,
                                           double* out);
AL_API al_status al_bidfn_write_csv(const al_bidfn* f, const char* path);

/* Seller's optimal choice for two bids: winner index (0 or 1) and price. */
AL_API al_status al_seller_best_response(double bid1, double bid2, double gamma, int* winner,
                                         double* price);

/* ---- simulation -------------------------------------------------------- */

typedef struct al_simconfig al_simconfig;
typedef struct al_dataset al_dataset;

/* Parses the flat "key = value" configuration text. */
AL_API al_status al_simconfig_parse(const char* text, al_simconfig** out);
AL_API void al_simconfig_free(al_simconfig* cfg);
AL_API al_status al_simconfig_set_seed(al_simconfig* cfg, uint64_t seed);
AL_API al_status al_simconfig_set_rounds(al_simconfig* cfg, int rounds);
AL_API uint64_t al_simconfig_seed(const al_simconfig* cfg);

AL_API al_status al_simulate(const al_simconfig* cfg, al_dataset** out);

/* Reads a bids or rounds CSV file; the schema is detected from the header. */
AL_API al_status al_dataset_load(const char* path, al_dataset** out);
AL_API void al_dataset_free(al_dataset* d);
AL_API size_t al_dataset_num_rounds(const al_dataset* d);
AL_API size_t al_dataset_num_bids(const al_dataset* d);
/* Number of schema violations; messages joined by newlines in *report. */
AL_API al_status al_dataset_validate(al_dataset* d, size_t* n_violations, const char** report);
AL_API al_status al_dataset_write_rounds(const al_dataset* d, const char* path);
AL_API al_status al_dataset_write_bids(const al_dataset* d, const char* path);

typedef struct al_sim_summary {
  size_t n_rounds;
  double efficiency;
  double revenue_mean;
  double revenue_std_error;
  size_t ncsp_rounds;
  size_t overcharge_defined_rounds;
  double overcharge_mean_ratio;
  double overcharge_share;
} al_sim_summary;

AL_API al_status al_dataset_summary(const al_dataset* d, al_sim_summary* out);

/* ---- revealed preference ----------------------------------------------- */

typedef struct al_rp_options {
  const char* treatment;    /* "fp", "ncsp" or "all" */
  const char* belief;       /* "equilibrium" or "population" */
  int gamma_auto;           /* estimate gamma by tobit when nonzero */
  double gamma;             /* used when gamma_auto == 0 */
  int learning;             /* also compute the learning-weighted HMI */
  double power_p;           /* extra reported level, default 0.10 */
  size_t power_subjects;    /* synthetic subjects per calibration, 1000 */
  uint64_t seed;            /* calibration seed, 1 */
  int corrected_supergradient; /* FP test variant */
  int reversed_ncsp_signs;      /* NCSP test variant */
} al_rp_options;

typedef struct al_rp_report al_rp_report;

AL_API void al_rp_options_init(al_rp_options* opts);
AL_API al_status al_rp_run(const al_dataset* d, const al_rp_options* opts, al_rp_report** out);
AL_API void al_rp_report_free(al_rp_report* r);
AL_API size_t al_rp_report_num_subjects(const al_rp_report* r);
AL_API al_status al_rp_report_subject(const al_rp_report* r, size_t i, const char** subject_id,
                                      const char** treatment, double* hmi, int* pass_exact);
/* *has_gamma is 0 when no NCSP subjects were tested. */
AL_API al_status al_rp_report_gamma(const al_rp_report* r, int* has_gamma, double* gamma,
                                    int* estimated);
AL_API const char* al_rp_report_summary(al_rp_report* r);
AL_API al_status al_rp_report_write_csv(const al_rp_report* r, const char* path);

/* ---- estimation -------------------------------------------------------- */

typedef struct al_gamma_estimate {
  double gamma;
  double sigma;
  double loglik;
  size_t n_obs;
  size_t n_uncensored;
  size_t n_lower;
  size_t n_upper;
} al_gamma_estimate;

/* Tobit estimate from the NCSP rounds of a round-level dataset. */
AL_API al_status al_estimate_gamma(const al_dataset* d, al_gamma_estimate* out);
AL_API al_status al_gamma_estimate_write_csv(const al_gamma_estimate* g, const char* path);

typedef struct al_regression al_regression;

/* Bid on value interacted with treatment, through the origin, clustered by
 * subject. */
AL_API al_status al_estimate_bidfn(const al_dataset* d, al_regression** out);
AL_API void al_regression_free(al_regression* r);
AL_API size_t al_regression_num_terms(const al_regression* r);
AL_API al_status al_regression_term(const al_regression* r, size_t i, const char** name,
                                    double* coefficient, double* std_error);
AL_API const char* al_regression_summary(al_regression* r);
AL_API al_status al_regression_write_csv(const al_regression* r, const char* path);

typedef struct al_seller_table al_seller_table;

AL_API al_status al_classify_sellers(const al_dataset* d, al_seller_table** out);
AL_API void al_seller_table_free(al_seller_table* t);
AL_API size_t al_seller_table_num_rows(const al_seller_table* t);
AL_API al_status al_seller_table_row(const al_seller_table* t, size_t i, const char** seller_id,
                                     double* coefficient, const char** type);
AL_API const char* al_seller_table_summary(al_seller_table* t);
AL_API al_status al_seller_table_write_csv(const al_seller_table* t, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* AUCTIONLAB_AUCTIONLAB_H_ */
