#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ebcred/credible.hpp"
#include "ebcred/diagnostics.hpp"
#include "ebcred/sequence_model.hpp"
#include "ebcred/truths.hpp"

namespace ebcred {

enum class Mode { coverage, figures, diagnose, prior_check, minimax };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

/// Named truth constructor plus its parameters.
struct TruthChoice {
  /// selfsim | bad | bad-convention | zero | power | counterexample | csv
  std::string name = "selfsim";
  double amplitude = 1.0;  // power
  double exponent = 1.5;   // power
  double beta = 1.0;       // counterexample
  double M = 1.0;          // counterexample
  std::vector<double> rho;
  std::vector<double> n_seq;
  std::string path;        // csv

  bool operator==(const TruthChoice&) const = default;
};

/// Model fields shared by every n of an experiment.
struct ModelSpec {
  std::string kappa = "volterra";  // volterra | power_law
  double p = 1.0;
  double C = 1.0;
  double A = 5.0;
  double gamma = 0.05;
  Index trunc = 0;

  ModelConfig at(double n) const;
  bool operator==(const ModelSpec&) const = default;
};

struct ExperimentSpec {
  Mode mode = Mode::coverage;
  TruthChoice truth;
  ModelSpec model;
  std::vector<double> n_list{1e6};
  double L = 1.0;
  int reps = 200;
  Seed seed = 1;
  std::string out;       // output directory; empty writes nothing
  unsigned threads = 0;  // 0: one per hardware thread

  // figures
  Index draws = 2000;
  double keep = 0.95;
  Index grid_points = 201;
  // prior-check
  std::vector<double> prior_alphas{1.0};
  Index prior_T = 16384;
  Index max_N0 = 64;
  // diagnose / minimax
  double beta = 1.0;
  double M = 1.0;
  std::vector<double> M_list{1.0};
  int scan_points = 2001;

  void validate() const;
  bool operator==(const ExperimentSpec&) const = default;
};

/// Builds the truth with T stored coefficients.
TruthSequence make_truth(const TruthChoice& choice, Index T);

struct ReplicationRecord {
  int rep = 0;
  double alpha_hat = 0.0;
  double radius = 0.0;
  double distance = 0.0;
  bool covered = false;

  bool operator==(const ReplicationRecord&) const = default;
};

struct CoverageResult {
  double n = 0.0;
  double coverage = 0.0;
  int covered = 0;
  double mean_radius = 0.0;     // over replications with finite radius
  int infinite_radius = 0;      // replications with alpha_hat = 0
  double mean_alpha_hat = 0.0;
  int reps = 0;
  double ci_halfwidth = 0.0;    // 1.96 sqrt(c (1 - c) / reps)

  bool operator==(const CoverageResult&) const = default;
};

/// Aggregate of replication records; order-independent.
CoverageResult summarize_coverage(double n, std::vector<ReplicationRecord> records);

/// `reps` replications of synthesize -> alpha_hat -> ball -> contains at one
/// model. Replication r uses noise substream (seed, (slot, r)).
std::vector<ReplicationRecord> coverage_replications(const TruthSequence& truth, const SequenceModel& model,
                                                     double L, int reps, Seed seed, std::uint64_t slot,
                                                     unsigned threads);

std::vector<CoverageResult> run_coverage(const ExperimentSpec& spec);

/// One band per n; written as CSV files when spec.out is set.
std::vector<BandSummary> run_figures(const ExperimentSpec& spec);

struct DiagnoseResult {
  double n = 0.0;
  DiagnosticsReport report;
  int reps = 0;
  /// Fraction of replications with alpha_lower <= alpha_hat <= alpha_upper (reps > 1 only).
  double capture_frequency = 0.0;
  std::vector<double> alpha_hats;

  bool operator==(const DiagnoseResult&) const = default;
};

std::vector<DiagnoseResult> run_diagnose(const ExperimentSpec& spec);

struct PriorCheckResult {
  double alpha = 0.0;
  double L0 = 0.0;
  int reps = 0;
  int passed = 0;
  double pass_fraction = 0.0;
  /// count of draws whose smallest passing N0 is 2, 4, ..., max_N0
  std::vector<int> min_N0_histogram;

  bool operator==(const PriorCheckResult&) const = default;
};

/// Smallest even N0 <= max_N0 for which the draw is polished-tail with the given
/// L0 and rho = 2, or 0 when there is none.
Index smallest_passing_N0(const TruthSequence& theta, double L0, Index max_N0);

std::vector<PriorCheckResult> run_prior_check(const ExperimentSpec& spec);

struct MinimaxRow {
  double n = 0.0;
  double M = 0.0;
  double risk = 0.0;
  double tail_bound = 0.0;
  /// M^{(1+2p)/(1+2b+2p)} n^{-2b/(1+2b+2p)}
  double rate = 0.0;

  bool operator==(const MinimaxRow&) const = default;
};

std::vector<MinimaxRow> run_minimax(const ExperimentSpec& spec);

/// Dispatches on spec.mode and writes spec.json, per-n files and summary.json
/// into spec.out.
void run_experiment(const ExperimentSpec& spec);

}  // namespace ebcred
