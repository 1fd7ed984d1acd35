#include "ebcred/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "ebcred/errors.hpp"
#include "ebcred/io.hpp"
#include "ebcred/numeric.hpp"

namespace ebcred {

namespace fs = std::filesystem;

Mode parse_mode(const std::string& name) {
  if (name == "coverage") return Mode::coverage;
  if (name == "figures") return Mode::figures;
  if (name == "diagnose") return Mode::diagnose;
  if (name == "prior-check") return Mode::prior_check;
  if (name == "minimax") return Mode::minimax;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::coverage:
      return "coverage";
    case Mode::figures:
      return "figures";
    case Mode::diagnose:
      return "diagnose";
    case Mode::prior_check:
      return "prior-check";
    case Mode::minimax:
      return "minimax";
  }
  return "?";
}

ModelConfig ModelSpec::at(double n) const {
  ModelConfig cfg;
  cfg.n = n;
  if (kappa == "volterra") {
    cfg.kappa = KappaSpec::volterra();
  } else if (kappa == "power_law") {
    cfg.kappa = KappaSpec::power_law(p, C);
  } else {
    throw ConfigError("unknown kappa '" + kappa + "' (expected volterra or power_law)");
  }
  cfg.A = A;
  cfg.gamma = gamma;
  cfg.trunc = trunc;
  return cfg.resolved();
}

void ExperimentSpec::validate() const {
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (n_list.empty()) throw ConfigError("n_list must be nonempty");
  for (double n : n_list) model.at(n);
  if (!(L > 0.0)) throw ConfigError("L must be positive");
  if (draws < 1) throw ConfigError("band.draws must be positive");
  if (!(keep > 0.0 && keep <= 1.0)) throw ConfigError("band.keep must lie in (0,1]");
  if (grid_points < 2) throw ConfigError("band.grid_points must be >= 2");
  if (prior_alphas.empty()) throw ConfigError("prior.alphas must be nonempty");
  for (double a : prior_alphas)
    if (!(a > 0.0)) throw ConfigError("prior.alphas must be positive");
  if (prior_T < 4) throw ConfigError("prior.t must be >= 4");
  if (max_N0 < 2) throw ConfigError("prior.max_n0 must be >= 2");
  if (!(beta > 0.0) || !(M > 0.0)) throw ConfigError("minimax.beta and minimax.m must be positive");
  for (double m : M_list)
    if (!(m > 0.0)) throw ConfigError("minimax.m_list must be positive");
  if (scan_points < 2) throw ConfigError("diagnose.scan_points must be >= 2");
}

TruthSequence make_truth(const TruthChoice& choice, Index T) {
  const std::string& name = choice.name;
  if (name == "selfsim") return make_selfsim_truth(T);
  if (name == "bad") return make_bad_truth(std::max<Index>(T, 50), FirstCoordinate::published);
  if (name == "bad-convention") return make_bad_truth(std::max<Index>(T, 50), FirstCoordinate::convention);
  if (name == "zero") return make_zero_truth(T);
  if (name == "power") return make_power_truth(choice.amplitude, choice.exponent, T);
  if (name == "counterexample") {
    // p of the truth construction is the model's; callers pass it through exponent.
    return make_counterexample_truth(choice.beta, choice.M, choice.rho, choice.n_seq, choice.exponent, T);
  }
  if (name == "csv") {
    std::ifstream in(choice.path);
    if (!in) throw IoError("cannot open truth file " + choice.path);
    return read_truth_csv(in);
  }
  throw ConfigError("unknown truth '" + name + "'");
}

namespace {

unsigned resolve_threads(unsigned threads) {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

TruthSequence truth_for(const ExperimentSpec& spec, const SequenceModel& model) {
  TruthChoice choice = spec.truth;
  if (choice.name == "counterexample") choice.exponent = model.config().kappa.p();
  return make_truth(choice, model.size());
}

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class Fn>
auto with_replication_context(int rep, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError("replication " + std::to_string(rep) + ": " + e.what());
  }
}

}  // namespace

CoverageResult summarize_coverage(double n, std::vector<ReplicationRecord> records) {
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.rep < b.rep; });
  CoverageResult out;
  out.n = n;
  out.reps = static_cast<int>(records.size());
  double radius_sum = 0.0, alpha_sum = 0.0;
  int finite = 0;
  for (const auto& r : records) {
    out.covered += r.covered ? 1 : 0;
    alpha_sum += r.alpha_hat;
    if (std::isfinite(r.radius)) {
      radius_sum += r.radius;
      ++finite;
    } else {
      ++out.infinite_radius;
    }
  }
  if (out.reps > 0) {
    out.coverage = static_cast<double>(out.covered) / out.reps;
    out.mean_alpha_hat = alpha_sum / out.reps;
    out.ci_halfwidth = 1.96 * std::sqrt(out.coverage * (1.0 - out.coverage) / out.reps);
  }
  out.mean_radius = finite > 0 ? radius_sum / finite : 0.0;
  return out;
}

std::vector<ReplicationRecord> coverage_replications(const TruthSequence& truth, const SequenceModel& model,
                                                     double L, int reps, Seed seed, std::uint64_t slot,
                                                     unsigned threads) {
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(reps));
  numeric::parallel_for(records.size(), resolve_threads(threads), [&](std::size_t k) {
    const int rep = static_cast<int>(k);
    records[k] = with_replication_context(rep, [&] {
      const Observation obs =
          synthesize(truth, model, substream_seed(seed, replication_index(slot, k), StreamTag::noise));
      const CredibleBall ball = credible_ball(obs, model, L);
      if (!std::isfinite(ball.alpha_used) || std::isnan(ball.radius))
        throw NumericalError("non-finite alpha_hat or radius");
      ReplicationRecord rec;
      rec.rep = rep;
      rec.alpha_hat = ball.alpha_used;
      rec.radius = ball.radius;
      rec.distance = std::sqrt(distance_sq(ball, truth));
      rec.covered = contains(ball, truth);
      return rec;
    });
  });
  return records;
}

namespace {

std::string coverage_csv(const std::vector<ReplicationRecord>& records) {
  std::ostringstream os;
  os.precision(17);
  os << "rep,alpha_hat,radius,distance,covered\n";
  for (const auto& r : records)
    os << r.rep << ',' << r.alpha_hat << ',' << r.radius << ',' << r.distance << ',' << (r.covered ? 1 : 0)
       << '\n';
  return os.str();
}

}  // namespace

std::vector<CoverageResult> run_coverage(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<CoverageResult> results;
  for (std::size_t slot = 0; slot < spec.n_list.size(); ++slot) {
    const double n = spec.n_list[slot];
    const SequenceModel model(spec.model.at(n));
    const TruthSequence truth = truth_for(spec, model);
    const auto records = coverage_replications(truth, model, spec.L, spec.reps, spec.seed, slot, spec.threads);
    results.push_back(summarize_coverage(n, records));
    if (!spec.out.empty())
      write_text_file(fs::path(spec.out) / ("coverage_n" + format_n(n) + ".csv"), coverage_csv(records));
  }
  return results;
}

std::vector<BandSummary> run_figures(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<BandSummary> bands;
  BandSettings settings;
  settings.draws = spec.draws;
  settings.keep = spec.keep;
  settings.grid = Vector::LinSpaced(spec.grid_points, 0.0, 1.0);
  for (std::size_t slot = 0; slot < spec.n_list.size(); ++slot) {
    const double n = spec.n_list[slot];
    const SequenceModel model(spec.model.at(n));
    const TruthSequence truth = truth_for(spec, model);
    const auto index = replication_index(slot, 0);
    BandSummary band = with_replication_context(0, [&] {
      const Observation obs = synthesize(truth, model, substream_seed(spec.seed, index, StreamTag::noise));
      return sample_band(obs, model, settings, substream_seed(spec.seed, index, StreamTag::posterior), &truth);
    });
    if (!spec.out.empty()) {
      std::ostringstream os;
      write_band_csv(os, band);
      write_text_file(fs::path(spec.out) / ("band_n" + format_n(n) + ".csv"), os.str());
    }
    bands.push_back(std::move(band));
  }
  return bands;
}

std::vector<DiagnoseResult> run_diagnose(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<DiagnoseResult> results;
  for (std::size_t slot = 0; slot < spec.n_list.size(); ++slot) {
    DiagnoseResult res;
    res.n = spec.n_list[slot];
    const SequenceModel model(spec.model.at(res.n));
    const TruthSequence truth = truth_for(spec, model);
    res.report = diagnose(truth, model, spec.beta, spec.M, spec.scan_points);
    res.reps = spec.reps;
    if (spec.reps > 1) {
      res.alpha_hats.assign(static_cast<std::size_t>(spec.reps), 0.0);
      numeric::parallel_for(res.alpha_hats.size(), resolve_threads(spec.threads), [&](std::size_t k) {
        res.alpha_hats[k] = with_replication_context(static_cast<int>(k), [&] {
          const Observation obs = synthesize(
              truth, model, substream_seed(spec.seed, replication_index(slot, k), StreamTag::noise));
          return estimate_alpha(obs, model).alpha_hat;
        });
      });
      const auto captured = std::count_if(res.alpha_hats.begin(), res.alpha_hats.end(), [&](double a) {
        return res.report.alpha_lower <= a && a <= res.report.alpha_upper;
      });
      res.capture_frequency = static_cast<double>(captured) / spec.reps;
    }
    if (!spec.out.empty())
      write_text_file(fs::path(spec.out) / ("diagnostics_n" + format_n(res.n) + ".json"),
                      Json(res.report).dump(2) + "\n");
    results.push_back(std::move(res));
  }
  return results;
}

Index smallest_passing_N0(const TruthSequence& theta, double L0, Index max_N0) {
  auto passes = [&](Index N0) { return is_in_class(theta, PolishedTail{L0, N0, 2.0}).verdict == Verdict::holds; };
  const Index top = max_N0 - max_N0 % 2;
  if (top < 2 || !passes(top)) return 0;
  // Passing is monotone in N0: the conditions for a larger N0 are a subset.
  Index lo = 1, hi = top / 2;  // candidates 2*lo .. 2*hi, 2*hi passes
  while (lo < hi) {
    const Index mid = (lo + hi) / 2;
    if (passes(2 * mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return 2 * hi;
}

std::vector<PriorCheckResult> run_prior_check(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<PriorCheckResult> results;
  for (std::size_t slot = 0; slot < spec.prior_alphas.size(); ++slot) {
    PriorCheckResult res;
    res.alpha = spec.prior_alphas[slot];
    res.L0 = 2.0 / res.alpha + 1.0;
    res.reps = spec.reps;
    std::vector<Index> found(static_cast<std::size_t>(spec.reps), 0);
    numeric::parallel_for(found.size(), resolve_threads(spec.threads), [&](std::size_t k) {
      const TruthSequence theta = prior_draw(
          res.alpha, spec.prior_T, substream_seed(spec.seed, replication_index(slot, k), StreamTag::prior));
      found[k] = smallest_passing_N0(theta, res.L0, spec.max_N0);
    });
    res.min_N0_histogram.assign(static_cast<std::size_t>(spec.max_N0 / 2), 0);
    for (Index f : found) {
      if (f == 0) continue;
      ++res.passed;
      ++res.min_N0_histogram[static_cast<std::size_t>(f / 2 - 1)];
    }
    res.pass_fraction = static_cast<double>(res.passed) / res.reps;
    results.push_back(std::move(res));
  }
  return results;
}

std::vector<MinimaxRow> run_minimax(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<MinimaxRow> rows;
  for (double n : spec.n_list) {
    const SequenceModel model(spec.model.at(n));
    const double p = model.config().kappa.p();
    const double d = 1.0 + 2.0 * spec.beta + 2.0 * p;
    for (double M : spec.M_list) {
      const auto risk = minimax_linear_risk(spec.beta, M, model);
      rows.push_back({n, M, risk.risk, risk.tail_bound,
                      std::pow(M, (1.0 + 2.0 * p) / d) * std::pow(n, -2.0 * spec.beta / d)});
    }
  }
  if (!spec.out.empty()) {
    std::ostringstream os;
    os << "n,m,risk,tail_bound,rate\n";
    for (const auto& r : rows)
      os << fmt17(r.n) << ',' << fmt17(r.M) << ',' << fmt17(r.risk) << ',' << fmt17(r.tail_bound) << ','
         << fmt17(r.rate) << '\n';
    write_text_file(fs::path(spec.out) / "minimax.csv", os.str());
  }
  return rows;
}

void run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  Json summary{{"mode", to_string(spec.mode)}};
  if (!spec.out.empty()) write_text_file(fs::path(spec.out) / "spec.json", Json(spec).dump(2) + "\n");
  switch (spec.mode) {
    case Mode::coverage:
      summary["results"] = run_coverage(spec);
      break;
    case Mode::figures: {
      Json files = Json::array();
      for (const auto& band : run_figures(spec))
        files.push_back({{"alpha_hat", band.alpha_hat}, {"kept", band.kept}});
      for (std::size_t k = 0; k < spec.n_list.size(); ++k) {
        files[k]["n"] = spec.n_list[k];
        files[k]["file"] = "band_n" + format_n(spec.n_list[k]) + ".csv";
      }
      summary["results"] = files;
      break;
    }
    case Mode::diagnose: {
      Json items = Json::array();
      for (const auto& r : run_diagnose(spec))
        items.push_back({{"n", r.n},
                         {"reps", r.reps},
                         {"capture_frequency", r.capture_frequency},
                         {"alpha_lower", r.report.alpha_lower},
                         {"alpha_upper", r.report.alpha_upper},
                         {"bounds_vacuous", r.report.bounds_vacuous},
                         {"oracle_risk", r.report.oracle_risk},
                         {"oracle_alpha", r.report.oracle_alpha},
                         {"file", "diagnostics_n" + format_n(r.n) + ".json"}});
      summary["results"] = items;
      break;
    }
    case Mode::prior_check:
      summary["results"] = run_prior_check(spec);
      break;
    case Mode::minimax:
      summary["results"] = run_minimax(spec);
      break;
  }
  if (!spec.out.empty()) write_text_file(fs::path(spec.out) / "summary.json", summary.dump(2) + "\n");
}

}  // namespace ebcred
