#include "ebcred/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ebcred/errors.hpp"
#include "ebcred/numeric.hpp"

namespace ebcred {

HFunction::HFunction(const TruthSequence& theta0, const ModelConfig& cfg)
    : n_(cfg.n), p_(cfg.kappa.p()), stored_(theta0.size()) {
  if (!(n_ >= 2.0)) throw PreconditionError("h_n: needs n >= 2 so that log n > 0");
  std::vector<double> log_i, weight;
  for (Index i = 2; i <= theta0.size(); ++i) {
    const double t = theta0.coeffs()[i - 1];
    if (t == 0.0) continue;
    const double li = std::log(static_cast<double>(i));
    log_i.push_back(li);
    weight.push_back(n_ * std::exp(-2.0 * p_ * li) * li * t * t);
  }
  log_i_ = Eigen::Map<const Eigen::ArrayXd>(log_i.data(), static_cast<Index>(log_i.size()));
  weight_ = Eigen::Map<const Eigen::ArrayXd>(weight.data(), static_cast<Index>(weight.size()));
  suffix_.resize(weight_.size() + 1);
  suffix_[weight_.size()] = 0.0;
  for (Index k = weight_.size() - 1; k >= 0; --k) suffix_[k] = suffix_[k + 1] + weight_[k];
  if (!theta0.tail().is_zero()) {
    tail_amplitude_ = theta0.tail().amplitude;
    tail_exponent_ = theta0.tail().exponent;
  }
}

double HFunction::prefactor(double alpha) const {
  const double d = 1.0 + 2.0 * alpha + 2.0 * p_;
  return d / (std::pow(n_, 1.0 / d) * std::log(n_));
}

double HFunction::operator()(double alpha) const {
  if (!(alpha >= 0.0)) throw PreconditionError("h_n: alpha must be nonnegative");
  if (weight_.size() == 0) return 0.0;
  const double d = 1.0 + 2.0 * alpha + 2.0 * p_;
  const double log_n = std::log(n_);
  // v = n / i^{1+2a+2p}; each term is weight * v / (1 + v)^2 <= weight * v, and
  // v falls with i, so the walk stops once the rest is negligible.
  constexpr Index kBlock = 2048;
  Eigen::ArrayXd v(kBlock);
  double total = 0.0;
  for (Index start = 0; start < weight_.size(); start += kBlock) {
    const Index len = std::min(kBlock, weight_.size() - start);
    v.head(len) = (log_n - d * log_i_.segment(start, len)).exp();
    total += (weight_.segment(start, len) * v.head(len) / (1.0 + v.head(len)).square()).sum();
    if (v[len - 1] * suffix_[start + len] < 1e-14 * total) break;
  }
  return prefactor(alpha) * total;
}

double HFunction::tail_bound(double alpha) const {
  if (tail_amplitude_ == 0.0) return 0.0;
  // Terms beyond T are below n^2 a^2 log(i) i^{-q}, q = 2e + 1 + 2a + 4p.
  const double q = 2.0 * tail_exponent_ + 1.0 + 2.0 * alpha + 4.0 * p_;
  const double T = std::max<double>(3.0, static_cast<double>(stored_));
  const double integral = std::pow(T, 1.0 - q) * (std::log(T) / (q - 1.0) + 1.0 / ((q - 1.0) * (q - 1.0)));
  return prefactor(alpha) * n_ * n_ * tail_amplitude_ * tail_amplitude_ * integral;
}

double h_n(double alpha, const TruthSequence& theta0, const ModelConfig& cfg) {
  return HFunction(theta0, cfg)(alpha);
}

AlphaBounds alpha_bounds(const TruthSequence& theta0, const ModelConfig& cfg, int scan_points) {
  const HFunction h(theta0, cfg);
  const double A = cfg.A;
  const double c8 = std::pow(cfg.kappa.envelope_constant(), 8);
  AlphaBounds out;
  out.lower_threshold = 1.0 / (16.0 * c8);
  out.upper_threshold = 8.0 * c8;

  const auto grid = numeric::uniform_grid(0.0, A, scan_points);
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = h(grid[k]);

  // Shrinks [good_side, bad_side] onto the threshold crossing; returns the end
  // that satisfies the defining inequality.
  auto refine = [&](double inside, double outside, auto&& satisfies) {
    for (int it = 0; it < 60 && std::abs(outside - inside) > 1e-12 * std::max(1.0, A); ++it) {
      const double mid = 0.5 * (inside + outside);
      (satisfies(h(mid)) ? inside : outside) = mid;
    }
    return inside;
  };

  const auto above_lower = [&](double v) { return v >= out.lower_threshold; };
  const auto first = std::find_if(values.begin(), values.end(), above_lower);
  if (first == values.end()) {
    out.lower = A;
    out.lower_empty = true;
  } else if (first == values.begin()) {
    out.lower = 0.0;
  } else {
    const auto k = static_cast<std::size_t>(first - values.begin());
    out.lower = refine(grid[k], grid[k - 1], above_lower);
  }

  const auto below_upper = [&](double v) { return v <= out.upper_threshold; };
  const auto last = std::find_if(values.rbegin(), values.rend(), below_upper);
  if (last == values.rend()) {
    out.upper = 0.0;
    out.upper_empty = true;
  } else if (last == values.rbegin()) {
    out.upper = A;
  } else {
    const auto k = static_cast<std::size_t>(values.rend() - last) - 1;
    out.upper = refine(grid[k], grid[k + 1], below_upper);
  }
  return out;
}

namespace {

// theta_i^2 over the truncation and its suffix sums.
struct RiskData {
  Eigen::ArrayXd theta2;
  Eigen::ArrayXd suffix;

  RiskData(const TruthSequence& theta0, const SequenceModel& model) {
    theta2 = theta0.head(model.size()).array().square();
    suffix.resize(theta2.size() + 1);
    suffix[theta2.size()] = 0.0;
    for (Index i = theta2.size() - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + theta2[i];
  }
};

// bias^2 = sum theta^2 / (1 + u)^2, var^2 = sum kappa^-2 (u / (1 + u))^2 / n.
// Beyond the visited blocks the bias terms equal theta_i^2 up to a factor within
// 2 u of one and the variance terms are below kappa_i^-2 u_i^2 / n, both
// nonincreasing in i; the walk stops once both remainders are negligible.
BiasVariance risk_terms(double alpha, const SequenceModel& model, const RiskData& data) {
  const Eigen::ArrayXd& kinv2 = model.kappa_inv_sq();
  const Index size = model.size();
  BiasVariance out;
  double var_sum = 0.0;
  Index visited = size;
  model.for_each_block(
      alpha,
      [&](Index offset, const auto& u) {
        const Index len = u.size();
        const auto inv = 1.0 / (1.0 + u);
        out.bias_sq += (data.theta2.segment(offset, len) * inv.square()).sum();
        var_sum += (kinv2.segment(offset, len) * (u * inv).square()).sum();
      },
      [&](Index next, double last_u) {
        const double bias_rest = 2.0 * last_u * data.suffix[next];
        const double var_rest = static_cast<double>(size - next) * kinv2[next - 1] * last_u * last_u;
        if (bias_rest <= 1e-14 * (out.bias_sq + data.suffix[next]) && var_rest <= 1e-14 * var_sum) {
          visited = next;
          return true;
        }
        return false;
      });
  out.bias_sq += data.suffix[visited];
  out.var_sq = var_sum / model.n();
  return out;
}

}  // namespace

BiasVariance bias_variance(double alpha, const TruthSequence& theta0, const SequenceModel& model) {
  if (!(alpha >= 0.0)) throw PreconditionError("bias_variance: alpha must be nonnegative");
  return risk_terms(alpha, model, RiskData(theta0, model));
}

BiasVariance bias_variance(double alpha, const TruthSequence& theta0, const ModelConfig& cfg) {
  return bias_variance(alpha, theta0, SequenceModel(cfg));
}

OracleRisk oracle_risk(const TruthSequence& theta0, const SequenceModel& model, int grid_points) {
  const RiskData data(theta0, model);
  auto neg_risk = [&](double alpha) {
    const auto bv = risk_terms(alpha, model, data);
    return -(bv.bias_sq + bv.var_sq);
  };
  const auto best = numeric::maximize_on_grid(neg_risk, 0.0, model.config().A, grid_points, 1e-8);
  return {-best.value, best.arg};
}

OracleRisk oracle_risk(const TruthSequence& theta0, const ModelConfig& cfg, int grid_points) {
  return oracle_risk(theta0, SequenceModel(cfg), grid_points);
}

MinimaxRisk minimax_linear_risk(double beta, double M, const SequenceModel& model) {
  if (!(beta > 0.0) || !(M > 0.0)) throw PreconditionError("minimax_linear_risk: need beta, M > 0");
  const Eigen::ArrayXd Mi = M * (-(1.0 + 2.0 * beta) * model.log_index()).exp();
  const Eigen::ArrayXd s2 = model.kappa().array().square().inverse() / model.n();
  MinimaxRisk out;
  out.risk = (Mi * s2 / (Mi + s2)).sum();
  out.tail_bound = M * std::pow(static_cast<double>(model.size()), -2.0 * beta) / (2.0 * beta);
  return out;
}

MinimaxRisk minimax_linear_risk(double beta, double M, const ModelConfig& cfg) {
  return minimax_linear_risk(beta, M, SequenceModel(cfg));
}

DiagnosticsReport diagnose(const TruthSequence& theta0, const SequenceModel& model, double beta, double M,
                           int grid_points) {
  const ModelConfig& cfg = model.config();
  const HFunction h(theta0, cfg);
  DiagnosticsReport report;
  report.alpha_grid = numeric::uniform_grid(0.0, cfg.A, grid_points);
  const RiskData data(theta0, model);
  for (double a : report.alpha_grid) {
    report.h.push_back(h(a));
    report.h_tail_bound = std::max(report.h_tail_bound, h.tail_bound(a));
    const auto bv = risk_terms(a, model, data);
    report.bias_sq.push_back(bv.bias_sq);
    report.var_sq.push_back(bv.var_sq);
  }
  const auto bounds = alpha_bounds(theta0, cfg, grid_points);
  report.alpha_lower = bounds.lower;
  report.alpha_upper = bounds.upper;
  report.lower_empty = bounds.lower_empty;
  report.upper_empty = bounds.upper_empty;
  report.lower_threshold = bounds.lower_threshold;
  report.upper_threshold = bounds.upper_threshold;
  report.bounds_vacuous = bounds.lower == 0.0 && bounds.upper == cfg.A;
  const auto oracle = oracle_risk(theta0, model, grid_points);
  report.oracle_risk = oracle.risk;
  report.oracle_alpha = oracle.alpha;
  report.minimax_beta = beta;
  report.minimax_M = M;
  report.minimax_linear = minimax_linear_risk(beta, M, model).risk;
  return report;
}

}  // namespace ebcred
