#include "ebcred/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ebcred/errors.hpp"

namespace ebcred {

KappaSpec KappaSpec::power_law(double p, double C) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("kappa: p must be a nonnegative real");
  if (!(C >= 1.0) || !std::isfinite(C)) throw ConfigError("kappa: envelope constant C must be >= 1");
  return KappaSpec(Kind::power_law, p, C);
}

KappaSpec KappaSpec::volterra() { return KappaSpec(Kind::volterra, 1.0, std::numbers::pi); }

double KappaSpec::operator()(Index i) const {
  if (i < 1) throw DomainError("kappa: index must be >= 1");
  const double di = static_cast<double>(i);
  switch (kind_) {
    case Kind::power_law:
      return p_ == 0.0 ? 1.0 : std::pow(di, -p_);
    case Kind::volterra:
      return 1.0 / ((di - 0.5) * std::numbers::pi);
  }
  return 0.0;
}

Vector KappaSpec::values(Index count) const {
  Vector out(count);
  for (Index i = 0; i < count; ++i) out[i] = (*this)(i + 1);
  return out;
}

std::string KappaSpec::name() const {
  if (kind_ == Kind::volterra) return "volterra";
  std::ostringstream os;
  os << "power_law(p=" << p_ << ",C=" << C_ << ")";
  return os.str();
}

Index default_truncation(double n, double p) {
  const double effective = std::pow(n, 1.0 / (1.0 + 2.0 * p));
  const auto floor_dim = static_cast<Index>(std::ceil(effective - 1e-9));
  const auto margin = static_cast<Index>(std::ceil(10.0 * effective - 1e-9));
  Index trunc = std::max<Index>(1000, std::min<Index>(margin, 100000));
  return std::max(trunc, floor_dim);
}

void ModelConfig::validate() const {
  if (!std::isfinite(n) || n < 1.0) throw ConfigError("model: n must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("model: gamma must lie in (0,1)");
  if (!(A > 0.0) || !std::isfinite(A)) throw ConfigError("model: A must be positive");
  if (trunc < 1) throw ConfigError("model: truncation must be positive");
  const double effective = std::pow(n, 1.0 / (1.0 + 2.0 * kappa.p()));
  if (static_cast<double>(trunc) < std::ceil(effective - 1e-9)) {
    std::ostringstream os;
    os << "model: truncation " << trunc << " is below the effective dimension n^{1/(1+2p)} = "
       << effective;
    throw ConfigError(os.str());
  }
}

ModelConfig ModelConfig::resolved() const {
  ModelConfig out = *this;
  if (out.trunc == 0) out.trunc = default_truncation(n, kappa.p());
  out.validate();
  return out;
}

SequenceModel::SequenceModel(const ModelConfig& cfg) : cfg_(cfg.resolved()) {
  const Index size = cfg_.trunc;
  kappa_ = cfg_.kappa.values(size);
  log_i_ = Eigen::ArrayXd::LinSpaced(size, 1.0, static_cast<double>(size)).log();
  kappa_inv_sq_ = kappa_.array().square().inverse();
  log_kappa_inv_sq_ = kappa_inv_sq_.log();
}

Eigen::ArrayXd SequenceModel::precision_ratio(double alpha) const {
  const double log_n = std::log(cfg_.n);
  return (log_n - (1.0 + 2.0 * alpha) * log_i_ - log_kappa_inv_sq_).exp();
}

Eigen::ArrayXd SequenceModel::posterior_variance(double alpha) const {
  const Eigen::ArrayXd u = precision_ratio(alpha);
  return kappa_inv_sq_ / cfg_.n * u / (1.0 + u);
}

Observation synthesize(const TruthSequence& theta0, const SequenceModel& model, Seed seed) {
  const Index size = model.size();
  if (theta0.size() < size && !theta0.tail().is_zero()) {
    std::ostringstream os;
    os << "synthesize: truth '" << theta0.label() << "' has " << theta0.size()
       << " coefficients and a nonzero tail, but the model needs " << size;
    throw PreconditionError(os.str());
  }
  Vector theta = Vector::Zero(size);
  const Index common = std::min(size, theta0.size());
  theta.head(common) = theta0.coeffs().head(common);

  NormalStream normals(seed);
  const Vector z = normals.vector(size);
  Observation obs;
  obs.x = model.kappa().cwiseProduct(theta) + z / std::sqrt(model.n());
  obs.n = model.n();
  obs.kappa = model.config().kappa;
  return obs;
}

Observation synthesize(const TruthSequence& theta0, const ModelConfig& cfg, Seed seed) {
  return synthesize(theta0, SequenceModel(cfg), seed);
}

}  // namespace ebcred
