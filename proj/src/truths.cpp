#include "ebcred/truths.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "ebcred/errors.hpp"

namespace ebcred {

// ---------------------------------------------------------------------------
// TailDescriptor / TruthSequence
// ---------------------------------------------------------------------------

TailDescriptor TailDescriptor::power_law(double amplitude, double exponent, bool exact) {
  if (!(exponent > 0.5)) throw PreconditionError("power-law tail needs exponent > 1/2");
  if (!std::isfinite(amplitude)) throw PreconditionError("power-law tail amplitude must be finite");
  return TailDescriptor{Kind::power_law, amplitude, exponent, exact};
}

double TailDescriptor::norm_sq_beyond(Index T) const {
  if (is_zero()) return 0.0;
  const double t = std::max<double>(1.0, static_cast<double>(T));
  return amplitude * amplitude * std::pow(t, 1.0 - 2.0 * exponent) / (2.0 * exponent - 1.0);
}

double TailDescriptor::value(Index i) const {
  if (is_zero()) return 0.0;
  if (!exact) throw PreconditionError("tail is known only through its envelope");
  return envelope(i);
}

double TailDescriptor::envelope(Index i) const {
  if (is_zero()) return 0.0;
  return amplitude * std::pow(static_cast<double>(i), -exponent);
}

TruthSequence::TruthSequence(Vector coeffs, TailDescriptor tail, std::string label)
    : coeffs_(std::move(coeffs)), tail_(tail), label_(std::move(label)) {
  if (!coeffs_.allFinite()) throw PreconditionError("truth coefficients must be finite");
}

double TruthSequence::operator()(Index i) const {
  if (i < 1) throw DomainError("truth: index must be >= 1");
  if (i <= size()) return coeffs_[i - 1];
  return tail_.value(i);
}

Vector TruthSequence::head(Index count) const {
  Vector out(count);
  const Index common = std::min(count, size());
  out.head(common) = coeffs_.head(common);
  for (Index i = common; i < count; ++i) out[i] = tail_.value(i + 1);
  return out;
}

bool TruthSequence::operator==(const TruthSequence& other) const {
  return coeffs_.size() == other.coeffs_.size() && coeffs_ == other.coeffs_ &&
         tail_ == other.tail_ && label_ == other.label_;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

TruthSequence make_selfsim_truth(Index T) {
  if (T < 2) throw PreconditionError("make_selfsim_truth: T must be >= 2");
  Vector c(T);
  c[0] = 0.0;
  for (Index i = 2; i <= T; ++i) {
    const double di = static_cast<double>(i);
    c[i - 1] = std::pow(di, -1.5) * std::sin(di);
  }
  return TruthSequence(std::move(c), TailDescriptor::power_law(1.0, 1.5, false), "selfsim");
}

TruthSequence make_bad_truth(Index T, FirstCoordinate first) {
  if (T < 50) throw PreconditionError("make_bad_truth: T must be >= 50");
  Vector c = Vector::Zero(T);
  c[0] = first == FirstCoordinate::published ? 8.0 : 0.0;
  c[2] = 2.0;
  c[49] = -2.0;
  // Blocks 2^{4^j} < i <= 2^{4^j + 1}, j >= 3; none fit below 2^63.
  for (int j = 3;; ++j) {
    const double log2_start = std::pow(4.0, j);
    if (log2_start >= 62.0 || std::ldexp(1.0, static_cast<int>(log2_start)) >= static_cast<double>(T))
      break;
    const auto start = static_cast<Index>(std::ldexp(1.0, static_cast<int>(log2_start)));
    for (Index i = start + 1; i <= std::min(T, 2 * start); ++i)
      c[i - 1] = std::pow(static_cast<double>(i), -1.5);
  }
  return TruthSequence(std::move(c), TailDescriptor::zero(),
                       first == FirstCoordinate::published ? "bad" : "bad-convention");
}

TruthSequence make_counterexample_truth(double beta, double M, const std::vector<double>& rho_seq,
                                        const std::vector<double>& n_seq, double p, Index T) {
  if (!(beta > 0.0) || !(M > 0.0) || !(p >= 0.0))
    throw PreconditionError("make_counterexample_truth: need beta > 0, M > 0, p >= 0");
  if (T < 2) throw PreconditionError("make_counterexample_truth: T must be >= 2");
  if (rho_seq.size() != n_seq.size() || n_seq.empty())
    throw PreconditionError("make_counterexample_truth: rho and n sequences must match and be nonempty");
  const double expo = 1.0 + 2.0 * beta + 2.0 * p;
  for (std::size_t j = 0; j < rho_seq.size(); ++j) {
    if (!(rho_seq[j] >= 1.0) || (j > 0 && rho_seq[j] < rho_seq[j - 1]))
      throw PreconditionError("make_counterexample_truth: rho must be increasing and >= 1");
    if (!(n_seq[j] >= 1.0)) throw PreconditionError("make_counterexample_truth: n_j must be >= 1");
  }
  for (std::size_t j = 0; j + 1 < n_seq.size(); ++j) {
    const double needed = std::pow(2.0 * rho_seq[j + 1] * rho_seq[j + 1], expo) * n_seq[j];
    if (n_seq[j + 1] < needed) {
      std::ostringstream os;
      os << "make_counterexample_truth: growth condition fails at j = " << j + 1 << " (n_" << j + 2
         << " = " << n_seq[j + 1] << " < " << needed << ")";
      throw PreconditionError(os.str());
    }
  }

  struct Band {
    double lo, hi;
    bool hi_open;
  };
  std::vector<Band> gaps;
  double last_gap_end = 0.0;
  for (std::size_t j = 0; j < n_seq.size(); ++j) {
    const double dim = std::pow(n_seq[j], 1.0 / expo);
    gaps.push_back({dim / rho_seq[j], dim, true});
    gaps.push_back({2.0 * dim, rho_seq[j] * dim, false});
    last_gap_end = std::max(last_gap_end, rho_seq[j] * dim);
  }

  Vector c(T);
  c[0] = 0.0;
  const double root_m = std::sqrt(M);
  for (Index i = 2; i <= T; ++i) {
    const double di = static_cast<double>(i);
    const bool in_gap = std::any_of(gaps.begin(), gaps.end(), [di](const Band& b) {
      return di >= b.lo && (b.hi_open ? di < b.hi : di <= b.hi);
    });
    c[i - 1] = in_gap ? 0.0 : root_m * std::pow(di, -0.5 - beta);
  }
  const bool tail_exact = static_cast<double>(T) >= last_gap_end;
  return TruthSequence(std::move(c), TailDescriptor::power_law(root_m, 0.5 + beta, tail_exact),
                       "counterexample");
}

TruthSequence make_power_truth(double amplitude, double exponent, Index T) {
  if (T < 2) throw PreconditionError("make_power_truth: T must be >= 2");
  Vector c(T);
  c[0] = 0.0;
  for (Index i = 2; i <= T; ++i) c[i - 1] = amplitude * std::pow(static_cast<double>(i), -exponent);
  return TruthSequence(std::move(c), TailDescriptor::power_law(amplitude, exponent, true), "power");
}

TruthSequence make_zero_truth(Index T) {
  if (T < 1) throw PreconditionError("make_zero_truth: T must be >= 1");
  return TruthSequence(Vector::Zero(T), TailDescriptor::zero(), "zero");
}

TruthSequence prior_draw(double alpha, Index T, Seed seed) {
  if (!(alpha > 0.0)) throw PreconditionError("prior_draw: alpha must be positive");
  if (T < 1) throw PreconditionError("prior_draw: T must be >= 1");
  NormalStream normals(seed);
  const Eigen::ArrayXd log_i = Eigen::ArrayXd::LinSpaced(T, 1.0, static_cast<double>(T)).log();
  Vector c = (normals.vector(T).array() * ((-0.5 - alpha) * log_i).exp()).matrix();
  c[0] = 0.0;
  return TruthSequence(std::move(c), TailDescriptor::zero(), "prior");
}

// ---------------------------------------------------------------------------
// Class checks
// ---------------------------------------------------------------------------

namespace {

// Suffix sums S[k] = sum_{i >= k+1} theta_i^2 over stored coordinates, S[T] = 0.
Eigen::ArrayXd suffix_energy(const Vector& c) {
  const Index T = c.size();
  Eigen::ArrayXd s(T + 1);
  s[T] = 0.0;
  for (Index k = T - 1; k >= 0; --k) s[k] = s[k + 1] + c[k] * c[k];
  return s;
}

// Energy of the block N..floor(rho N), both 1-based and inside the storage.
double block_energy(const Eigen::ArrayXd& s, Index N, Index last) { return s[N - 1] - s[last]; }

Index block_end(Index N, double rho) {
  return static_cast<Index>(std::floor(rho * static_cast<double>(N) + 1e-9));
}

ClassCheck check(const TruthSequence& theta, const Hyperrectangle& h) {
  ClassCheck out;
  const Vector& c = theta.coeffs();
  const Index T = c.size();
  double worst = -1.0;
  for (Index i = 1; i <= T; ++i) {
    const double v = std::pow(static_cast<double>(i), 1.0 + 2.0 * h.beta) * c[i - 1] * c[i - 1];
    if (v > worst) {
      worst = v;
      out.witness = i;
    }
  }
  out.checked_up_to = T;
  const TailDescriptor& tail = theta.tail();
  if (!tail.is_zero()) {
    const double q = 1.0 + 2.0 * h.beta - 2.0 * tail.exponent;
    if (q > 0.0) {
      out.verdict = tail.exact ? Verdict::fails : Verdict::undecidable;
      out.margin = -std::numeric_limits<double>::infinity();
      out.witness = T + 1;
      out.note = "tail envelope grows faster than the rectangle allows";
      return out;
    }
    const double tail_sup =
        tail.amplitude * tail.amplitude * std::pow(static_cast<double>(T + 1), q);
    if (tail_sup > worst) {
      worst = tail_sup;
      out.witness = T + 1;
    }
    out.checked_up_to = std::numeric_limits<Index>::max();
  } else {
    out.checked_up_to = std::numeric_limits<Index>::max();
  }
  out.margin = h.M - worst;
  // pow() roundoff on sequences that sit exactly on the boundary
  if (out.margin >= -1e-12 * h.M) {
    out.verdict = Verdict::holds;
  } else {
    // An envelope tail supremum is only an upper bound.
    out.verdict = (out.witness > T && !tail.exact) ? Verdict::undecidable : Verdict::fails;
  }
  return out;
}

ClassCheck check(const TruthSequence& theta, const Sobolev& s) {
  ClassCheck out;
  const Vector& c = theta.coeffs();
  const Index T = c.size();
  double total = 0.0;
  for (Index i = 1; i <= T; ++i)
    total += std::pow(static_cast<double>(i), 2.0 * s.beta) * c[i - 1] * c[i - 1];
  double tail_upper = 0.0;
  const TailDescriptor& tail = theta.tail();
  if (!tail.is_zero()) {
    const double q = 2.0 * s.beta - 2.0 * tail.exponent;
    if (q >= -1.0) {
      out.verdict = tail.exact ? Verdict::fails : Verdict::undecidable;
      out.margin = -std::numeric_limits<double>::infinity();
      out.witness = T + 1;
      out.checked_up_to = T;
      out.note = "weighted tail series diverges";
      return out;
    }
    tail_upper = tail.amplitude * tail.amplitude * std::pow(static_cast<double>(T), q + 1.0) / (-q - 1.0);
  }
  out.witness = T;
  out.checked_up_to = std::numeric_limits<Index>::max();
  out.margin = s.M - (total + tail_upper);
  if (out.margin >= 0.0) {
    out.verdict = Verdict::holds;
  } else if (s.M - total < 0.0) {
    out.verdict = Verdict::fails;
  } else {
    // Only the tail bound pushes the sum over M.
    out.verdict = Verdict::undecidable;
    out.note = "violation depends on the tail bound only";
  }
  return out;
}

ClassCheck check(const TruthSequence& theta, const PolishedTail& pt) {
  ClassCheck out;
  if (!(pt.rho >= 2.0) || pt.N0 < 1 || !(pt.L0 > 0.0))
    throw PreconditionError("polished tail: need L0 > 0, N0 >= 1, rho >= 2");
  const Vector& c = theta.coeffs();
  const Index T = c.size();
  const auto s = suffix_energy(c);
  const TailDescriptor& tail = theta.tail();
  const double beyond_upper = tail.norm_sq_beyond(T);
  // Exact tails are bracketed by the integral from T+1; envelopes only from above.
  const double beyond_lower = (!tail.is_zero() && tail.exact) ? tail.norm_sq_beyond(T + 1) : 0.0;

  double worst = std::numeric_limits<double>::infinity();
  Index first_certain_failure = 0;
  Index last_checked = 0;
  for (Index N = pt.N0; block_end(N, pt.rho) <= T; ++N) {
    last_checked = N;
    const double block = block_energy(s, N, block_end(N, pt.rho));
    const double tail_upper = s[N - 1] + beyond_upper;
    const double tail_lower = s[N - 1] + beyond_lower;
    if (tail_upper <= 0.0) continue;  // 0 <= 0
    const double rel = pt.L0 * block / tail_upper - 1.0;
    if (rel < worst) {
      worst = rel;
      out.witness = N;
    }
    if (first_certain_failure == 0 && tail_lower > pt.L0 * block) first_certain_failure = N;
  }
  out.checked_up_to = last_checked;
  if (last_checked == 0) {
    out.verdict = Verdict::undecidable;
    out.note = "no N >= N0 with a complete block inside the stored coefficients";
    return out;
  }
  if (out.witness == 0) {
    // Sequence vanishes from N0 on within the checked range.
    out.witness = pt.N0;
    worst = 0.0;
  }
  out.margin = worst;
  if (worst >= 0.0) {
    out.verdict = Verdict::holds;
    out.note = "verified for N0 <= N <= " + std::to_string(last_checked);
  } else if (first_certain_failure != 0) {
    out.verdict = Verdict::fails;
    out.witness = first_certain_failure;
    out.margin = pt.L0 * block_energy(s, first_certain_failure, block_end(first_certain_failure, pt.rho)) /
                     (s[first_certain_failure - 1] + beyond_upper) - 1.0;
  } else {
    out.verdict = Verdict::undecidable;
    out.note = "violation depends on the tail envelope only";
  }
  return out;
}

ClassCheck check(const TruthSequence& theta, const SelfSimilar& ss) {
  if (!(ss.rho >= 2.0) || ss.N0 < 1 || !(ss.eps > 0.0))
    throw PreconditionError("self-similar: need eps > 0, N0 >= 1, rho >= 2");
  ClassCheck rect = check(theta, Hyperrectangle{ss.beta, ss.M});
  if (rect.verdict != Verdict::holds) {
    rect.note = "not in the hyperrectangle: " + rect.note;
    return rect;
  }
  ClassCheck out;
  const Vector& c = theta.coeffs();
  const Index T = c.size();
  const auto s = suffix_energy(c);
  double worst = std::numeric_limits<double>::infinity();
  Index last_checked = 0;
  for (Index N = ss.N0; block_end(N, ss.rho) <= T; ++N) {
    last_checked = N;
    const double need = ss.eps * ss.M * std::pow(static_cast<double>(N), -2.0 * ss.beta);
    const double rel = block_energy(s, N, block_end(N, ss.rho)) / need - 1.0;
    if (rel < worst) {
      worst = rel;
      out.witness = N;
    }
    if (rel < 0.0) {
      out.verdict = Verdict::fails;
      out.witness = N;
      out.margin = rel;
      out.checked_up_to = N;
      return out;
    }
  }
  out.checked_up_to = last_checked;
  if (last_checked == 0) {
    out.verdict = Verdict::undecidable;
    out.note = "no N >= N0 with a complete block inside the stored coefficients";
    return out;
  }
  out.margin = worst;
  out.verdict = Verdict::holds;
  out.note = "verified for N0 <= N <= " + std::to_string(last_checked);
  return out;
}

ClassCheck check(const TruthSequence& theta, const CZeroZero& cz) {
  ClassCheck out;
  if (!theta.tail().is_zero()) {
    out.verdict = Verdict::undecidable;
    out.note = "power-law tail: finite support cannot be decided at this truncation";
    out.checked_up_to = theta.size();
    return out;
  }
  const Vector& c = theta.coeffs();
  const double bound = std::sqrt(cz.M);
  out.checked_up_to = std::numeric_limits<Index>::max();
  out.margin = std::numeric_limits<double>::infinity();
  for (Index i = 1; i <= c.size(); ++i) {
    const double a = std::abs(c[i - 1]);
    const double slack = i > cz.N0 ? -a : bound - a;
    if (slack < out.margin || (i > cz.N0 && a > 0.0)) {
      out.margin = slack;
      out.witness = i;
    }
    if (i > cz.N0 && a > 0.0) {
      out.verdict = Verdict::fails;
      return out;
    }
  }
  out.verdict = out.margin >= 0.0 ? Verdict::holds : Verdict::fails;
  return out;
}

ClassCheck check(const TruthSequence& theta, const SuperSmooth& sm) {
  ClassCheck out;
  if (!theta.tail().is_zero()) {
    out.verdict = Verdict::undecidable;
    out.note = "power-law tail: exponential weights cannot be decided at this truncation";
    out.checked_up_to = theta.size();
    return out;
  }
  const Vector& c = theta.coeffs();
  double total = 0.0;
  for (Index i = 1; i <= c.size(); ++i) {
    if (c[i - 1] == 0.0) continue;
    total += std::exp(sm.c * std::pow(static_cast<double>(i), sm.d)) * c[i - 1] * c[i - 1];
    out.witness = i;
  }
  out.checked_up_to = std::numeric_limits<Index>::max();
  out.margin = sm.M - total;
  out.verdict = out.margin >= 0.0 ? Verdict::holds : Verdict::fails;
  return out;
}

}  // namespace

ClassCheck is_in_class(const TruthSequence& theta, const ClassParams& params) {
  return std::visit([&](const auto& p) { return check(theta, p); }, params);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::fails:
      return "fails";
    case Verdict::undecidable:
      return "undecidable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_truth_csv(std::ostream& os, const TruthSequence& theta) {
  const auto& tail = theta.tail();
  const auto old_precision = os.precision(17);
  os << "# tail=" << (tail.kind == TailDescriptor::Kind::zero ? "zero" : "power_law")
     << " amplitude=" << tail.amplitude << " exponent=" << tail.exponent
     << " exact=" << (tail.exact ? 1 : 0) << " label=" << theta.label() << "\n";
  os << "i,theta\n";
  for (Index i = 0; i < theta.size(); ++i) os << i + 1 << ',' << theta.coeffs()[i] << '\n';
  os.precision(old_precision);
}

TruthSequence read_truth_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw ConfigError("truth csv: missing tail descriptor line");
  std::map<std::string, std::string> fields;
  std::istringstream header(line.substr(2));
  std::string token;
  while (header >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError("truth csv: malformed descriptor field '" + token + "'");
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  for (const char* key : {"tail", "amplitude", "exponent", "exact", "label"})
    if (!fields.count(key)) throw ConfigError(std::string("truth csv: descriptor lacks '") + key + "'");
  TailDescriptor tail;
  if (fields["tail"] == "zero") {
    tail = TailDescriptor::zero();
    tail.amplitude = std::stod(fields["amplitude"]);
    tail.exponent = std::stod(fields["exponent"]);
    tail.exact = fields["exact"] == "1";
  } else if (fields["tail"] == "power_law") {
    tail = TailDescriptor::power_law(std::stod(fields["amplitude"]), std::stod(fields["exponent"]),
                                     fields["exact"] == "1");
  } else {
    throw ConfigError("truth csv: unknown tail kind '" + fields["tail"] + "'");
  }
  if (!std::getline(is, line) || line != "i,theta") throw ConfigError("truth csv: expected 'i,theta' header");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("truth csv: malformed row '" + line + "'");
    const long long i = std::stoll(line.substr(0, comma));
    if (i != static_cast<long long>(values.size()) + 1)
      throw ConfigError("truth csv: rows must be consecutive from i = 1");
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  Vector c = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  return TruthSequence(std::move(c), tail, fields["label"]);
}

}  // namespace ebcred
