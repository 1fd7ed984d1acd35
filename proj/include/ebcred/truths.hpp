#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "ebcred/rng.hpp"
#include "ebcred/truth_sequence.hpp"

namespace ebcred {

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// theta_i = i^-3/2 sin(i) for 2 <= i <= T, theta_1 = 0; envelope tail i^-3/2.
/// Self-similar with regularity 1.
TruthSequence make_selfsim_truth(Index T);

enum class FirstCoordinate {
  /// theta_1 = 8, as in the published bad-truth example.
  published,
  /// theta_1 = 0, respecting the convention the coverage theory assumes.
  convention,
};

/// Spiky truth with theta_1 = 8 (or 0), theta_3 = 2, theta_50 = -2 and blocks
/// theta_i = i^-3/2 on 2^{4^j} < i <= 2 * 2^{4^j}, j >= 3. The first block
/// starts at 2^64, so at any storable T only the spikes are present; the tail
/// is declared zero. Requires T >= 50.
TruthSequence make_bad_truth(Index T, FirstCoordinate first = FirstCoordinate::published);

/// Truth with theta_i^2 = M i^{-1-2 beta} except on the gap bands
/// [N_j / rho_j, N_j) and [2 N_j, rho_j N_j], N_j = n_j^{1/(1+2 beta+2p)}.
/// Positive roots, theta_1 = 0. Throws PreconditionError naming the first j
/// with n_{j+1} < (2 rho_{j+1}^2)^{1+2 beta+2p} n_j.
TruthSequence make_counterexample_truth(double beta, double M, const std::vector<double>& rho_seq,
                                        const std::vector<double>& n_seq, double p, Index T);

/// theta_i = amplitude * i^-exponent for i >= 2, theta_1 = 0, exact tail.
TruthSequence make_power_truth(double amplitude, double exponent, Index T);

/// The zero sequence with T stored coordinates.
TruthSequence make_zero_truth(Index T);

/// theta_i ~ N(0, i^{-1-2 alpha}) independently, theta_1 = 0, zero tail.
TruthSequence prior_draw(double alpha, Index T, Seed seed);

// ---------------------------------------------------------------------------
// Parameter classes
// ---------------------------------------------------------------------------

/// sup_i i^{1+2 beta} theta_i^2 <= M.
struct Hyperrectangle {
  double beta;
  double M;
};
/// sum_i i^{2 beta} theta_i^2 <= M.
struct Sobolev {
  double beta;
  double M;
};
/// sum_{i>=N} theta_i^2 <= L0 sum_{i=N}^{rho N} theta_i^2 for all N >= N0.
struct PolishedTail {
  double L0;
  Index N0;
  double rho = 2.0;
};
/// Hyperrectangle member with sum_{i=N}^{rho N} theta_i^2 >= eps M N^{-2 beta}, N >= N0.
struct SelfSimilar {
  double beta;
  double M;
  double eps;
  Index N0;
  double rho = 2.0;
};
/// theta_i = 0 for i > N0 and |theta_i| <= sqrt(M) otherwise.
struct CZeroZero {
  Index N0;
  double M;
};
/// sum_i exp(c i^d) theta_i^2 <= M.
struct SuperSmooth {
  double c;
  double d;
  double M;
};

using ClassParams =
    std::variant<Hyperrectangle, Sobolev, PolishedTail, SelfSimilar, CZeroZero, SuperSmooth>;

enum class Verdict { holds, fails, undecidable };

/// Outcome of a class membership check.
///
/// `witness` is the index (i or N) where the defining inequality is tightest,
/// or violated first; `margin` is the slack there (negative when violated,
/// relative for the block conditions). Conditions quantified over all N are
/// verified for N <= `checked_up_to` only.
struct ClassCheck {
  Verdict verdict = Verdict::undecidable;
  Index witness = 0;
  double margin = 0.0;
  Index checked_up_to = 0;
  std::string note;

  explicit operator bool() const { return verdict == Verdict::holds; }
  bool operator==(const ClassCheck&) const = default;
};

ClassCheck is_in_class(const TruthSequence& theta, const ClassParams& params);

std::string to_string(Verdict v);

// ---------------------------------------------------------------------------
// CSV form: a "# tail=... amplitude=... exponent=... exact=... label=..." line,
// a "i,theta" header and one row per stored coefficient.
// ---------------------------------------------------------------------------

void write_truth_csv(std::ostream& os, const TruthSequence& theta);
TruthSequence read_truth_csv(std::istream& is);

}  // namespace ebcred
