#pragma once

#include <string>

#include <Eigen/Core>

namespace ebcred {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// What a truth looks like beyond its stored coefficients.
///
/// `zero`: theta_i = 0 for i > T.
/// `power_law` with `exact`: theta_i = amplitude * i^-exponent for i > T.
/// `power_law` without `exact`: only the envelope |theta_i| <= amplitude * i^-exponent
/// is known.
struct TailDescriptor {
  enum class Kind { zero, power_law };

  Kind kind = Kind::zero;
  double amplitude = 0.0;
  double exponent = 1.0;
  bool exact = false;

  static TailDescriptor zero() { return {}; }
  static TailDescriptor power_law(double amplitude, double exponent, bool exact);

  bool is_zero() const { return kind == Kind::zero || amplitude == 0.0; }

  /// Upper bound on sum_{i > T} theta_i^2 (exact tails are bounded by the
  /// same integral comparison).
  double norm_sq_beyond(Index T) const;

  /// Coordinate i > T of an exact or zero tail; throws for envelope tails.
  double value(Index i) const;

  /// Envelope amplitude * i^-exponent (0 for zero tails).
  double envelope(Index i) const;

  bool operator==(const TailDescriptor&) const = default;
};

/// Finite-precision representation of an l2 sequence: coefficients
/// theta_1..theta_T and a tail descriptor.
class TruthSequence {
 public:
  TruthSequence() = default;
  TruthSequence(Vector coeffs, TailDescriptor tail, std::string label);

  /// Stored length T.
  Index size() const { return coeffs_.size(); }
  /// Coefficient theta_i, 1-based. Beyond T it uses the tail (exact or zero).
  double operator()(Index i) const;
  const Vector& coeffs() const { return coeffs_; }
  const TailDescriptor& tail() const { return tail_; }
  const std::string& label() const { return label_; }

  /// First `count` coordinates, continuing into an exact or zero tail.
  /// Throws PreconditionError when that needs an envelope-only tail.
  Vector head(Index count) const;

  /// theta_1 = 0, the convention assumed by the coverage theory.
  bool first_coordinate_is_zero() const { return size() == 0 || coeffs_[0] == 0.0; }

  bool operator==(const TruthSequence&) const;

 private:
  Vector coeffs_;
  TailDescriptor tail_;
  std::string label_;
};

}  // namespace ebcred
