#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sli {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Portfolio size, intensity bound, clamp bounds and horizon.
struct ModelParams {
  int m = 125;
  double lambda_bar = 2.5;
  double f_low = 1.0 / 3.0;
  double f_high = 3.0;
  double horizon = 1.0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// One piece of a piecewise-constant intensity: value on [start, next start).
struct IntensityPiece {
  double start = 0.0;
  double value = 0.0;

  friend bool operator==(const IntensityPiece&, const IntensityPiece&) = default;
};

/// The local intensity lambda(t, x) for t in [0, T], x in {0..M}.
///
/// Two representations: the linear-decay family lambda_bar * (1 - x / M),
/// and a per-level right-continuous step table in t. A table is expected to
/// vanish at x = M; a table that does not is still constructible (so that
/// validate_params can report it) but evaluation at x = M throws.
class LocalIntensity {
 public:
  static LocalIntensity linear_decay(double lambda_bar, int m, double horizon);
  /// pieces[x] lists the steps for level x, sorted by start, first start 0.
  static LocalIntensity table(std::vector<std::vector<IntensityPiece>> pieces,
                              double horizon);
  static LocalIntensity zero(int m, double horizon);

  /// Right-continuous value lambda(t, x).
  double operator()(double t, int x) const;
  /// Left limit lambda(t-, x); equals lambda(0, x) at t = 0.
  double left_limit(double t, int x) const;

  int m() const noexcept { return m_; }
  double horizon() const noexcept { return horizon_; }
  bool is_linear_decay() const noexcept { return kind_ == Kind::linear_decay; }
  /// lambda_bar of the linear-decay family (0 for tables).
  double decay_scale() const noexcept { return scale_; }
  /// max over all (t, x) of lambda.
  double supremum() const;
  /// min over all (t, x) of lambda.
  double infimum() const;
  /// max over t of lambda(t, M).
  double top_level_supremum() const;
  const std::vector<std::vector<IntensityPiece>>& pieces() const noexcept { return pieces_; }

 private:
  enum class Kind { linear_decay, table };

  LocalIntensity(Kind kind, int m, double horizon) : kind_(kind), m_(m), horizon_(horizon) {}
  void check_domain(double t, int x) const;
  double table_value(double t, int x, bool left) const;

  Kind kind_;
  int m_;
  double horizon_;
  double scale_ = 0.0;
  std::vector<std::vector<IntensityPiece>> pieces_;
};

/// f(y) = min(max(h(y), f_low), f_high) where h is the identity unless a
/// custom hook is installed. The clamp is always applied, so any hook yields
/// a function bounded by [f_low, f_high].
class ClampF {
 public:
  ClampF() = default;
  ClampF(double f_low, double f_high) : low_(f_low), high_(f_high) {}
  ClampF(double f_low, double f_high, std::function<double(double)> hook)
      : low_(f_low), high_(f_high), hook_(std::move(hook)) {}

  double operator()(double y) const {
    const double v = hook_ ? hook_(y) : y;
    return v < low_ ? low_ : (v > high_ ? high_ : v);
  }

  double low() const noexcept { return low_; }
  double high() const noexcept { return high_; }
  bool has_hook() const noexcept { return static_cast<bool>(hook_); }

 private:
  double low_ = 1.0 / 3.0;
  double high_ = 3.0;
  std::function<double(double)> hook_;
};

/// Everything the engines need to know about the loss side of the model.
struct Model {
  ModelParams params;
  LocalIntensity intensity;
  ClampF f;

  /// Dominating proposal rate per particle, lambda_bar * f_high / f_low.
  double proposal_rate() const { return params.lambda_bar * params.f_high / params.f_low; }
};

Model make_linear_decay_model(const ModelParams& p);

struct ValidationReport {
  std::vector<std::string> failures;

  bool ok() const noexcept { return failures.empty(); }
  std::string to_string() const;
};

ValidationReport validate_params(const ModelParams& p, const LocalIntensity& li);

/// Throws DomainError carrying the report when validation fails.
void require_valid(const ModelParams& p, const LocalIntensity& li);

}  // namespace sli
