#include "sli/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sli {

LocalIntensity LocalIntensity::linear_decay(double lambda_bar, int m, double horizon) {
  if (m < 1) throw DomainError("linear-decay intensity needs m >= 1");
  LocalIntensity li(Kind::linear_decay, m, horizon);
  li.scale_ = lambda_bar;
  return li;
}

LocalIntensity LocalIntensity::table(std::vector<std::vector<IntensityPiece>> pieces,
                                     double horizon) {
  if (pieces.size() < 2) throw DomainError("intensity table needs at least levels 0 and 1");
  for (std::size_t x = 0; x < pieces.size(); ++x) {
    const auto& lv = pieces[x];
    if (lv.empty()) {
      throw DomainError("intensity table level " + std::to_string(x) + " has no pieces");
    }
    if (lv.front().start != 0.0) {
      throw DomainError("intensity table level " + std::to_string(x) + " must start at t = 0");
    }
    for (std::size_t k = 1; k < lv.size(); ++k) {
      if (!(lv[k].start > lv[k - 1].start)) {
        throw DomainError("intensity table level " + std::to_string(x) +
                          " breakpoints must be strictly increasing");
      }
    }
  }
  LocalIntensity li(Kind::table, static_cast<int>(pieces.size()) - 1, horizon);
  li.pieces_ = std::move(pieces);
  return li;
}

LocalIntensity LocalIntensity::zero(int m, double horizon) {
  std::vector<std::vector<IntensityPiece>> pieces(static_cast<std::size_t>(m) + 1,
                                                  {IntensityPiece{0.0, 0.0}});
  return table(std::move(pieces), horizon);
}

void LocalIntensity::check_domain(double t, int x) const {
  if (x < 0 || x > m_) {
    throw DomainError("loss level " + std::to_string(x) + " outside {0.." + std::to_string(m_) +
                      "}");
  }
  if (!(t >= 0.0) || t > horizon_) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << horizon_ << "]";
    throw DomainError(os.str());
  }
}

double LocalIntensity::table_value(double t, int x, bool left) const {
  const auto& lv = pieces_[static_cast<std::size_t>(x)];
  // Right-continuous: last piece with start <= t. Left limit: last start < t.
  auto it = left ? std::lower_bound(lv.begin(), lv.end(), t,
                                    [](const IntensityPiece& p, double v) { return p.start < v; })
                 : std::upper_bound(lv.begin(), lv.end(), t,
                                    [](double v, const IntensityPiece& p) { return v < p.start; });
  if (it == lv.begin()) return lv.front().value;
  return std::prev(it)->value;
}

double LocalIntensity::operator()(double t, int x) const {
  check_domain(t, x);
  if (kind_ == Kind::linear_decay) {
    return scale_ * (1.0 - static_cast<double>(x) / static_cast<double>(m_));
  }
  const double v = table_value(t, x, false);
  if (x == m_ && v != 0.0) throw DomainError("intensity table violates lambda(t, M) = 0");
  return v;
}

double LocalIntensity::left_limit(double t, int x) const {
  check_domain(t, x);
  if (kind_ == Kind::linear_decay) {
    return scale_ * (1.0 - static_cast<double>(x) / static_cast<double>(m_));
  }
  const double v = table_value(t, x, true);
  if (x == m_ && v != 0.0) throw DomainError("intensity table violates lambda(t, M) = 0");
  return v;
}

double LocalIntensity::supremum() const {
  if (kind_ == Kind::linear_decay) return std::max(scale_, 0.0);
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& lv : pieces_) {
    for (const auto& p : lv) {
      if (p.start <= horizon_) s = std::max(s, p.value);
    }
  }
  return s;
}

double LocalIntensity::infimum() const {
  if (kind_ == Kind::linear_decay) return std::min(scale_, 0.0);
  double s = std::numeric_limits<double>::infinity();
  for (const auto& lv : pieces_) {
    for (const auto& p : lv) {
      if (p.start <= horizon_) s = std::min(s, p.value);
    }
  }
  return s;
}

double LocalIntensity::top_level_supremum() const {
  if (kind_ == Kind::linear_decay) return 0.0;
  double s = 0.0;
  for (const auto& p : pieces_.back()) {
    if (p.start <= horizon_) s = std::max(s, std::abs(p.value));
  }
  return s;
}

Model make_linear_decay_model(const ModelParams& p) {
  return Model{p, LocalIntensity::linear_decay(p.lambda_bar, p.m, p.horizon),
               ClampF{p.f_low, p.f_high}};
}

std::string ValidationReport::to_string() const {
  if (ok()) return "valid";
  std::string s = "invalid:";
  for (const auto& f : failures) s += " [" + f + "]";
  return s;
}

ValidationReport validate_params(const ModelParams& p, const LocalIntensity& li) {
  ValidationReport r;
  auto fail = [&r](std::string what) { r.failures.push_back(std::move(what)); };

  if (p.m < 1) fail("m >= 1");
  if (!(p.horizon > 0.0) || !std::isfinite(p.horizon)) fail("horizon > 0");
  if (!(p.f_low > 0.0)) fail("f_low > 0 (strict positivity)");
  if (!(p.f_high >= p.f_low)) fail("f_low <= f_high");
  if (!std::isfinite(p.f_high)) fail("f_high < infinity");
  if (!(p.lambda_bar > 0.0) || !std::isfinite(p.lambda_bar)) fail("0 < lambda_bar < infinity");
  if (li.m() != p.m) fail("intensity levels match m");
  if (li.infimum() < 0.0) fail("lambda >= 0");
  if (li.supremum() > p.lambda_bar) fail("lambda_bar >= sup lambda(t, x)");
  if (li.top_level_supremum() != 0.0) fail("lambda(t, M) = 0");
  if (li.horizon() < p.horizon) fail("intensity defined on [0, horizon]");
  return r;
}

void require_valid(const ModelParams& p, const LocalIntensity& li) {
  auto r = validate_params(p, li);
  if (!r.ok()) throw DomainError("model parameters " + r.to_string());
}

}  // namespace sli
