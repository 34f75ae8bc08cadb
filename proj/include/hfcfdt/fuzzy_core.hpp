#pragma once

// Mamdani inference primitives: trapezoidal membership functions,
// linguistic variables, and piecewise-linear fuzzy sets with exact
// min-clipping, max-aggregation and centre-of-gravity defuzzification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hfcfdt/errors.hpp"

namespace hfcfdt::fuzzy {

enum class Shape { Trapezoid, Triangle };

/// Trapezoid (a, b, c, d): zero outside [a, d], one on [b, c], linear on
/// the two edges. A triangle is the b == c case. Vertical edges (a == b or
/// c == d) are allowed and take the plateau value at the jump.
class MembershipFunction {
 public:
  constexpr MembershipFunction() = default;

  static MembershipFunction trapezoid(double a, double b, double c, double d) {
    return MembershipFunction(Shape::Trapezoid, a, b, c, d);
  }

  static MembershipFunction triangle(double a, double peak, double c) {
    return MembershipFunction(Shape::Triangle, a, peak, peak, c);
  }

  /// Symmetric triangle centred at `center`.
  static MembershipFunction symmetric_triangle(double center, double half_width) {
    return triangle(center - half_width, center, center + half_width);
  }

  double operator()(double x) const noexcept {
    if (!(x >= a_ && x <= d_)) return 0.0;
    if (x >= b_ && x <= c_) return 1.0;
    if (x < b_) return (x - a_) / (b_ - a_);
    return (d_ - x) / (d_ - c_);
  }

  Shape shape() const noexcept { return shape_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }

  friend bool operator==(const MembershipFunction&, const MembershipFunction&) = default;

 private:
  MembershipFunction(Shape shape, double a, double b, double c, double d)
      : shape_(shape), a_(a), b_(b), c_(c), d_(d) {
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d))) {
      throw ConfigError("membership breakpoints must be finite");
    }
    if (!(a <= b && b <= c && c <= d)) {
      throw ConfigError("membership breakpoints must satisfy a <= b <= c <= d");
    }
  }

  Shape shape_ = Shape::Trapezoid;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0, d_ = 0.0;
};

struct Term {
  std::string label;
  MembershipFunction mf;
};

class LinguisticVariable {
 public:
  LinguisticVariable() = default;

  LinguisticVariable(std::string name, double lo, double hi, std::vector<Term> terms, bool ruspini)
      : name_(std::move(name)), lo_(lo), hi_(hi), terms_(std::move(terms)), ruspini_(ruspini) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      throw ConfigError("variable '" + name_ + "': universe must be a finite interval lo < hi");
    }
    if (terms_.empty()) throw ConfigError("variable '" + name_ + "' has no terms");
  }

  /// Evenly spaced triangles whose peaks span [lo, hi]; neighbouring peaks
  /// are one spacing apart, so degrees sum to one on the universe.
  static LinguisticVariable uniform_triangles(std::string name, double lo, double hi,
                                              const std::vector<std::string>& labels) {
    if (labels.size() < 2) throw ConfigError("uniform partition needs at least two terms");
    const double spacing = (hi - lo) / static_cast<double>(labels.size() - 1);
    std::vector<Term> terms;
    terms.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const double center = lo + spacing * static_cast<double>(i);
      terms.push_back({labels[i], MembershipFunction::symmetric_triangle(center, spacing)});
    }
    return LinguisticVariable(std::move(name), lo, hi, std::move(terms), true);
  }

  const std::string& name() const noexcept { return name_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool ruspini() const noexcept { return ruspini_; }

  double clamp(double x) const noexcept { return std::clamp(x, lo_, hi_); }

  /// Degrees aligned with terms(); the input is clamped to the universe.
  std::vector<double> fuzzify(double x) const {
    const double xc = clamp(x);
    std::vector<double> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.mf(xc));
    return out;
  }

  std::optional<std::size_t> index_of(std::string_view label) const noexcept {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (terms_[i].label == label) return i;
    }
    return std::nullopt;
  }

  /// Largest |sum of degrees - 1| over `samples` uniform universe points.
  double partition_defect(std::size_t samples) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double x = sample_point(i, samples);
      double sum = 0.0;
      for (const auto& t : terms_) sum += t.mf(x);
      worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
  }

  /// True when every sampled universe point has some term with degree > 0.
  bool covers(std::size_t samples) const {
    for (std::size_t i = 0; i < samples; ++i) {
      const double x = sample_point(i, samples);
      const bool hit = std::any_of(terms_.begin(), terms_.end(), [x](const Term& t) { return t.mf(x) > 0.0; });
      if (!hit) return false;
    }
    return true;
  }

 private:
  double sample_point(std::size_t i, std::size_t n) const noexcept {
    if (n < 2) return lo_;
    return lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(n - 1);
  }

  std::string name_;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<Term> terms_;
  bool ruspini_ = false;
};

struct Point {
  double x;
  double mu;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Piecewise-linear degree function given by breakpoints sorted by x.
/// Two consecutive points with equal x encode a vertical jump. The degree
/// is zero outside [front().x, back().x].
class FuzzySet {
 public:
  FuzzySet() = default;

  explicit FuzzySet(std::vector<Point> points) : pts_(std::move(points)) {
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const auto& p = pts_[i];
      if (!std::isfinite(p.x) || !(p.mu >= 0.0 && p.mu <= 1.0)) {
        throw ConfigError("fuzzy set breakpoint out of range");
      }
      if (i > 0 && p.x < pts_[i - 1].x) throw ConfigError("fuzzy set breakpoints must be sorted");
    }
    compact();
  }

  static FuzzySet from(const MembershipFunction& mf) {
    return FuzzySet({{mf.a(), 0.0}, {mf.b(), 1.0}, {mf.c(), 1.0}, {mf.d(), 0.0}});
  }

  const std::vector<Point>& points() const noexcept { return pts_; }
  friend bool operator==(const FuzzySet&, const FuzzySet&) = default;
  bool empty() const noexcept { return !(area() > 0.0); }

  /// Degree at x; at a jump the larger side is reported.
  double operator()(double x) const noexcept {
    if (pts_.empty() || x < pts_.front().x || x > pts_.back().x) return 0.0;
    double best = 0.0;
    for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
      const auto& p = pts_[k];
      const auto& q = pts_[k + 1];
      if (x < p.x || x > q.x) continue;
      if (p.x == q.x) {
        best = std::max({best, p.mu, q.mu});
      } else {
        best = std::max(best, p.mu + (q.mu - p.mu) * (x - p.x) / (q.x - p.x));
      }
    }
    if (pts_.size() == 1 && x == pts_.front().x) best = pts_.front().mu;
    return best;
  }

  /// Pointwise min(this, level).
  FuzzySet clipped(double level) const {
    if (!(level > 0.0) || pts_.empty()) return {};
    if (level >= 1.0) return *this;
    std::vector<Point> out;
    out.reserve(pts_.size() * 2);
    for (std::size_t k = 0; k < pts_.size(); ++k) {
      const auto& p = pts_[k];
      if (k > 0) {
        const auto& prev = pts_[k - 1];
        if (prev.x < p.x && (prev.mu - level) * (p.mu - level) < 0.0) {
          const double t = (level - prev.mu) / (p.mu - prev.mu);
          out.push_back({prev.x + t * (p.x - prev.x), level});
        }
      }
      out.push_back({p.x, std::min(p.mu, level)});
    }
    return FuzzySet(std::move(out));
  }

  double area() const noexcept {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
      total += 0.5 * (pts_[k + 1].x - pts_[k].x) * (pts_[k].mu + pts_[k + 1].mu);
    }
    return total;
  }

  /// Exact centre of gravity, or nullopt when the set has no area.
  std::optional<double> centroid() const noexcept {
    if (pts_.empty()) return std::nullopt;
    const double ref = 0.5 * (pts_.front().x + pts_.back().x);
    double mass = 0.0;
    double moment = 0.0;
    for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
      const double x0 = pts_[k].x - ref;
      const double x1 = pts_[k + 1].x - ref;
      const double m0 = pts_[k].mu;
      const double m1 = pts_[k + 1].mu;
      const double w = x1 - x0;
      mass += 0.5 * w * (m0 + m1);
      moment += w / 6.0 * (x0 * (2.0 * m0 + m1) + x1 * (m0 + 2.0 * m1));
    }
    if (!(mass > 0.0)) return std::nullopt;
    return ref + moment / mass;
  }

  /// Smallest and largest x where the degree is positive.
  std::optional<std::pair<double, double>> support() const noexcept {
    std::optional<double> lo, hi;
    for (std::size_t k = 0; k < pts_.size(); ++k) {
      const bool positive_here = pts_[k].mu > 0.0;
      const bool positive_left = k > 0 && pts_[k - 1].mu > 0.0 && pts_[k - 1].x < pts_[k].x;
      const bool positive_right = k + 1 < pts_.size() && pts_[k + 1].mu > 0.0 && pts_[k + 1].x > pts_[k].x;
      if (positive_here || positive_left || positive_right) {
        if (!lo) lo = pts_[k].x;
        hi = pts_[k].x;
      }
    }
    if (!lo) return std::nullopt;
    return std::pair{*lo, *hi};
  }

 private:
  friend FuzzySet aggregate(std::span<const FuzzySet> sets);

  // Left and right limits of the degree on an open interval that contains
  // no breakpoint of this set.
  std::pair<double, double> limits_on(double p, double q) const noexcept {
    if (pts_.size() < 2 || p < pts_.front().x || q > pts_.back().x) return {0.0, 0.0};
    auto it = std::upper_bound(pts_.begin(), pts_.end(), p, [](double v, const Point& pt) { return v < pt.x; });
    if (it == pts_.begin() || it == pts_.end()) return {0.0, 0.0};
    const Point& hiPt = *it;
    const Point& loPt = *(it - 1);
    const double span = hiPt.x - loPt.x;
    const double slope = (hiPt.mu - loPt.mu) / span;
    return {loPt.mu + slope * (p - loPt.x), loPt.mu + slope * (q - loPt.x)};
  }

  void compact() {
    std::vector<Point> out;
    out.reserve(pts_.size());
    for (const auto& p : pts_) {
      if (!out.empty() && out.back() == p) continue;
      // Collapse runs of three or more points at the same x to the outer two.
      if (out.size() >= 2 && out[out.size() - 1].x == p.x && out[out.size() - 2].x == p.x) {
        out.back() = p;
        continue;
      }
      out.push_back(p);
    }
    // Trim zero-degree padding at both ends.
    std::size_t first = 0;
    while (first + 1 < out.size() && out[first].mu == 0.0 && out[first + 1].mu == 0.0) ++first;
    std::size_t last = out.size();
    while (last >= first + 2 && out[last - 1].mu == 0.0 && out[last - 2].mu == 0.0) --last;
    pts_.assign(out.begin() + static_cast<std::ptrdiff_t>(first), out.begin() + static_cast<std::ptrdiff_t>(last));
    if (pts_.size() == 1 && pts_.front().mu == 0.0) pts_.clear();
  }

  std::vector<Point> pts_;
};

inline FuzzySet clip(const MembershipFunction& mf, double level) { return FuzzySet::from(mf).clipped(level); }

/// Pointwise maximum. Crossing points between overlapping linear pieces are
/// inserted so the result is exact.
inline FuzzySet aggregate(std::span<const FuzzySet> sets) {
  std::vector<double> xs;
  for (const auto& s : sets) {
    for (const auto& p : s.pts_) xs.push_back(p.x);
  }
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Point> out;
  auto push = [&out](double x, double mu) {
    if (!out.empty() && out.back().x == x && out.back().mu == mu) return;
    out.push_back({x, mu});
  };

  std::vector<std::pair<double, double>> lines(sets.size());
  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double p = xs[i];
    const double q = xs[i + 1];
    double left = 0.0;
    double right = 0.0;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      lines[j] = sets[j].limits_on(p, q);
      left = std::max(left, lines[j].first);
      right = std::max(right, lines[j].second);
    }
    cuts.clear();
    for (std::size_t j = 0; j < sets.size(); ++j) {
      for (std::size_t k = j + 1; k < sets.size(); ++k) {
        const double d0 = lines[j].first - lines[k].first;
        const double d1 = lines[j].second - lines[k].second;
        if (d0 * d1 < 0.0) cuts.push_back(p + (q - p) * d0 / (d0 - d1));
      }
    }
    std::sort(cuts.begin(), cuts.end());
    push(p, left);
    for (double t : cuts) {
      if (!(t > p && t < q)) continue;
      double best = 0.0;
      for (const auto& [l0, l1] : lines) best = std::max(best, l0 + (l1 - l0) * (t - p) / (q - p));
      push(t, best);
    }
    push(q, right);
  }
  for (auto& pt : out) pt.mu = std::clamp(pt.mu, 0.0, 1.0);
  return FuzzySet(std::move(out));
}

inline FuzzySet aggregate(std::initializer_list<FuzzySet> sets) {
  return aggregate(std::span<const FuzzySet>(sets.begin(), sets.size()));
}

}  // namespace hfcfdt::fuzzy
