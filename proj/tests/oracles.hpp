#pragma once

// Independent reference implementations used by the tests. Nothing in here
// calls into the library's inference code: memberships are re-derived from
// raw breakpoints and integrals are taken numerically.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Trapezoid degree from raw breakpoints; vertical edges take the plateau.
inline double trap(double a, double b, double c, double d, double x) {
  if (x < a || x > d) return 0.0;
  if (x >= b && x <= c) return 1.0;
  if (x < b) return (x - a) / (b - a);
  return (d - x) / (d - c);
}

inline double tri(double center, double half_width, double x) {
  return trap(center - half_width, center, center, center + half_width, x);
}

struct Moments {
  double area = 0.0;
  double moment = 0.0;
  double centroid() const { return moment / area; }
};

/// Composite trapezoidal rule over [lo, hi] with `panels` panels.
inline Moments integrate(const std::function<double(double)>& f, double lo, double hi, std::size_t panels = 100000) {
  const double h = (hi - lo) / static_cast<double>(panels);
  Moments m;
  for (std::size_t i = 0; i <= panels; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double w = (i == 0 || i == panels) ? 0.5 : 1.0;
    const double y = f(x);
    m.area += w * y * h;
    m.moment += w * x * y * h;
  }
  return m;
}

/// Mamdani channel: each (center, degree) contributes a triangle clipped at
/// its degree; pointwise max; numeric centroid.
inline double mamdani_triangles(const std::vector<double>& centers, const std::vector<double>& degrees,
                                double half_width) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (degrees[i] <= 0.0) continue;
    lo = std::min(lo, centers[i] - half_width);
    hi = std::max(hi, centers[i] + half_width);
  }
  auto f = [&](double x) {
    double best = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      best = std::max(best, std::min(degrees[i], tri(centers[i], half_width, x)));
    }
    return best;
  };
  return integrate(f, lo, hi).centroid();
}

inline constexpr std::array<const char*, 7> kTerms = {"NL", "NM", "NS", "ZO", "PS", "PM", "PL"};

/// The base controller rule table transcribed as text: rows e-dot PL..NL, columns e NL..PL.
inline constexpr std::array<const char*, 5> kTableRows = {
    "PL: NM NS NS PS PM PL PL",
    "PS: NL NM NS ZO PM PL PL",
    "ZO: NL NM NS ZO PS PM PL",
    "NS: NL NL NM ZO PS PM PL",
    "NL: NL NL NM NS PS PS PM",
};

inline int term_index(const std::string& s) {
  for (std::size_t i = 0; i < kTerms.size(); ++i) {
    if (s == kTerms[i]) return static_cast<int>(i);
  }
  return -1;
}

/// table[edot_row][e_col] as indices into kTerms, edot rows ordered PL..NL.
inline std::array<std::array<int, 7>, 5> rule_table() {
  std::array<std::array<int, 7>, 5> out{};
  for (std::size_t r = 0; r < 5; ++r) {
    std::string line = kTableRows[r];
    std::size_t pos = line.find(':') + 1;
    for (std::size_t c = 0; c < 7; ++c) {
      while (line[pos] == ' ') ++pos;
      out[r][c] = term_index(line.substr(pos, 2));
      pos += 2;
    }
  }
  return out;
}

/// Evenly spaced triangle peaks on [-1, 1].
inline double uniform_peak(std::size_t i, std::size_t n) { return -1.0 + 2.0 * static_cast<double>(i) / (n - 1.0); }

/// Dense-grid Mamdani evaluation of the base controller: 7 e terms, 5 e-dot
/// terms (PL at the top row means the highest peak), 7 output triangles.
inline double bfc(double e, double edot) {
  e = std::clamp(e, -1.0, 1.0);
  edot = std::clamp(edot, -1.0, 1.0);
  const auto table = rule_table();
  std::array<double, 7> strength{};
  for (std::size_t c = 0; c < 7; ++c) {
    const double de = tri(uniform_peak(c, 7), 2.0 / 6.0, e);
    for (std::size_t r = 0; r < 5; ++r) {
      const double dr = tri(uniform_peak(4 - r, 5), 2.0 / 4.0, edot);
      const auto out = static_cast<std::size_t>(table[r][c]);
      strength[out] = std::max(strength[out], std::min(de, dr));
    }
  }
  auto f = [&](double x) {
    double best = 0.0;
    for (std::size_t k = 0; k < 7; ++k) best = std::max(best, std::min(strength[k], tri(uniform_peak(k, 7), 2.0 / 6.0, x)));
    return best;
  };
  return integrate(f, -4.0 / 3.0, 4.0 / 3.0).centroid();
}

/// Lloyd-free exhaustive k-means in 1-D: tries every contiguous split of the
/// sorted values and keeps the one with the smallest within-cluster sum of
/// squares. Returns (max, min) extents per cluster in order.
inline std::vector<std::array<double, 2>> kmeans_extents(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  auto sse = [&](std::size_t i, std::size_t j) {
    double mean = 0.0;
    for (std::size_t t = i; t < j; ++t) mean += v[t];
    mean /= static_cast<double>(j - i);
    double s = 0.0;
    for (std::size_t t = i; t < j; ++t) s += (v[t] - mean) * (v[t] - mean);
    return s;
  };
  double best = 1e300;
  std::vector<std::size_t> best_cuts;
  std::vector<std::size_t> cuts(k - 1);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t start) {
    if (depth == k - 1) {
      double total = 0.0;
      std::size_t prev = 0;
      for (std::size_t c : cuts) {
        total += sse(prev, c);
        prev = c;
      }
      total += sse(prev, n);
      if (total < best - 1e-15) {
        best = total;
        best_cuts = cuts;
      }
      return;
    }
    for (std::size_t c = start + 1; c + (k - 1 - depth) <= n; ++c) {
      cuts[depth] = c;
      rec(depth + 1, c);
    }
  };
  rec(0, 0);
  std::vector<std::array<double, 2>> out;
  std::size_t prev = 0;
  best_cuts.push_back(n);
  for (std::size_t c : best_cuts) {
    out.push_back({v[prev], v[c - 1]});
    prev = c;
  }
  return out;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Rect {
  double cx, cy, hl, hw, angle;

  bool contains(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    const double u = dx * std::cos(angle) + dy * std::sin(angle);
    const double v = -dx * std::sin(angle) + dy * std::cos(angle);
    return std::abs(u) <= hl && std::abs(v) <= hw;
  }

  /// Point at perimeter fraction t in [0, 1).
  std::array<double, 2> boundary(double t) const {
    const double per = 4.0 * (hl + hw);
    double s = t * per;
    double u, v;
    if (s < 2 * hl) {
      u = -hl + s, v = -hw;
    } else if ((s -= 2 * hl) < 2 * hw) {
      u = hl, v = -hw + s;
    } else if ((s -= 2 * hw) < 2 * hl) {
      u = hl - s, v = hw;
    } else {
      s -= 2 * hl;
      u = -hl, v = hw - s;
    }
    return {cx + u * std::cos(angle) - v * std::sin(angle), cy + u * std::sin(angle) + v * std::cos(angle)};
  }
};

/// Overlap by boundary sampling: two rectangles intersect iff a boundary
/// point of one lies in the other (containment included, since a contained
/// rectangle's boundary lies inside the other).
inline bool sampled_overlap(const Rect& a, const Rect& b, std::size_t points = 10000) {
  const std::size_t per = points / 2;
  for (std::size_t i = 0; i < per; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(per);
    const auto p = a.boundary(t);
    if (b.contains(p[0], p[1])) return true;
    const auto q = b.boundary(t);
    if (a.contains(q[0], q[1])) return true;
  }
  return false;
}

}  // namespace oracle
