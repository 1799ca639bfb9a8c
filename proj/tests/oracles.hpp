#pragma once

// Reference implementations used as test oracles. They are written straight
// from the textbook formulas and share no code with the library.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kR = 6371008.8;

struct Pt {
  double x, y;
};

struct Site {
  Pt c;
  double h;
};

// Equirectangular forward map about (lat0, lon0), degrees in, meters out.
inline Pt project(double lat, double lon, double lat0, double lon0) {
  const double k = kPi / 180.0;
  return {kR * (lon - lon0) * k * std::cos(lat0 * k), kR * (lat - lat0) * k};
}

inline double shoelace(const std::vector<Pt>& ring) {
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ring[i];
    const auto& b = ring[(i + 1) % n];
    s += a.x * b.y - b.x * a.y;
  }
  return std::abs(s) / 2.0;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double base_bandwidth(const std::vector<Pt>& pts, double floor = 100.0) {
  double mx = 0, my = 0;
  for (auto& p : pts) {
    mx += p.x;
    my += p.y;
  }
  mx /= pts.size();
  my /= pts.size();
  std::vector<double> d;
  double ss = 0;
  for (auto& p : pts) {
    const double dd = std::hypot(p.x - mx, p.y - my);
    d.push_back(dd);
    ss += dd * dd;
  }
  const double sd = std::sqrt(ss / pts.size());
  const double dm = median(d);
  const double bw = 0.9 * std::min(sd, std::sqrt(1.0 / std::log(2.0)) * dm) *
                    std::pow(static_cast<double>(pts.size()), -0.2);
  return std::max(floor, bw);
}

// Per-pixel brute force: every cell center against every site.
inline std::vector<double> kde(const std::vector<Site>& sites, double ox, double oy, double cell,
                               std::size_t rows, std::size_t cols) {
  std::vector<double> out(rows * cols, 0.0);
  const double w = 1.0 / sites.size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = ox + (c + 0.5) * cell;
      const double y = oy + (r + 0.5) * cell;
      double v = 0.0;
      for (const auto& s : sites) {
        const double d2 = (x - s.c.x) * (x - s.c.x) + (y - s.c.y) * (y - s.c.y);
        if (d2 < s.h * s.h) {
          const double u = 1.0 - d2 / (s.h * s.h);
          v += w * 3.0 / (kPi * s.h * s.h) * u * u;
        }
      }
      out[r * cols + c] = v;
    }
  }
  return out;
}

// Gi* from a dense weight matrix (self weight 1), the textbook form.
inline std::vector<double> gi_star(const std::vector<double>& x,
                                   const std::vector<std::vector<int>>& w) {
  const std::size_t n = x.size();
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double s2 = 0;
  for (double v : x) s2 += v * v;
  const double s = std::sqrt(s2 / n - mean * mean);
  std::vector<double> z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double wx = 0, sw = 0, sw2 = 0;
    for (std::size_t j = 0; j < n; ++j) {
      wx += w[i][j] * x[j];
      sw += w[i][j];
      sw2 += w[i][j] * w[i][j];
    }
    const double den = s * std::sqrt((n * sw2 - sw * sw) / (n - 1.0));
    z[i] = den > 0 ? (wx - mean * sw) / den : 0.0;
  }
  return z;
}

// Winding number; nonzero means inside (for simple polygons).
inline int winding(Pt p, const std::vector<Pt>& ring) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt a = ring[i];
    const Pt b = ring[(i + 1) % n];
    const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && cross > 0) ++wn;
    } else if (b.y <= p.y && cross < 0) {
      --wn;
    }
  }
  return wn;
}

}  // namespace oracle
