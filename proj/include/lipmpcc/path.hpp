// Copyright 2026 The lipmpcc Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LIPMPCC_PATH_HPP
#define LIPMPCC_PATH_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lipmpcc/lip_model.hpp"

namespace lipmpcc {

struct PathEval {
  Vec2 point = Vec2::Zero();
  Vec2 d1 = Vec2::Zero(); // d point / d theta
  Vec2 d2 = Vec2::Zero();
  bool clamped = false;   // query was outside [0, theta_end]
};

namespace detail {

// Natural cubic spline on a strictly increasing knot sequence.
// Second derivatives at the knots come from the standard tridiagonal system.
class CubicSpline1d {
 public:
  CubicSpline1d() = default;
  CubicSpline1d(std::vector<double> t, std::vector<double> v)
      : t_(std::move(t)), v_(std::move(v)) {
    const int n = static_cast<int>(t_.size());
    if (n < 2) throw std::invalid_argument("spline needs >= 2 knots");
    m_.assign(n, 0.0);
    if (n > 2) {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n - 2, n - 2);
      Eigen::VectorXd r(n - 2);
      for (int i = 1; i < n - 1; ++i) {
        const double h0 = t_[i] - t_[i - 1];
        const double h1 = t_[i + 1] - t_[i];
        const int j = i - 1;
        if (j > 0) M(j, j - 1) = h0;
        M(j, j) = 2.0 * (h0 + h1);
        if (j < n - 3) M(j, j + 1) = h1;
        r(j) = 6.0 * ((v_[i + 1] - v_[i]) / h1 - (v_[i] - v_[i - 1]) / h0);
      }
      Eigen::VectorXd m = M.ldlt().solve(r);
      for (int i = 1; i < n - 1; ++i) m_[i] = m(i - 1);
    }
  }

  void eval(double t, double& v, double& d1, double& d2) const {
    const int n = static_cast<int>(t_.size());
    int i = static_cast<int>(std::upper_bound(t_.begin(), t_.end(), t) -
                             t_.begin()) - 1;
    i = std::clamp(i, 0, n - 2);
    const double h = t_[i + 1] - t_[i];
    const double a = (t_[i + 1] - t) / h;
    const double b = (t - t_[i]) / h;
    v = a * v_[i] + b * v_[i + 1] +
        ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    d1 = (v_[i + 1] - v_[i]) / h +
         h / 6.0 * ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]);
    d2 = a * m_[i] + b * m_[i + 1];
  }

 private:
  std::vector<double> t_;
  std::vector<double> v_;
  std::vector<double> m_; // second derivatives at knots
};

} // namespace detail

/// Parametric planar reference path y^d(theta) on Theta = [0, theta_end].
/// Lines and arcs are arc-length parametrized; splines use the cumulative
/// chord-length parameter of their waypoints.
class Path {
 public:
  enum class Kind { line, arc, spline };

  static Path line(const Vec2& start, const Vec2& end) {
    Path p;
    p.kind_ = Kind::line;
    const Vec2 d = end - start;
    const double len = d.norm();
    if (!(len > 0.0)) throw std::invalid_argument("line: zero length");
    p.theta_end_ = len;
    p.line_start_ = start;
    p.line_dir_ = d / len;
    return p;
  }

  /// Arc-length parametrized circular arc. sweep > 0 is counterclockwise.
  static Path arc(const Vec2& center, double radius, double start_angle,
                  double sweep) {
    Path p;
    p.kind_ = Kind::arc;
    if (!(radius > 0.0) || sweep == 0.0) {
      throw std::invalid_argument("arc: radius must be > 0, sweep nonzero");
    }
    p.theta_end_ = std::abs(sweep) * radius;
    p.arc_center_ = center;
    p.arc_radius_ = radius;
    p.arc_a0_ = start_angle;
    p.arc_sign_ = sweep > 0.0 ? 1.0 : -1.0;
    return p;
  }

  /// Natural cubic spline through waypoints, chord-length parametrized.
  static Path spline(const std::vector<Vec2>& waypoints) {
    Path p;
    p.kind_ = Kind::spline;
    const int n = static_cast<int>(waypoints.size());
    if (n < 2) throw std::invalid_argument("spline: need >= 2 waypoints");
    std::vector<double> t(n), xs(n), ys(n);
    t[0] = 0.0;
    for (int i = 0; i < n; ++i) {
      xs[i] = waypoints[i].x();
      ys[i] = waypoints[i].y();
      if (i > 0) {
        const double c = (waypoints[i] - waypoints[i - 1]).norm();
        if (!(c > 0.0)) throw std::invalid_argument("spline: repeated waypoint");
        t[i] = t[i - 1] + c;
      }
    }
    p.theta_end_ = t.back();
    p.knots_ = t;
    p.spline_x_ = detail::CubicSpline1d(t, xs);
    p.spline_y_ = detail::CubicSpline1d(t, ys);
    return p;
  }

  Kind kind() const { return kind_; }
  double theta_end() const { return theta_end_; }
  const std::vector<double>& knots() const { return knots_; }

  PathEval eval(double theta) const {
    PathEval out;
    double th = theta;
    if (th < 0.0 || th > theta_end_) {
      out.clamped = true;
      th = std::clamp(th, 0.0, theta_end_);
    }
    switch (kind_) {
      case Kind::line:
        out.point = line_start_ + th * line_dir_;
        out.d1 = line_dir_;
        out.d2 = Vec2::Zero();
        break;
      case Kind::arc: {
        const double ang = arc_a0_ + arc_sign_ * th / arc_radius_;
        const double c = std::cos(ang), s = std::sin(ang);
        out.point = arc_center_ + arc_radius_ * Vec2(c, s);
        out.d1 = arc_sign_ * Vec2(-s, c);
        out.d2 = -Vec2(c, s) / arc_radius_;
        break;
      }
      case Kind::spline: {
        double v, d1, d2;
        spline_x_.eval(th, v, d1, d2);
        out.point.x() = v;
        out.d1.x() = d1;
        out.d2.x() = d2;
        spline_y_.eval(th, v, d1, d2);
        out.point.y() = v;
        out.d1.y() = d1;
        out.d2.y() = d2;
        break;
      }
    }
    return out;
  }

  /// Tangent angle via two-argument arctangent.
  double slope(double theta) const {
    const PathEval e = eval(theta);
    if (std::abs(e.d1.x()) < 1e-12 && std::abs(e.d1.y()) < 1e-12) {
      throw std::domain_error("path slope: degenerate tangent");
    }
    return std::atan2(e.d1.y(), e.d1.x());
  }

  /// d slope / d theta = (x' y'' - y' x'') / |d1|^2.
  double slope_derivative(double theta) const {
    const PathEval e = eval(theta);
    const double n2 = e.d1.squaredNorm();
    return (e.d1.x() * e.d2.y() - e.d1.y() * e.d2.x()) / n2;
  }

  /// Closest-point parameter over [lo, hi]: coarse grid scan followed by
  /// Newton refinement. Ties break toward the smallest theta.
  double project(const Vec2& point, double lo, double hi) const {
    lo = std::clamp(lo, 0.0, theta_end_);
    hi = std::clamp(hi, 0.0, theta_end_);
    if (hi < lo) std::swap(lo, hi);
    const double span = hi - lo;
    if (span <= 0.0) return lo;

    int n = std::max(200, static_cast<int>(std::ceil(span / 0.05)));
    double best_t = lo;
    double best_c = (point - eval(lo).point).squaredNorm();
    for (int i = 1; i <= n; ++i) {
      const double t = lo + span * i / n;
      const double c = (point - eval(t).point).squaredNorm();
      if (c < best_c - 1e-15) {
        best_c = c;
        best_t = t;
      }
    }

    // Newton on f(t) = |point - y(t)|^2 within the winning grid cell.
    const double cell = span / n;
    const double tlo = std::max(lo, best_t - cell);
    const double thi = std::min(hi, best_t + cell);
    double t = best_t;
    for (int it = 0; it < 30; ++it) {
      const PathEval e = eval(t);
      const Vec2 r = point - e.point;
      const double g = -2.0 * r.dot(e.d1);
      const double h = 2.0 * (e.d1.squaredNorm() - r.dot(e.d2));
      if (!(h > 1e-14)) break;
      double tn = std::clamp(t - g / h, tlo, thi);
      if (std::abs(tn - t) < 1e-12) {
        t = tn;
        break;
      }
      t = tn;
    }
    if ((point - eval(t).point).squaredNorm() <= best_c) best_t = t;
    return best_t;
  }

  double project(const Vec2& point) const {
    return project(point, 0.0, theta_end_);
  }

 private:
  Kind kind_ = Kind::line;
  double theta_end_ = 1.0;
  // line
  Vec2 line_start_ = Vec2::Zero();
  Vec2 line_dir_ = Vec2::UnitX();
  // arc
  Vec2 arc_center_ = Vec2::Zero();
  double arc_radius_ = 1.0;
  double arc_a0_ = 0.0;
  double arc_sign_ = 1.0;
  // spline
  std::vector<double> knots_;
  detail::CubicSpline1d spline_x_;
  detail::CubicSpline1d spline_y_;
};

/// Shift angle by multiples of 2*pi so it is closest to the reference.
inline double unwrap_near(double angle, double reference) {
  const double two_pi = 2.0 * M_PI;
  double a = angle;
  while (a - reference > M_PI) a -= two_pi;
  while (a - reference < -M_PI) a += two_pi;
  return a;
}

} // namespace lipmpcc

#endif // LIPMPCC_PATH_HPP
