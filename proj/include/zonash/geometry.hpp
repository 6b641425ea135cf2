// Copyright 2026 The zonash Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZONASH_GEOMETRY_HPP_
#define ZONASH_GEOMETRY_HPP_

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "zonash/common.hpp"
#include "zonash/rng.hpp"

namespace zonash {

// Compact convex feasible set with a closed-form Euclidean projection.
// Only axis-aligned boxes and Euclidean balls are supported; both project
// exactly (componentwise clamp / radial rescale), so no inner solver is
// ever involved.
//
// Every set carries an interior anchor point. shrink(rho) scales the set
// by (1 - rho) about that anchor, which keeps the shrunk set inside the
// original one regardless of where the set sits relative to the origin.
class ConvexSet {
 public:
  enum class Kind { kBox, kBall };

  static ConvexSet box(Vector lower, Vector upper) {
    Vector anchor = 0.5 * (lower + upper);
    return box(std::move(lower), std::move(upper), std::move(anchor));
  }

  static ConvexSet box(Vector lower, Vector upper, Vector anchor) {
    ZN_REQUIRE(lower.size() == upper.size() && lower.size() == anchor.size(),
               "box: lower/upper/anchor dimensions differ");
    ZN_REQUIRE(lower.size() > 0, "box: empty dimension");
    for (Eigen::Index k = 0; k < lower.size(); ++k) {
      ZN_REQUIRE(lower[k] < upper[k],
                 "box: lower < upper required in coordinate " +
                     std::to_string(k));
      ZN_REQUIRE(anchor[k] > lower[k] && anchor[k] < upper[k],
                 "box: anchor must be strictly inside in coordinate " +
                     std::to_string(k));
    }
    ConvexSet s;
    s.kind_ = Kind::kBox;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    s.anchor_ = std::move(anchor);
    return s;
  }

  static ConvexSet ball(Vector center, double radius) {
    Vector anchor = center;
    return ball(std::move(center), radius, std::move(anchor));
  }

  static ConvexSet ball(Vector center, double radius, Vector anchor) {
    ZN_REQUIRE(center.size() > 0, "ball: empty dimension");
    ZN_REQUIRE(radius > 0.0, "ball: radius must be positive");
    ZN_REQUIRE(center.size() == anchor.size(),
               "ball: center/anchor dimensions differ");
    ZN_REQUIRE((anchor - center).norm() < radius,
               "ball: anchor must be strictly inside");
    ConvexSet s;
    s.kind_ = Kind::kBall;
    s.center_ = std::move(center);
    s.radius_ = radius;
    s.anchor_ = std::move(anchor);
    return s;
  }

  Kind kind() const { return kind_; }
  int dim() const {
    return static_cast<int>(kind_ == Kind::kBox ? lower_.size()
                                                : center_.size());
  }
  const Vector& anchor() const { return anchor_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

  // Euclidean-nearest feasible point. Box membership of the result is exact;
  // ball membership is exact up to one rounding of the radial rescale.
  Vector project(const Vector& x) const {
    check_dim(x);
    ZN_REQUIRE(x.allFinite(), "project: input has non-finite entries");
    if (kind_ == Kind::kBox) {
      return x.cwiseMax(lower_).cwiseMin(upper_);
    }
    const Vector delta = x - center_;
    const double norm = delta.norm();
    if (norm <= radius_) return x;
    // Nudge the scale down until the recomputed norm passes the membership
    // test, so projecting twice is a bitwise no-op.
    double scale = radius_ / norm;
    Vector p = center_ + delta * scale;
    while ((p - center_).norm() > radius_) {
      scale = std::nextafter(scale, 0.0);
      p = center_ + delta * scale;
    }
    return p;
  }

  // Scales the set by (1 - rho) about its anchor. rho = 0 is the identity;
  // the result is always a subset of the original set.
  ConvexSet shrink(double rho) const {
    ZN_REQUIRE(rho >= 0.0 && rho < 1.0, "shrink: rho must lie in [0, 1)");
    const double scale = 1.0 - rho;
    ConvexSet s = *this;
    if (kind_ == Kind::kBox) {
      s.lower_ = anchor_ + scale * (lower_ - anchor_);
      s.upper_ = anchor_ + scale * (upper_ - anchor_);
    } else {
      s.center_ = anchor_ + scale * (center_ - anchor_);
      s.radius_ = scale * radius_;
    }
    return s;
  }

  // Membership up to tol in each defining inequality.
  bool contains(const Vector& x, double tol = 0.0) const {
    check_dim(x);
    ZN_REQUIRE(tol >= 0.0, "contains: tol must be non-negative");
    if (kind_ == Kind::kBox) {
      for (Eigen::Index k = 0; k < lower_.size(); ++k) {
        if (x[k] < lower_[k] - tol || x[k] > upper_[k] + tol) return false;
      }
      return true;
    }
    return (x - center_).norm() <= radius_ + tol;
  }

  double diameter() const {
    if (kind_ == Kind::kBox) return (upper_ - lower_).norm();
    return 2.0 * radius_;
  }

  // Euclidean distance from x to the set (zero inside).
  double distance(const Vector& x) const { return (x - project(x)).norm(); }

  Vector sample_uniform(KeyedRng& rng) const {
    if (kind_ == Kind::kBox) {
      Vector x(lower_.size());
      for (Eigen::Index k = 0; k < lower_.size(); ++k) {
        x[k] = lower_[k] + (upper_[k] - lower_[k]) * rng.uniform01();
      }
      return x;
    }
    // Direction from an isotropic Gaussian, radius from the volume CDF.
    const int d = dim();
    Vector z = rng.normal_vector(d);
    double norm = z.norm();
    while (norm == 0.0) {
      z = rng.normal_vector(d);
      norm = z.norm();
    }
    const double r = radius_ * std::pow(rng.uniform01(), 1.0 / d);
    return center_ + z * (r / norm);
  }

 private:
  ConvexSet() = default;

  void check_dim(const Vector& x) const {
    ZN_REQUIRE(x.size() == dim(),
               "dimension mismatch: expected " + std::to_string(dim()) +
                   ", got " + std::to_string(x.size()));
  }

  Kind kind_ = Kind::kBox;
  Vector lower_, upper_;    // box
  Vector center_;           // ball
  double radius_ = 0.0;     // ball
  Vector anchor_;
};

// Cartesian product of per-player sets. Projection, shrinkage and
// membership all factorize blockwise.
class ProductSet {
 public:
  explicit ProductSet(std::vector<ConvexSet> factors)
      : factors_(std::move(factors)) {
    ZN_REQUIRE(!factors_.empty(), "product set needs at least one factor");
    offsets_.reserve(factors_.size() + 1);
    offsets_.push_back(0);
    for (const ConvexSet& f : factors_) {
      offsets_.push_back(offsets_.back() + f.dim());
    }
  }

  int num_factors() const { return static_cast<int>(factors_.size()); }
  int dim() const { return offsets_.back(); }
  const ConvexSet& factor(int i) const { return factors_.at(i); }
  int offset(int i) const { return offsets_.at(i); }
  int factor_dim(int i) const { return factors_.at(i).dim(); }

  Vector project(const Vector& x) const {
    check_dim(x);
    Vector out(dim());
    for (int i = 0; i < num_factors(); ++i) {
      out.segment(offsets_[i], factor_dim(i)) =
          factors_[i].project(x.segment(offsets_[i], factor_dim(i)));
    }
    return out;
  }

  ProductSet shrink(double rho) const {
    std::vector<ConvexSet> shrunk;
    shrunk.reserve(factors_.size());
    for (const ConvexSet& f : factors_) shrunk.push_back(f.shrink(rho));
    return ProductSet(std::move(shrunk));
  }

  bool contains(const Vector& x, double tol = 0.0) const {
    check_dim(x);
    for (int i = 0; i < num_factors(); ++i) {
      if (!factors_[i].contains(x.segment(offsets_[i], factor_dim(i)), tol)) {
        return false;
      }
    }
    return true;
  }

  Vector anchor() const {
    Vector a(dim());
    for (int i = 0; i < num_factors(); ++i) {
      a.segment(offsets_[i], factor_dim(i)) = factors_[i].anchor();
    }
    return a;
  }

  double diameter() const {
    double sq = 0.0;
    for (const ConvexSet& f : factors_) sq += f.diameter() * f.diameter();
    return std::sqrt(sq);
  }

  double distance(const Vector& x) const { return (x - project(x)).norm(); }

  Vector sample_uniform(KeyedRng& rng) const {
    Vector x(dim());
    for (int i = 0; i < num_factors(); ++i) {
      x.segment(offsets_[i], factor_dim(i)) = factors_[i].sample_uniform(rng);
    }
    return x;
  }

 private:
  void check_dim(const Vector& x) const {
    ZN_REQUIRE(x.size() == dim(),
               "dimension mismatch: expected " + std::to_string(dim()) +
                   ", got " + std::to_string(x.size()));
  }

  std::vector<ConvexSet> factors_;
  std::vector<int> offsets_;
};

}  // namespace zonash

#endif  // ZONASH_GEOMETRY_HPP_
