#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaugeforge/numerics.hpp"

namespace gaugeforge {

enum class BaseKind { U1, SU2, SO3, O2 };

std::string_view to_string(BaseKind kind);

// Element of the Lie algebra of a matrix group: anti-Hermitian (and traceless
// for SU2) or real antisymmetric.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(Matrix m) : m_(std::move(m)) {}

  const Matrix& matrix() const { return m_; }

  AlgebraElement operator+(const AlgebraElement& o) const { return AlgebraElement(m_ + o.m_); }
  AlgebraElement operator-(const AlgebraElement& o) const { return AlgebraElement(m_ - o.m_); }
  AlgebraElement operator-() const { return AlgebraElement(-m_); }
  AlgebraElement operator*(double s) const { return AlgebraElement(m_ * s); }
  friend AlgebraElement operator*(double s, const AlgebraElement& x) { return x * s; }

 private:
  Matrix m_;
};

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);
double norm(const AlgebraElement& x);
double distance(const AlgebraElement& a, const AlgebraElement& b);

// Element of K = K_base x Z_order. `label` is the residue of the cyclic
// factor; the O2 reflection component is read off the determinant.
class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(BaseKind kind, Matrix m, int label = 0, int order = 1);

  BaseKind kind() const { return kind_; }
  const Matrix& matrix() const { return m_; }
  int cyclic_label() const { return label_; }
  int cyclic_order() const { return order_; }

  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;

 private:
  BaseKind kind_ = BaseKind::U1;
  Matrix m_;
  int label_ = 0;
  int order_ = 1;
};

// Operator-norm distance of the matrices; infinite across components of the
// cyclic factor.
double distance(const GroupElement& a, const GroupElement& b);

// Nearest group element to an arbitrary matrix (polar projection for the
// orthogonal groups, normalisation for U1 and SU2).
GroupElement project_to_group(BaseKind kind, const Matrix& m, int label, int order);

// Weighted sum of group-valued samples followed by re-projection.
GroupElement interpolate_group(std::span<const double> w,
                               std::span<const GroupElement* const> nodes);

// Class in pi_0(K) = (Z_2 for O2) x Z_order.
class Pi0Class {
 public:
  Pi0Class() = default;
  Pi0Class(bool has_reflection, int reflection, int cyclic, int order);

  bool is_trivial() const { return reflection_ == 0 && cyclic_ == 0; }
  int reflection() const { return reflection_; }
  int cyclic() const { return cyclic_; }
  int order() const { return order_; }
  bool has_reflection() const { return has_reflection_; }

  Pi0Class compose(const Pi0Class& o) const;
  Pi0Class inverse() const;
  bool operator==(const Pi0Class& o) const = default;

  // Number of elements of pi_0(K).
  int group_size() const { return (has_reflection_ ? 2 : 1) * order_; }
  std::string to_string() const;

 private:
  bool has_reflection_ = false;
  int reflection_ = 0;
  int cyclic_ = 0;
  int order_ = 1;
};

class StructureGroup {
 public:
  static constexpr double kDefaultChartRadius = 2.8;

  explicit StructureGroup(BaseKind base, int cyclic_order = 1,
                          double chart_radius = kDefaultChartRadius);

  // "U1", "SU2", "SO3", "O2" and "<base>xZ<m>".
  static StructureGroup parse(std::string_view name);

  BaseKind base() const { return base_; }
  int cyclic_order() const { return order_; }
  double chart_radius() const { return chart_radius_; }
  int matrix_dim() const;
  int algebra_dim() const;
  bool is_abelian() const { return base_ == BaseKind::U1; }
  bool has_reflection() const { return base_ == BaseKind::O2; }
  std::string name() const;

  GroupElement identity() const;
  GroupElement reflection() const;  // diag(1,-1); O2 only
  GroupElement element(const Matrix& m, int label = 0) const;  // validated
  GroupElement cyclic_generator() const;

  AlgebraElement zero() const;
  AlgebraElement algebra_element(const Matrix& m) const;  // validated
  // Coordinates: theta for U1/O2, (v_x, v_y, v_z) with x = i v.sigma for SU2,
  // the rotation vector for SO3.
  AlgebraElement from_coords(std::span<const double> c) const;
  std::vector<double> coords(const AlgebraElement& x) const;

  GroupElement exp(const AlgebraElement& x) const;
  AlgebraElement log(const GroupElement& k) const;
  AlgebraElement ad(const GroupElement& k, const AlgebraElement& x) const;
  Pi0Class component_class(const GroupElement& k) const;

  // Residual of the defining relations (unitarity/orthogonality, determinant,
  // label consistency).
  double membership_residual(const GroupElement& k) const;
  double algebra_residual(const AlgebraElement& x) const;
  AlgebraElement project_to_algebra(const Matrix& m) const;

  bool contains(const GroupElement& k) const;
  bool operator==(const StructureGroup& o) const {
    return base_ == o.base_ && order_ == o.order_;
  }

 private:
  void check_kind(const GroupElement& k) const;

  BaseKind base_;
  int order_;
  double chart_radius_;
};

// Random algebra element with norm below `radius`, and random group element
// (any component).
AlgebraElement random_algebra(const StructureGroup& group, Rng& rng, double radius);
GroupElement random_element(const StructureGroup& group, Rng& rng);

// gamma(t)^{-1} gamma'(t) at sample `index` of a uniformly sampled path with
// spacing h; fourth-order differences, one-sided near the ends of an open
// path.
AlgebraElement left_log_derivative(const StructureGroup& group,
                                   std::span<const GroupElement> path, double h,
                                   int index, bool periodic);

}  // namespace gaugeforge
