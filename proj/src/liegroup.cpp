#include "gaugeforge/liegroup.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "gaugeforge/error.hpp"

namespace gaugeforge {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix identity_matrix(int n) { return Matrix::Identity(n, n); }

Eigen::Matrix3d real3(const Matrix& m) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j).real();
  return r;
}

Matrix complex_of(const Eigen::Matrix3d& r) {
  Matrix m(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = r(i, j);
  return m;
}

Matrix skew3(double wx, double wy, double wz) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = -wz;
  m(0, 2) = wy;
  m(1, 0) = wz;
  m(1, 2) = -wx;
  m(2, 0) = -wy;
  m(2, 1) = wx;
  return m;
}

// x = i v.sigma
Matrix su2_algebra(double vx, double vy, double vz) {
  Matrix m(2, 2);
  m(0, 0) = Complex(0.0, vz);
  m(0, 1) = Complex(vy, vx);
  m(1, 0) = Complex(-vy, vx);
  m(1, 1) = Complex(0.0, -vz);
  return m;
}

// a + i b.sigma
Matrix su2_group(double a, double bx, double by, double bz) {
  Matrix m(2, 2);
  m(0, 0) = Complex(a, bz);
  m(0, 1) = Complex(by, bx);
  m(1, 0) = Complex(-by, bx);
  m(1, 1) = Complex(a, -bz);
  return m;
}

// Quaternion-like coordinates (a, b) of a matrix close to SU2.
std::array<double, 4> su2_coefficients(const Matrix& m) {
  return {0.5 * (m(0, 0).real() + m(1, 1).real()),
          0.5 * (m(0, 1).imag() + m(1, 0).imag()),
          0.5 * (m(0, 1).real() - m(1, 0).real()),
          0.5 * (m(0, 0).imag() - m(1, 1).imag())};
}

double sinc(double t) {
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0 + t * t * t * t / 120.0;
  return std::sin(t) / t;
}

// (1 - cos t) / t^2
double cosc(double t) {
  if (std::abs(t) < 1e-4) return 0.5 - t * t / 24.0 + t * t * t * t / 720.0;
  return (1.0 - std::cos(t)) / (t * t);
}

double imag_norm(const Matrix& m) { return op_norm(Matrix(m.imag().cast<Complex>())); }

}  // namespace

std::string_view to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::U1:
      return "U1";
    case BaseKind::SU2:
      return "SU2";
    case BaseKind::SO3:
      return "SO3";
    case BaseKind::O2:
      return "O2";
  }
  return "?";
}

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  return AlgebraElement(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

double norm(const AlgebraElement& x) { return op_norm(x.matrix()); }

double distance(const AlgebraElement& a, const AlgebraElement& b) {
  return op_norm(a.matrix() - b.matrix());
}

GroupElement::GroupElement(BaseKind kind, Matrix m, int label, int order)
    : kind_(kind), m_(std::move(m)), label_(positive_mod(label, order)), order_(order) {}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  if (kind_ != o.kind_ || order_ != o.order_ || m_.rows() != o.m_.rows())
    throw GroupMismatch("product of elements of different groups");
  return GroupElement(kind_, m_ * o.m_, label_ + o.label_, order_);
}

GroupElement GroupElement::inverse() const {
  return GroupElement(kind_, m_.adjoint(), -label_, order_);
}

double distance(const GroupElement& a, const GroupElement& b) {
  if (a.cyclic_label() != b.cyclic_label() || a.cyclic_order() != b.cyclic_order())
    return std::numeric_limits<double>::infinity();
  return op_norm(a.matrix() - b.matrix());
}

GroupElement project_to_group(BaseKind kind, const Matrix& m, int label, int order) {
  switch (kind) {
    case BaseKind::U1: {
      Matrix r(1, 1);
      r(0, 0) = m(0, 0) / std::abs(m(0, 0));
      return GroupElement(kind, r, label, order);
    }
    case BaseKind::SU2: {
      auto q = su2_coefficients(m);
      double s = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
      return GroupElement(kind, su2_group(q[0] / s, q[1] / s, q[2] / s, q[3] / s), label,
                          order);
    }
    case BaseKind::O2: {
      double a = m(0, 0).real(), b = m(0, 1).real();
      double c = m(1, 0).real(), d = m(1, 1).real();
      Matrix r(2, 2);
      if (a * d - b * c >= 0.0) {
        double t = std::atan2(c - b, a + d);
        r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      } else {
        double t = std::atan2(b + c, a - d);
        r << std::cos(t), std::sin(t), std::sin(t), -std::cos(t);
      }
      return GroupElement(kind, r, label, order);
    }
    case BaseKind::SO3: {
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(real3(m), Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::Matrix3d u = svd.matrixU();
      Eigen::Matrix3d r = u * svd.matrixV().transpose();
      if (r.determinant() < 0.0) {
        u.col(2) *= -1.0;
        r = u * svd.matrixV().transpose();
      }
      return GroupElement(kind, complex_of(r), label, order);
    }
  }
  throw GroupMismatch("unknown group kind");
}

GroupElement interpolate_group(std::span<const double> w,
                               std::span<const GroupElement* const> nodes) {
  const GroupElement& a = *nodes[0];
  Matrix m = w[0] * a.matrix();
  for (std::size_t j = 1; j < nodes.size(); ++j) m += w[j] * nodes[j]->matrix();
  // Labels are locally constant; take the node carrying the most weight.
  std::size_t best = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  return project_to_group(a.kind(), m, nodes[best]->cyclic_label(), a.cyclic_order());
}

Pi0Class::Pi0Class(bool has_reflection, int reflection, int cyclic, int order)
    : has_reflection_(has_reflection),
      reflection_(has_reflection ? positive_mod(reflection, 2) : 0),
      cyclic_(positive_mod(cyclic, order)),
      order_(order) {}

Pi0Class Pi0Class::compose(const Pi0Class& o) const {
  return Pi0Class(has_reflection_, reflection_ + o.reflection_, cyclic_ + o.cyclic_, order_);
}

Pi0Class Pi0Class::inverse() const {
  return Pi0Class(has_reflection_, -reflection_, -cyclic_, order_);
}

std::string Pi0Class::to_string() const {
  if (has_reflection_ && order_ > 1)
    return "(" + std::to_string(reflection_) + "," + std::to_string(cyclic_) + ")";
  if (has_reflection_) return std::to_string(reflection_);
  return std::to_string(cyclic_);
}

StructureGroup::StructureGroup(BaseKind base, int cyclic_order, double chart_radius)
    : base_(base), order_(cyclic_order), chart_radius_(chart_radius) {
  if (cyclic_order < 1) throw GroupMismatch("cyclic order must be positive");
  if (!(chart_radius > 0.0) || chart_radius >= std::numbers::pi)
    throw GroupMismatch("chart radius must lie in (0, pi)");
}

StructureGroup StructureGroup::parse(std::string_view name) {
  std::string_view base = name;
  int order = 1;
  if (auto pos = name.find("xZ"); pos != std::string_view::npos) {
    base = name.substr(0, pos);
    auto digits = name.substr(pos + 2);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), order);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || order < 2)
      throw GroupMismatch("bad cyclic factor in group name '" + std::string(name) + "'");
  }
  for (BaseKind k : {BaseKind::U1, BaseKind::SU2, BaseKind::SO3, BaseKind::O2}) {
    if (base == to_string(k)) return StructureGroup(k, order);
  }
  throw GroupMismatch("unknown group '" + std::string(name) + "'");
}

int StructureGroup::matrix_dim() const {
  switch (base_) {
    case BaseKind::U1:
      return 1;
    case BaseKind::SU2:
    case BaseKind::O2:
      return 2;
    case BaseKind::SO3:
      return 3;
  }
  return 0;
}

int StructureGroup::algebra_dim() const {
  return (base_ == BaseKind::U1 || base_ == BaseKind::O2) ? 1 : 3;
}

std::string StructureGroup::name() const {
  std::string n(to_string(base_));
  if (order_ > 1) n += "xZ" + std::to_string(order_);
  return n;
}

GroupElement StructureGroup::identity() const {
  return GroupElement(base_, identity_matrix(matrix_dim()), 0, order_);
}

GroupElement StructureGroup::reflection() const {
  if (base_ != BaseKind::O2) throw GroupMismatch(name() + " has no reflection component");
  Matrix r = Matrix::Identity(2, 2);
  r(1, 1) = -1.0;
  return GroupElement(base_, r, 0, order_);
}

GroupElement StructureGroup::cyclic_generator() const {
  if (order_ < 2) throw GroupMismatch(name() + " has no cyclic factor");
  return GroupElement(base_, identity_matrix(matrix_dim()), 1, order_);
}

GroupElement StructureGroup::element(const Matrix& m, int label) const {
  GroupElement k(base_, m, label, order_);
  double r = membership_residual(k);
  if (!(r <= 1e-12)) throw InvariantViolation("matrix is not an element of " + name(), r);
  return k;
}

AlgebraElement StructureGroup::zero() const {
  return AlgebraElement(Matrix::Zero(matrix_dim(), matrix_dim()));
}

AlgebraElement StructureGroup::algebra_element(const Matrix& m) const {
  AlgebraElement x(m);
  double r = algebra_residual(x);
  if (!(r <= 1e-12)) throw InvariantViolation("matrix is not in the Lie algebra of " + name(), r);
  return x;
}

AlgebraElement StructureGroup::from_coords(std::span<const double> c) const {
  if (static_cast<int>(c.size()) != algebra_dim())
    throw GroupMismatch("wrong number of algebra coordinates for " + name());
  switch (base_) {
    case BaseKind::U1: {
      Matrix m(1, 1);
      m(0, 0) = Complex(0.0, c[0]);
      return AlgebraElement(m);
    }
    case BaseKind::SU2:
      return AlgebraElement(su2_algebra(c[0], c[1], c[2]));
    case BaseKind::SO3:
      return AlgebraElement(skew3(c[0], c[1], c[2]));
    case BaseKind::O2: {
      Matrix m = Matrix::Zero(2, 2);
      m(0, 1) = -c[0];
      m(1, 0) = c[0];
      return AlgebraElement(m);
    }
  }
  throw GroupMismatch("unknown group kind");
}

std::vector<double> StructureGroup::coords(const AlgebraElement& x) const {
  const Matrix& m = x.matrix();
  switch (base_) {
    case BaseKind::U1:
      return {m(0, 0).imag()};
    case BaseKind::SU2:
      return {0.5 * (m(0, 1).imag() + m(1, 0).imag()), 0.5 * (m(0, 1).real() - m(1, 0).real()),
              0.5 * (m(0, 0).imag() - m(1, 1).imag())};
    case BaseKind::SO3:
      return {0.5 * (m(2, 1).real() - m(1, 2).real()), 0.5 * (m(0, 2).real() - m(2, 0).real()),
              0.5 * (m(1, 0).real() - m(0, 1).real())};
    case BaseKind::O2:
      return {0.5 * (m(1, 0).real() - m(0, 1).real())};
  }
  return {};
}

GroupElement StructureGroup::exp(const AlgebraElement& x) const {
  double r = algebra_residual(x);
  if (!(r <= 1e-12)) throw InvariantViolation("exp of a non-algebra element", r);
  auto v = coords(x);
  switch (base_) {
    case BaseKind::U1: {
      Matrix m(1, 1);
      m(0, 0) = std::polar(1.0, v[0]);
      return GroupElement(base_, m, 0, order_);
    }
    case BaseKind::SU2: {
      double t = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      Matrix m = std::cos(t) * identity_matrix(2) + sinc(t) * x.matrix();
      return GroupElement(base_, m, 0, order_);
    }
    case BaseKind::SO3: {
      double t = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      const Matrix& a = x.matrix();
      Matrix m = identity_matrix(3) + sinc(t) * a + cosc(t) * (a * a);
      return GroupElement(base_, m, 0, order_);
    }
    case BaseKind::O2: {
      Matrix m(2, 2);
      m << std::cos(v[0]), -std::sin(v[0]), std::sin(v[0]), std::cos(v[0]);
      return GroupElement(base_, m, 0, order_);
    }
  }
  throw GroupMismatch("unknown group kind");
}

AlgebraElement StructureGroup::log(const GroupElement& k) const {
  check_kind(k);
  if (k.cyclic_label() != 0)
    throw OutOfChart("log: element lies in a non-identity component of " + name());
  const Matrix& m = k.matrix();
  double angle = 0.0;
  AlgebraElement result;
  switch (base_) {
    case BaseKind::U1: {
      angle = std::arg(m(0, 0));
      result = from_coords(std::array{angle});
      break;
    }
    case BaseKind::SU2: {
      auto q = su2_coefficients(m);
      double s = std::sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
      angle = std::atan2(s, q[0]);
      double scale = s < 1e-300 ? 1.0 : angle / s;
      result = AlgebraElement(su2_algebra(scale * q[1], scale * q[2], scale * q[3]));
      break;
    }
    case BaseKind::SO3: {
      Eigen::Matrix3d r = real3(m);
      Eigen::Vector3d w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
      double s = 0.5 * w.norm();
      double c = 0.5 * (r.trace() - 1.0);
      angle = std::atan2(s, c);
      double scale = s < 1e-300 ? 0.5 : 0.5 * angle / s;
      result = AlgebraElement(skew3(scale * w(0), scale * w(1), scale * w(2)));
      break;
    }
    case BaseKind::O2: {
      double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
      if (det < 0.0) throw OutOfChart("log: reflection lies outside the identity component of O2");
      angle = std::atan2(m(1, 0).real(), m(0, 0).real());
      result = from_coords(std::array{angle});
      break;
    }
  }
  if (std::abs(angle) >= chart_radius_)
    throw OutOfChart("log: rotation angle " + std::to_string(std::abs(angle)) +
                     " outside chart radius " + std::to_string(chart_radius_));
  return result;
}

AlgebraElement StructureGroup::ad(const GroupElement& k, const AlgebraElement& x) const {
  check_kind(k);
  if (x.matrix().rows() != matrix_dim()) throw GroupMismatch("Ad: algebra element of another group");
  return AlgebraElement(k.matrix() * x.matrix() * k.matrix().adjoint());
}

Pi0Class StructureGroup::component_class(const GroupElement& k) const {
  check_kind(k);
  int refl = 0;
  if (base_ == BaseKind::O2) {
    const Matrix& m = k.matrix();
    refl = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real() < 0.0 ? 1 : 0;
  }
  return Pi0Class(base_ == BaseKind::O2, refl, k.cyclic_label(), order_);
}

double StructureGroup::membership_residual(const GroupElement& k) const {
  if (k.kind() != base_ || k.cyclic_order() != order_ || k.matrix().rows() != matrix_dim() ||
      k.matrix().cols() != matrix_dim())
    return std::numeric_limits<double>::infinity();
  const Matrix& m = k.matrix();
  int n = matrix_dim();
  double r = op_norm(Matrix(m.adjoint() * m) - identity_matrix(n));
  switch (base_) {
    case BaseKind::U1:
      break;
    case BaseKind::SU2:
      r += std::abs(m.determinant() - 1.0);
      break;
    case BaseKind::SO3:
      r += imag_norm(m) + std::abs(m.determinant() - 1.0);
      break;
    case BaseKind::O2:
      r += imag_norm(m);
      break;
  }
  return r;
}

double StructureGroup::algebra_residual(const AlgebraElement& x) const {
  const Matrix& m = x.matrix();
  if (m.rows() != matrix_dim() || m.cols() != matrix_dim())
    return std::numeric_limits<double>::infinity();
  switch (base_) {
    case BaseKind::U1:
      return std::abs(m(0, 0).real());
    case BaseKind::SU2:
      return op_norm(Matrix(m + m.adjoint())) + std::abs(m.trace());
    case BaseKind::SO3:
    case BaseKind::O2:
      return op_norm(Matrix(m + m.transpose())) + imag_norm(m);
  }
  return std::numeric_limits<double>::infinity();
}

AlgebraElement StructureGroup::project_to_algebra(const Matrix& m) const {
  switch (base_) {
    case BaseKind::U1: {
      Matrix r(1, 1);
      r(0, 0) = Complex(0.0, m(0, 0).imag());
      return AlgebraElement(r);
    }
    case BaseKind::SU2: {
      Matrix r = 0.5 * (m - m.adjoint());
      Complex tr = r.trace() * 0.5;
      r(0, 0) -= tr;
      r(1, 1) -= tr;
      return AlgebraElement(r);
    }
    case BaseKind::SO3:
    case BaseKind::O2: {
      Matrix re = m.real().cast<Complex>();
      return AlgebraElement(Matrix(0.5 * (re - re.transpose())));
    }
  }
  throw GroupMismatch("unknown group kind");
}

bool StructureGroup::contains(const GroupElement& k) const {
  return membership_residual(k) <= 1e-12;
}

void StructureGroup::check_kind(const GroupElement& k) const {
  if (k.kind() != base_ || k.cyclic_order() != order_ || k.matrix().rows() != matrix_dim())
    throw GroupMismatch("element does not belong to " + name());
}

AlgebraElement random_algebra(const StructureGroup& group, Rng& rng, double radius) {
  int d = group.algebra_dim();
  std::vector<double> c(d);
  double len = 0.0;
  for (auto& v : c) {
    v = rng.normal();
    len += v * v;
  }
  len = std::sqrt(len);
  double r = radius * rng.uniform();
  for (auto& v : c) v *= len > 0.0 ? r / len : 0.0;
  return group.from_coords(c);
}

GroupElement random_element(const StructureGroup& group, Rng& rng) {
  GroupElement k = group.exp(random_algebra(group, rng, 0.9 * group.chart_radius()));
  if (group.has_reflection() && rng.uniform() < 0.5) k = k * group.reflection();
  int label = rng.index(group.cyclic_order());
  for (int i = 0; i < label; ++i) k = k * group.cyclic_generator();
  return k;
}

AlgebraElement left_log_derivative(const StructureGroup& group,
                                   std::span<const GroupElement> path, double h, int index,
                                   bool periodic) {
  int n = static_cast<int>(path.size());
  if (n < 8) throw DomainError("left_log_derivative: fewer than 8 samples");
  if (index < 0 || index >= n) throw DomainError("left_log_derivative: index out of range");
  Stencil s = derivative_stencil(index, n, periodic);
  int dim = group.matrix_dim();
  Matrix d = Matrix::Zero(dim, dim);
  for (int j = 0; j < 5; ++j) {
    if (s.weights[j] == 0.0) continue;
    d += s.weights[j] * path[positive_mod(index + s.offset + j, n)].matrix();
  }
  d /= h;
  return group.project_to_algebra(path[index].matrix().adjoint() * d);
}

}  // namespace gaugeforge
