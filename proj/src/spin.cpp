#include "nvberry/spin.hpp"

#include <cmath>
#include <sstream>

namespace nvberry {

namespace {
constexpr complexd kI{0.0, 1.0};
}

void require_same_basis(const Basis& a, const Basis& b, const char* where) {
  if (a == b) return;
  std::ostringstream msg;
  msg << where << ": operands carry different basis tags";
  throw BasisMismatch(msg.str());
}

SpinState SpinState::normalized() const {
  double n = amplitudes.norm();
  if (n == 0.0) throw ValidationError("cannot normalize a zero state");
  return {amplitudes / n, basis};
}

bool SpinOperator::is_hermitian(double tol) const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

const Spin1Operators& spin1_operators() {
  static const Spin1Operators ops = [] {
    Spin1Operators o;
    const double r = 1.0 / std::sqrt(2.0);
    o.sx << 0, r, 0,
            r, 0, r,
            0, r, 0;
    o.sy << 0, -kI * r, 0,
            kI * r, 0, -kI * r,
            0, kI * r, 0;
    o.sz << 1, 0, 0,
            0, 0, 0,
            0, 0, -1;
    return o;
  }();
  return ops;
}

complexd overlap(const SpinState& a, const SpinState& b) {
  require_same_basis(a.basis, b.basis, "overlap");
  return a.amplitudes.dot(b.amplitudes);  // Eigen dot conjugates the left factor
}

SpinState apply(const SpinOperator& op, const SpinState& s) {
  require_same_basis(op.basis, s.basis, "apply");
  return {op.matrix * s.amplitudes, s.basis};
}

double expectation(const SpinOperator& op, const SpinState& s) {
  require_same_basis(op.basis, s.basis, "expectation");
  complexd v = s.amplitudes.dot(op.matrix * s.amplitudes);
  return v.real();
}

SpinOperator zero_field_hamiltonian(const Orientation& o, const PhysicalConstants& c) {
  const Spin1Operators& s = spin1_operators();
  Vector3d n = o.axis();
  Matrix3cd ns = n.x() * s.sx + n.y() * s.sy + n.z() * s.sz;
  return {c.zero_field_splitting * (ns * ns), Basis::lab()};
}

SpinOperator zeeman_hamiltonian(const MagneticField& field, const PhysicalConstants& c) {
  const Spin1Operators& s = spin1_operators();
  Matrix3cd bs = field.b.x() * s.sx + field.b.y() * s.sy + field.b.z() * s.sz;
  return {c.gamma() * bs, Basis::lab()};
}

SpinOperator interaction_hamiltonian(double amplitude_tesla, double omega, double t,
                                     const Orientation& o, const PhysicalConstants& c,
                                     bool approximate) {
  const double rabi_scale = c.gamma() * amplitude_tesla;
  if (approximate && !(rabi_scale / omega < 0.1)) {
    std::ostringstream msg;
    msg << "drive amplitude over carrier ratio " << rabi_scale / omega
        << " too large for the off-diagonal approximation (needs < 0.1)";
    throw ApproximationInvalid(msg.str());
  }

  // matrix elements of the lab S_z operator between the axis eigenstates at o,
  // scaled by the instantaneous drive field
  const double ct = std::cos(o.theta);
  const double st = std::sin(o.theta);
  const complexd eip = std::exp(kI * o.phi);
  const double r = st / std::sqrt(2.0);

  Matrix3cd m;
  m << ct, eip * r, 0,
       std::conj(eip) * r, 0, eip * r,
       0, std::conj(eip) * r, -ct;
  if (approximate) {
    m(0, 0) = 0;
    m(2, 2) = 0;
  }
  return {rabi_scale * std::cos(omega * t) * m, Basis::nv_prime(o)};
}

}  // namespace nvberry
