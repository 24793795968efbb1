#pragma once

#include <Eigen/Dense>
#include <complex>

#include "nvberry/constants.hpp"
#include "nvberry/errors.hpp"

namespace nvberry {

using complexd = std::complex<double>;
using Eigen::Matrix3cd;
using Eigen::Vector3cd;
using Eigen::Vector3d;

// direction of the NV symmetry axis in the lab frame
struct Orientation {
  double theta = 0.0;  // polar angle from lab z, [0, pi]
  double phi = 0.0;    // azimuth, radians

  Vector3d axis() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  }
};

// basis tag carried by states and operators; components are ordered m = +1, 0, -1
// LabZ: lab-frame z eigenbasis. NVPrime: the eigenbasis of the zero-field term at
// a given orientation. Mixing tags in arithmetic is a hard error, not a silent cast.
struct Basis {
  enum Kind { LabZ, NVPrime } kind = LabZ;
  Orientation orientation;  // meaningful only for NVPrime

  static Basis lab() { return {LabZ, {}}; }
  static Basis nv_prime(const Orientation& o) { return {NVPrime, o}; }

  friend bool operator==(const Basis& a, const Basis& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == LabZ) return true;
    return a.orientation.theta == b.orientation.theta && a.orientation.phi == b.orientation.phi;
  }
};

void require_same_basis(const Basis& a, const Basis& b, const char* where);

struct SpinState {
  Vector3cd amplitudes = Vector3cd::Zero();
  Basis basis = Basis::lab();

  double norm() const { return amplitudes.norm(); }
  SpinState normalized() const;
};

struct SpinOperator {
  Matrix3cd matrix = Matrix3cd::Zero();
  Basis basis = Basis::lab();

  bool is_hermitian(double tol = 1e-12) const;
};

// static magnetic field vector, lab frame, tesla
struct MagneticField {
  Vector3d b = Vector3d::Zero();
};

struct Spin1Operators {
  Matrix3cd sx, sy, sz;
};

// spin-1 matrices in the m = +1, 0, -1 ordering, lab z quantization
const Spin1Operators& spin1_operators();

complexd overlap(const SpinState& a, const SpinState& b);
SpinState apply(const SpinOperator& op, const SpinState& s);
double expectation(const SpinOperator& op, const SpinState& s);

// D (n . S)^2 for the axis at orientation o, lab basis, rad/s
SpinOperator zero_field_hamiltonian(const Orientation& o, const PhysicalConstants& c);

// g muB/hbar (B . S), lab basis, rad/s
SpinOperator zeeman_hamiltonian(const MagneticField& field, const PhysicalConstants& c);

// linearly polarized drive along lab z, expressed in the NVPrime basis at o.
// amplitude_tesla is the field amplitude B_R, omega the carrier (rad/s).
// approximate = true drops the diagonal (secular) part and requires
// gamma * B_R / omega < 0.1, else ApproximationInvalid.
SpinOperator interaction_hamiltonian(double amplitude_tesla, double omega, double t,
                                     const Orientation& o, const PhysicalConstants& c,
                                     bool approximate);

}  // namespace nvberry
