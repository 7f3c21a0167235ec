#pragma once

namespace fsq {

// Every numeric guard used across the library lives here so a caller can
// tighten or relax them in one place. All rtol values are relative to the
// scale of the input (max(1, norm) unless stated otherwise).
struct Tolerances {
  // Allowed relative asymmetry before a matrix is rejected as non-Hermitian.
  double hermitian_rtol = 1e-12;
  // Allowed relative negativity before a matrix is rejected as indefinite.
  double psd_rtol = 1e-12;
  // s_min below singular_rtol * opnorm reports "singular".
  double singular_rtol = 1e-12;
  // Gram-matrix deviation allowed for "orthonormal" column sets.
  double orthonormal_tol = 1e-12;
  // Deviation allowed for P*P = P = P^* projection checks.
  double projection_tol = 1e-12;
  // QL iteration cap per eigenvalue.
  int eig_max_sweeps = 64;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace fsq
