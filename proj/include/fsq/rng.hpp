#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/linalg.hpp"

namespace fsq {

// splitmix64; used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic random source. The engine is std::mt19937_64 (its sequence is
// pinned by the standard); distributions are hand-rolled because the standard
// library's are not portable across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derive a reproducible child stream (sharded fuzzing, per-trial streams).
  Rng child(std::uint64_t stream) const {
    std::uint64_t s = seed_mix_ ^ (0x85ebca6b00000000ull + stream);
    return Rng(splitmix64(s));
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi] by rejection-free scaling (bias < 2^-53,
  // irrelevant for fuzz ranges here).
  long uniform_int(long lo, long hi) {
    const double u = uniform();
    const long off = static_cast<long>(u * static_cast<double>(hi - lo + 1));
    return std::min(hi, lo + off);
  }

  // Standard normal via Box-Muller (pair cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Standard complex Gaussian, E|z|^2 = 1.
  cplx cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return cplx{re * 0.7071067811865475244, im * 0.7071067811865475244};
  }

  Matrix gaussian_matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = cgaussian();
    return m;
  }

  Matrix hermitian_matrix(std::size_t n) {
    Matrix g = gaussian_matrix(n, n);
    return (g + g.adjoint()) * 0.5;
  }

  // Positive semidefinite with unit-scale entries.
  Matrix psd_matrix(std::size_t n) {
    Matrix g = gaussian_matrix(n, n);
    return (g.adjoint() * g) * (1.0 / static_cast<double>(n));
  }

  Matrix haar_unitary(std::size_t n) { return qr_unitary_factor(gaussian_matrix(n, n)); }

  // Rank-r orthogonal projection from a Haar frame.
  Matrix projection(std::size_t n, std::size_t r) {
    Matrix u = haar_unitary(n);
    Matrix p(n, n);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          p(i, j) += u(i, k) * std::conj(u(j, k));
    return p;
  }

  // Orthonormal k-column frame in dimension d.
  Matrix orthonormal_columns(std::size_t d, std::size_t k) {
    Matrix u = haar_unitary(d);
    return u.top_left(d, k);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_mix_ = engine_();  // one draw reserved for child derivation
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace fsq
