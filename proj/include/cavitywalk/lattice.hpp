#ifndef CAVITYWALK_LATTICE_HPP
#define CAVITYWALK_LATTICE_HPP

// Uniform chain of N linearly coupled cavities and its single-photon
// propagator, built from the analytic open-chain normal modes.
//
// Cavity and mode labels are 1-based at every public accessor; Eigen storage
// underneath is 0-based.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cavitywalk {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Chain parameters: N cavities at common frequency omega, nearest-neighbour
/// hopping J (hbar = 1).
struct ArrayModel {
  int n_cavities = 1;
  double omega = 1.0;
  double hopping = 0.1;

  void validate() const {
    if (n_cavities < 1) {
      throw std::invalid_argument("ArrayModel: n_cavities must be >= 1, got " +
                                  std::to_string(n_cavities));
    }
    if (!std::isfinite(omega)) throw std::invalid_argument("ArrayModel: omega must be finite");
    if (!std::isfinite(hopping)) throw std::invalid_argument("ArrayModel: hopping must be finite");
  }

  /// Validating constructor.
  static ArrayModel make(int n, double omega, double hopping) {
    ArrayModel m{n, omega, hopping};
    m.validate();
    return m;
  }

  bool operator==(const ArrayModel&) const = default;
};

struct NormalModes {
  RealVector frequencies;  // Omega_k, k = 1..N stored at k-1
  RealMatrix mode_matrix;  // S(j,k), orthogonal and symmetric

  int size() const { return static_cast<int>(frequencies.size()); }
  double frequency(int k) const { return frequencies(k - 1); }
  double mode(int j, int k) const { return mode_matrix(j - 1, k - 1); }
};

/// Open-chain normal modes:
///   Omega_k = omega + 2 J cos(pi k / (N+1))
///   S(j,k)  = sqrt(2/(N+1)) sin(pi j k / (N+1))
inline NormalModes normal_modes(const ArrayModel& model) {
  model.validate();
  const int n = model.n_cavities;
  const double denom = static_cast<double>(n + 1);
  const double norm = std::sqrt(2.0 / denom);

  NormalModes modes;
  modes.frequencies.resize(n);
  modes.mode_matrix.resize(n, n);
  for (int k = 1; k <= n; ++k) {
    modes.frequencies(k - 1) =
        model.omega + 2.0 * model.hopping * std::cos(std::numbers::pi * k / denom);
  }
  for (int j = 1; j <= n; ++j) {
    for (int k = j; k <= n; ++k) {
      // j*k is reduced mod 2(N+1) so the sine argument stays in [0, 2pi).
      const int phase = (j * k) % (2 * (n + 1));
      const double v = norm * std::sin(std::numbers::pi * phase / denom);
      modes.mode_matrix(j - 1, k - 1) = v;
      modes.mode_matrix(k - 1, j - 1) = v;
    }
  }
  return modes;
}

struct Propagator {
  double time = 0.0;
  ComplexMatrix matrix;  // G_jl(t)

  int size() const { return static_cast<int>(matrix.rows()); }
  /// 1-based element G_jl.
  Complex operator()(int j, int l) const { return matrix(j - 1, l - 1); }
};

/// G_jl(t) = sum_k exp(-i Omega_k t) S(j,k) S(l,k).
///
/// The common factor exp(-i omega t) is split off so the per-mode phases only
/// carry the hopping part; this keeps long-time phases accurate.
inline Propagator propagator(const ArrayModel& model, const NormalModes& modes, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("propagator: time must be finite");
  const int n = modes.size();
  ComplexVector phases(n);
  for (int k = 0; k < n; ++k) {
    const double hop = modes.frequencies(k) - model.omega;
    phases(k) = std::polar(1.0, -hop * t);
  }
  const Complex global = std::polar(1.0, -model.omega * t);

  Propagator g;
  g.time = t;
  g.matrix.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = j; l < n; ++l) {
      Complex acc{0.0, 0.0};
      for (int k = 0; k < n; ++k) {
        acc += phases(k) * (modes.mode_matrix(j, k) * modes.mode_matrix(l, k));
      }
      acc *= global;
      g.matrix(j, l) = acc;
      g.matrix(l, j) = acc;
    }
  }
  return g;
}

inline Propagator propagator(const ArrayModel& model, double t) {
  return propagator(model, normal_modes(model), t);
}

/// Single column G_{., l}(t) for l 1-based, O(N^2).
inline ComplexVector propagator_column(const ArrayModel& model, const NormalModes& modes,
                                       double t, int l) {
  const int n = modes.size();
  if (l < 1 || l > n) throw std::out_of_range("propagator_column: index out of range");
  ComplexVector weights(n);
  for (int k = 0; k < n; ++k) {
    const double hop = modes.frequencies(k) - model.omega;
    weights(k) = std::polar(1.0, -hop * t) * modes.mode_matrix(l - 1, k);
  }
  ComplexVector col = modes.mode_matrix.cast<Complex>() * weights;
  return col * std::polar(1.0, -model.omega * t);
}

}  // namespace cavitywalk

#endif  // CAVITYWALK_LATTICE_HPP
