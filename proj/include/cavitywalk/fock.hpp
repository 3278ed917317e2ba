#ifndef CAVITYWALK_FOCK_HPP
#define CAVITYWALK_FOCK_HPP

// Exact two-photon sector of the chain: basis indexing, sector Hamiltonian,
// eigendecomposition-based time evolution, and the initial states used by the
// analysis (the psi-family and the alternating chi state).

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "cavitywalk/lattice.hpp"

namespace cavitywalk {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lexicographic indexing of cavity pairs (m, n), 1 <= m <= n <= N.
/// (m, n) with m < n is |1_m 1_n>, (m, m) is |2_m>.
class TwoPhotonBasis {
 public:
  explicit TwoPhotonBasis(int n_cavities) : n_(n_cavities) {
    if (n_ < 1) throw std::invalid_argument("TwoPhotonBasis: n_cavities must be >= 1");
  }

  int n_cavities() const { return n_; }
  int dim() const { return n_ * (n_ + 1) / 2; }

  /// Index of the pair; order of m and n does not matter.
  int index(int m, int n) const {
    if (m > n) std::swap(m, n);
    if (m < 1 || n > n_) {
      throw std::out_of_range("TwoPhotonBasis: pair (" + std::to_string(m) + "," +
                              std::to_string(n) + ") outside 1.." + std::to_string(n_));
    }
    return (m - 1) * n_ - (m - 1) * (m - 2) / 2 + (n - m);
  }

  std::pair<int, int> pair(int idx) const {
    if (idx < 0 || idx >= dim()) throw std::out_of_range("TwoPhotonBasis: index out of range");
    int m = 1;
    int row = n_;  // pairs starting with m
    while (idx >= row) {
      idx -= row;
      ++m;
      --row;
    }
    return {m, m + idx};
  }

  bool operator==(const TwoPhotonBasis&) const = default;

 private:
  int n_;
};

struct TwoPhotonState {
  TwoPhotonBasis basis;
  ComplexVector amplitudes;

  TwoPhotonState(TwoPhotonBasis b, ComplexVector amps) : basis(b), amplitudes(std::move(amps)) {
    if (amplitudes.size() != basis.dim()) {
      throw std::invalid_argument("TwoPhotonState: amplitude count does not match basis");
    }
  }

  int n_cavities() const { return basis.n_cavities(); }
  double norm() const { return amplitudes.norm(); }
  Complex amplitude(int m, int n) const { return amplitudes(basis.index(m, n)); }
  double probability(int m, int n) const { return std::norm(amplitude(m, n)); }

  /// <n_j>: weight 2 for |2_j>, 1 for every |1_j 1_k>.
  RealVector mean_occupation() const {
    const int n = n_cavities();
    RealVector occ = RealVector::Zero(n);
    for (int i = 0; i < basis.dim(); ++i) {
      const auto [a, b] = basis.pair(i);
      const double p = std::norm(amplitudes(i));
      if (a == b) {
        occ(a - 1) += 2.0 * p;
      } else {
        occ(a - 1) += p;
        occ(b - 1) += p;
      }
    }
    return occ;
  }
};

/// cos(theta)|2>_r|0>_s + e^{i phi} sin(theta)|0>_r|2>_s, cavities 1-based.
struct PsiFamily {
  int r = 1;
  int s = 2;
  double theta = 0.0;
  double phi = 0.0;

  void validate(int n_cavities) const {
    if (r < 1 || r > n_cavities || s < 1 || s > n_cavities) {
      throw std::out_of_range("PsiFamily: r=" + std::to_string(r) + ", s=" + std::to_string(s) +
                              " must lie in 1.." + std::to_string(n_cavities));
    }
    if (r == s) throw std::invalid_argument("PsiFamily: r and s must differ");
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
      throw std::invalid_argument("PsiFamily: theta and phi must be finite");
    }
  }

  /// Equivalent parameters (up to a global phase) with theta in [0, pi/2]
  /// and phi in [0, 2 pi).
  PsiFamily canonical() const {
    constexpr double pi = std::numbers::pi;
    PsiFamily out = *this;
    // theta -> theta mod pi costs at most a global sign.
    double th = std::fmod(theta, pi);
    if (th < 0) th += pi;
    double ph = phi;
    if (th > pi / 2) {
      // cos < 0, sin > 0: overall sign flip moves the minus onto sin.
      th = pi - th;
      ph += pi;
    }
    ph = std::fmod(ph, 2 * pi);
    if (ph < 0) ph += 2 * pi;
    out.theta = th;
    out.phi = ph;
    return out;
  }

  /// Bridge value used by the sweeps: r = floor(N/2), s = r + 1.
  static PsiFamily centered(int n_cavities, double theta, double phi) {
    if (n_cavities < 2) throw std::invalid_argument("PsiFamily: need at least two cavities");
    const int r = n_cavities / 2;
    return PsiFamily{r, r + 1, theta, phi};
  }
};

/// Two-photon sector of H = omega sum n_j + J sum (a_j^+ a_{j+1} + h.c.).
///
/// Elements come from the bosonic ladder factors: moving a photon from a
/// cavity holding p photons into one holding q contributes J sqrt(p (q+1)).
inline RealMatrix sector_hamiltonian(const ArrayModel& model) {
  model.validate();
  const TwoPhotonBasis basis(model.n_cavities);
  const int n = model.n_cavities;
  const int d = basis.dim();
  RealMatrix h = RealMatrix::Zero(d, d);

  for (int col = 0; col < d; ++col) {
    const auto [a, b] = basis.pair(col);
    h(col, col) = 2.0 * model.omega;
    // Each photon may hop to either neighbour; for |2_m> the two photons are
    // the same mode, so only one pass.
    const std::array<int, 2> photons{a, b};
    const int passes = (a == b) ? 1 : 2;
    for (int which = 0; which < passes; ++which) {
      const int from = photons[which];
      const int other = photons[1 - which];
      for (int to : {from - 1, from + 1}) {
        if (to < 1 || to > n) continue;
        const int occ_from = 1 + (other == from ? 1 : 0);
        const int occ_to = (other == to ? 1 : 0);
        const double amp = model.hopping * std::sqrt(static_cast<double>(occ_from * (occ_to + 1)));
        h(basis.index(other, to), col) += amp;
      }
    }
  }
  return h;
}

/// Cached eigendecomposition of the sector Hamiltonian. Read-only after
/// construction, so one instance can serve many time points and threads.
class SectorEvolver {
 public:
  explicit SectorEvolver(const ArrayModel& model) : model_(model), basis_(model.n_cavities) {
    RealMatrix h = sector_hamiltonian(model);
    // The 2*omega diagonal is a pure phase; diagonalize the hopping part only.
    h.diagonal().array() -= 2.0 * model.omega;
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
      throw NumericError("SectorEvolver: eigendecomposition of the sector Hamiltonian failed");
    }
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  const ArrayModel& model() const { return model_; }
  const TwoPhotonBasis& basis() const { return basis_; }
  /// Eigenvalues of H - 2 omega.
  const RealVector& shifted_energies() const { return energies_; }
  const RealMatrix& eigenvectors() const { return vectors_; }

  /// Coefficients of a state in the eigenbasis.
  ComplexVector project(const TwoPhotonState& state) const {
    check_basis(state);
    return vectors_.transpose().cast<Complex>() * state.amplitudes;
  }

  /// exp(-i H t) applied to a state already projected with project().
  TwoPhotonState evolve_projected(const ComplexVector& coeffs, double t) const {
    if (!std::isfinite(t)) throw std::invalid_argument("evolve: time must be finite");
    ComplexVector phased(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      phased(k) = std::polar(1.0, -energies_(k) * t) * coeffs(k);
    }
    ComplexVector amps = vectors_.cast<Complex>() * phased;
    amps *= std::polar(1.0, -2.0 * model_.omega * t);
    return TwoPhotonState(basis_, std::move(amps));
  }

  TwoPhotonState evolve(const TwoPhotonState& state, double t) const {
    return evolve_projected(project(state), t);
  }

 private:
  void check_basis(const TwoPhotonState& state) const {
    if (!(state.basis == basis_)) {
      throw std::invalid_argument("SectorEvolver: state belongs to a different chain length");
    }
  }

  ArrayModel model_;
  TwoPhotonBasis basis_;
  RealVector energies_;
  RealMatrix vectors_;
};

/// One-shot exp(-i H t)|state0>. Reuse a SectorEvolver for time series.
inline TwoPhotonState evolve_oracle(const ArrayModel& model, const TwoPhotonState& state0,
                                    double t) {
  return SectorEvolver(model).evolve(state0, t);
}

inline TwoPhotonState psi_state(const PsiFamily& family, int n_cavities) {
  family.validate(n_cavities);
  TwoPhotonBasis basis(n_cavities);
  ComplexVector amps = ComplexVector::Zero(basis.dim());
  amps(basis.index(family.r, family.r)) = std::cos(family.theta);
  amps(basis.index(family.s, family.s)) = std::polar(std::sin(family.theta), family.phi);
  return TwoPhotonState(basis, std::move(amps));
}

/// (1/sqrt N) sum_n (-1)^n |2_n>, an eigenstate of H with eigenvalue 2 omega.
inline TwoPhotonState chi_state(int n_cavities) {
  TwoPhotonBasis basis(n_cavities);
  ComplexVector amps = ComplexVector::Zero(basis.dim());
  const double w = 1.0 / std::sqrt(static_cast<double>(n_cavities));
  for (int n = 1; n <= n_cavities; ++n) {
    amps(basis.index(n, n)) = (n % 2 == 0) ? w : -w;
  }
  return TwoPhotonState(basis, std::move(amps));
}

/// Basis state |1_m 1_n> (m != n) or |2_m> (m == n).
inline TwoPhotonState fock_state(int n_cavities, int m, int n) {
  TwoPhotonBasis basis(n_cavities);
  ComplexVector amps = ComplexVector::Zero(basis.dim());
  amps(basis.index(m, n)) = 1.0;
  return TwoPhotonState(basis, std::move(amps));
}

}  // namespace cavitywalk

#endif  // CAVITYWALK_FOCK_HPP
