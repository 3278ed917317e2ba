#ifndef CAVITYWALK_CORRELATIONS_HPP
#define CAVITYWALK_CORRELATIONS_HPP

// Coincidence observables of two-photon states: joint detection
// probabilities Q_mn, the normalized correlation P_mn, the delocalization
// degree S, and entanglement negativity of the initial psi-family state.
//
// Two independent routes to the evolved observables exist here:
//   - from a Fock-sector state (typically produced by SectorEvolver), and
//   - from the single-photon propagator G(t) alone, which is how the
//     closed-form P_mn for the psi-family is evaluated.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "cavitywalk/fock.hpp"
#include "cavitywalk/lattice.hpp"

namespace cavitywalk {

/// Occupations below this are treated as zero in normalized ratios.
inline constexpr double kDegenerateOccupation = 1e-14;

/// A ratio that may have had a vanishing denominator. When `degenerate` is
/// set the value is 0 instead of NaN.
struct FlaggedValue {
  double value = 0.0;
  bool degenerate = false;
};

using FlagMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct CorrelationReport {
  RealMatrix joint;       // Q_mn, symmetric; Q_mm = P(both photons in m)
  RealMatrix normalized;  // P_mn = <a_n^+ a_m^+ a_m a_n> / (<n_n><n_m>)
  FlagMatrix degenerate;  // P_mn entries whose denominator vanished
  RealVector mean_occupation;
  double s_value = 0.0;   // 1 - sum_m Q_mm

  int size() const { return static_cast<int>(joint.rows()); }
  double q(int m, int n) const { return joint(m - 1, n - 1); }
  double p(int m, int n) const { return normalized(m - 1, n - 1); }
};

inline void require_normalized(const TwoPhotonState& state, double tol = 1e-10) {
  const double n2 = state.amplitudes.squaredNorm();
  if (!(std::abs(n2 - 1.0) <= tol)) {
    throw std::invalid_argument("state is not normalized (|psi|^2 = " + std::to_string(n2) + ")");
  }
}

/// Probability that the two photons are found in different cavities.
inline double delocalization(const TwoPhotonState& state) {
  const int n = state.n_cavities();
  double localized = 0.0;
  for (int m = 1; m <= n; ++m) localized += state.probability(m, m);
  return 1.0 - localized;
}

inline CorrelationReport report_from_state(const TwoPhotonState& state) {
  require_normalized(state);
  const int n = state.n_cavities();
  CorrelationReport rep;
  rep.joint = RealMatrix::Zero(n, n);
  rep.normalized = RealMatrix::Zero(n, n);
  rep.degenerate = FlagMatrix::Constant(n, n, false);
  rep.mean_occupation = state.mean_occupation();

  for (int m = 1; m <= n; ++m) {
    for (int k = m; k <= n; ++k) {
      const double q = state.probability(m, k);
      rep.joint(m - 1, k - 1) = q;
      rep.joint(k - 1, m - 1) = q;

      // <a^+ a^+ a a> is 2|c_mm|^2 on the diagonal and |c_mk|^2 off it.
      const double numer = (m == k) ? 2.0 * q : q;
      const double om = rep.mean_occupation(m - 1);
      const double ok = rep.mean_occupation(k - 1);
      double p = 0.0;
      bool flag = false;
      if (om < kDegenerateOccupation || ok < kDegenerateOccupation) {
        flag = true;
      } else {
        p = numer / (om * ok);
      }
      rep.normalized(m - 1, k - 1) = p;
      rep.normalized(k - 1, m - 1) = p;
      rep.degenerate(m - 1, k - 1) = flag;
      rep.degenerate(k - 1, m - 1) = flag;
    }
  }
  rep.s_value = delocalization(state);
  return rep;
}

// ---------------------------------------------------------------------------
// Propagator route
// ---------------------------------------------------------------------------

/// Evolves an arbitrary two-photon state with the single-photon propagator.
///
/// The state is written as sum_ij T_ij a_i^+ a_j^+ |0> with T symmetric; then
/// T(t) = G T G^T. Amplitudes relate as c_mn = 2 T_mn (m < n) and
/// c_mm = sqrt(2) T_mm.
inline TwoPhotonState propagate_state(const Propagator& g, const TwoPhotonState& state) {
  const int n = state.n_cavities();
  if (g.size() != n) throw std::invalid_argument("propagate_state: size mismatch");
  const double root2 = std::sqrt(2.0);
  ComplexMatrix tensor = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < state.basis.dim(); ++i) {
    const auto [a, b] = state.basis.pair(i);
    if (a == b) {
      tensor(a - 1, a - 1) = state.amplitudes(i) / root2;
    } else {
      tensor(a - 1, b - 1) = state.amplitudes(i) / 2.0;
      tensor(b - 1, a - 1) = state.amplitudes(i) / 2.0;
    }
  }
  const ComplexMatrix evolved = g.matrix * tensor * g.matrix.transpose();
  ComplexVector amps(state.basis.dim());
  for (int i = 0; i < state.basis.dim(); ++i) {
    const auto [a, b] = state.basis.pair(i);
    amps(i) = (a == b) ? root2 * evolved(a - 1, a - 1)
                       : evolved(a - 1, b - 1) + evolved(b - 1, a - 1);
  }
  return TwoPhotonState(state.basis, std::move(amps));
}

/// A_mn = cos(theta) G_mr G_nr + e^{i phi} sin(theta) G_ms G_ns.
///
/// For the psi-family the evolved amplitudes are c_mm = A_mm and
/// c_mn = sqrt(2) A_mn (m < n).
inline ComplexMatrix pair_amplitudes(const Propagator& g, const PsiFamily& family) {
  family.validate(g.size());
  const ComplexVector gr = g.matrix.col(family.r - 1);
  const ComplexVector gs = g.matrix.col(family.s - 1);
  const Complex wr = std::cos(family.theta);
  const Complex ws = std::polar(std::sin(family.theta), family.phi);
  return wr * (gr * gr.transpose()) + ws * (gs * gs.transpose());
}

/// Normalized coincidence P_mn(t) for the psi-family, straight from G:
///
///   P_mn = (1/2) |A_mn|^2 / (o_n o_m),
///   o_j  = cos^2(theta) |G_jr|^2 + sin^2(theta) |G_js|^2.
inline FlaggedValue p_closed_form(const Propagator& g, const PsiFamily& family, int m, int n) {
  const int size = g.size();
  family.validate(size);
  if (m < 1 || m > size || n < 1 || n > size) {
    throw std::out_of_range("p_closed_form: cavity index out of range");
  }
  const double c = std::cos(family.theta);
  const double s = std::sin(family.theta);
  const Complex amp = c * g(m, family.r) * g(n, family.r) +
                      std::polar(s, family.phi) * g(m, family.s) * g(n, family.s);
  const double occ_n = c * c * std::norm(g(n, family.r)) + s * s * std::norm(g(n, family.s));
  const double occ_m = c * c * std::norm(g(m, family.r)) + s * s * std::norm(g(m, family.s));
  // o_j is half the mean photon number, so compare 2 o_j with the threshold.
  if (2.0 * occ_n < kDegenerateOccupation || 2.0 * occ_m < kDegenerateOccupation) {
    return {0.0, true};
  }
  return {0.5 * std::norm(amp) / (occ_n * occ_m), false};
}

inline FlaggedValue p_closed_form(const ArrayModel& model, const PsiFamily& family, double t,
                                  int m, int n) {
  return p_closed_form(propagator(model, t), family, m, n);
}

/// Joint probabilities Q_mn from the propagator route (psi-family).
inline RealMatrix joint_closed_form(const Propagator& g, const PsiFamily& family) {
  const ComplexMatrix a = pair_amplitudes(g, family);
  RealMatrix q = 2.0 * a.cwiseAbs2();
  q.diagonal() = a.diagonal().cwiseAbs2();
  return q;
}

/// S(t) = 1 - sum_m |A_mm|^2 using only the r and s columns of G.
///
/// This is the inner loop of every sweep, O(N^2) per call.
class ClosedFormDelocalization {
 public:
  ClosedFormDelocalization(const ArrayModel& model, const PsiFamily& family)
      : model_(model), modes_(normal_modes(model)), family_(family) {
    family_.validate(model.n_cavities);
    wr_ = std::cos(family.theta);
    ws_ = std::polar(std::sin(family.theta), family.phi);
  }

  double operator()(double t) const {
    const ComplexVector gr = propagator_column(model_, modes_, t, family_.r);
    const ComplexVector gs = propagator_column(model_, modes_, t, family_.s);
    double localized = 0.0;
    for (Eigen::Index m = 0; m < gr.size(); ++m) {
      localized += std::norm(wr_ * gr(m) * gr(m) + ws_ * gs(m) * gs(m));
    }
    return 1.0 - localized;
  }

  const ArrayModel& model() const { return model_; }
  const PsiFamily& family() const { return family_; }

 private:
  ArrayModel model_;
  NormalModes modes_;
  PsiFamily family_;
  Complex wr_;
  Complex ws_;
};

/// S(t) from oracle-evolved psi-family states, reusing one eigendecomposition.
class OracleDelocalization {
 public:
  OracleDelocalization(const ArrayModel& model, const PsiFamily& family)
      : evolver_(model), coeffs_(evolver_.project(psi_state(family, model.n_cavities))) {}

  double operator()(double t) const { return delocalization(evolver_.evolve_projected(coeffs_, t)); }

  TwoPhotonState state_at(double t) const { return evolver_.evolve_projected(coeffs_, t); }

 private:
  SectorEvolver evolver_;
  ComplexVector coeffs_;
};

struct TimePoint {
  double t = 0.0;
  double s = 0.0;
};

inline std::vector<TimePoint> delocalization_timeseries(const ArrayModel& model,
                                                        const PsiFamily& family,
                                                        std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("delocalization_timeseries: empty time grid");
  const OracleDelocalization s_of_t(model, family);
  std::vector<TimePoint> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t)) throw std::invalid_argument("delocalization_timeseries: non-finite time");
    out.push_back({t, report_from_state(s_of_t.state_at(t)).s_value});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Negativity
// ---------------------------------------------------------------------------

struct NegativityValue {
  double value = 0.0;
};

/// Negativity of a pure bipartite state from its Schmidt weights:
/// ((sum_i sqrt(lambda_i))^2 - 1) / 2.
inline double negativity_from_schmidt(std::span<const double> weights) {
  double root_sum = 0.0;
  for (double w : weights) root_sum += std::sqrt(std::max(w, 0.0));
  return 0.5 * (root_sum * root_sum - 1.0);
}

/// Two-mode amplitude matrix M(p, q): p photons in cavity r, q in cavity s.
/// Throws if the state has weight outside the r|s pair.
inline ComplexMatrix two_mode_amplitudes(const TwoPhotonState& state, int r, int s,
                                         double tol = 1e-12) {
  const int n = state.n_cavities();
  if (r < 1 || r > n || s < 1 || s > n || r == s) {
    throw std::out_of_range("two_mode_amplitudes: invalid cavity pair");
  }
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  double outside = 0.0;
  for (int i = 0; i < state.basis.dim(); ++i) {
    const auto [a, b] = state.basis.pair(i);
    const int in_r = (a == r) + (b == r);
    const int in_s = (a == s) + (b == s);
    if (in_r + in_s == 2) {
      m(in_r, in_s) = state.amplitudes(i);
    } else {
      outside += std::norm(state.amplitudes(i));
    }
  }
  if (outside > tol) throw std::invalid_argument("two_mode_amplitudes: photons outside r|s");
  return m;
}

/// Schmidt weights across the r|s cut, via SVD of the two-mode amplitudes.
inline std::vector<double> schmidt_weights(const ComplexMatrix& two_mode) {
  Eigen::JacobiSVD<ComplexMatrix> svd(two_mode);
  std::vector<double> w;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    w.push_back(svd.singularValues()(i) * svd.singularValues()(i));
  }
  return w;
}

/// For the psi-family the amplitude matrix has one entry per row and column,
/// so the Schmidt weights are {cos^2 theta, sin^2 theta} and the phase drops
/// out exactly.
inline NegativityValue negativity(const PsiFamily& family) {
  const double c = std::cos(family.theta);
  const double s = std::sin(family.theta);
  const double weights[] = {c * c, s * s};
  return {negativity_from_schmidt(weights)};
}

}  // namespace cavitywalk

#endif  // CAVITYWALK_CORRELATIONS_HPP
