#ifndef CAVITYWALK_VERIFY_HPP
#define CAVITYWALK_VERIFY_HPP

// Seeded self-check comparing the propagator route against the Fock-sector
// oracle, plus unitarity, conservation and chi-eigenstate checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cavitywalk/correlations.hpp"
#include "cavitywalk/fock.hpp"
#include "cavitywalk/lattice.hpp"

namespace cavitywalk {

struct VerifyCase {
  ArrayModel model;
  PsiFamily family;  // unused when model has one cavity
  double t = 0.0;

  /// psi-family state, or |2_1> on a single cavity.
  TwoPhotonState initial_state() const {
    if (model.n_cavities == 1) return fock_state(1, 1, 1);
    return psi_state(family, model.n_cavities);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "N=" << model.n_cavities << " omega=" << model.omega << " J=" << model.hopping;
    if (model.n_cavities > 1) {
      os << " r=" << family.r << " s=" << family.s << " theta=" << family.theta
         << " phi=" << family.phi;
    }
    os << " t=" << t;
    return os.str();
  }
};

/// Draws `count` cases: N cycles through `sizes`, theta and phi uniform in
/// [0, 2 pi), t uniform in [0, horizon/|J|], r != s uniform.
inline std::vector<VerifyCase> random_cases(std::uint64_t seed, int count,
                                            const std::vector<int>& sizes, double omega,
                                            double hopping, double horizon = 400.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> time(0.0, horizon / std::abs(hopping));
  std::vector<VerifyCase> cases;
  cases.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int n = sizes[static_cast<std::size_t>(i) % sizes.size()];
    VerifyCase c{ArrayModel::make(n, omega, hopping), PsiFamily{}, 0.0};
    c.family.theta = angle(rng);
    c.family.phi = angle(rng);
    c.t = time(rng);
    if (n > 1) {
      std::uniform_int_distribution<int> site(1, n);
      c.family.r = site(rng);
      do {
        c.family.s = site(rng);
      } while (c.family.s == c.family.r);
    }
    cases.push_back(c);
  }
  return cases;
}

struct CheckStat {
  CheckStat(std::string n, double tol) : name(std::move(n)), tolerance(tol) {}

  std::string name;
  double tolerance = 0.0;
  double worst = 0.0;
  std::string worst_case;

  void record(double value, const std::string& where) {
    if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
    if (worst_case.empty() || value > worst) {
      worst = value;
      worst_case = where;
    }
  }
  bool passed() const { return worst <= tolerance; }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CheckStat> checks;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed()) return false;
    }
    return true;
  }
};

/// Gap between two normalized coincidence values, weighted by their shared
/// denominator <n_m><n_n> (capped at 1). Small occupations amplify rounding
/// in the ratio; the weighted gap is the error in <a^+ a^+ a a> itself.
inline double normalized_gap(double a, double b, double denominator) {
  return std::abs(a - b) * std::min(1.0, denominator);
}

inline VerifyReport run_verification(std::uint64_t seed, int count, const std::vector<int>& sizes,
                                     double omega, double hopping) {
  VerifyReport rep;
  rep.seed = seed;
  CheckStat pairs{"pair probabilities: oracle vs propagator", 1e-10};
  CheckStat closed{"joint Q: oracle vs closed form", 1e-10};
  CheckStat normalized{"normalized P: oracle vs closed form", 1e-10};
  CheckStat unitary{"propagator unitarity", 1e-12};
  CheckStat norm{"state norm", 1e-12};
  CheckStat photons{"total photon number", 1e-12};
  CheckStat joint_sum{"sum of joint probabilities", 1e-12};
  CheckStat eigen{"chi eigenvector residual", 1e-12};
  CheckStat chi_s{"chi delocalization", 1e-12};

  for (const auto& c : random_cases(seed, count, sizes, omega, hopping)) {
    const std::string where = c.describe();
    const TwoPhotonState psi0 = c.initial_state();
    const TwoPhotonState oracle = evolve_oracle(c.model, psi0, c.t);
    const Propagator g = propagator(c.model, c.t);
    const TwoPhotonState via_g = propagate_state(g, psi0);

    double gap = 0.0;
    for (Eigen::Index i = 0; i < oracle.amplitudes.size(); ++i) {
      gap = std::max(gap, std::abs(std::norm(oracle.amplitudes(i)) - std::norm(via_g.amplitudes(i))));
    }
    pairs.record(gap, where);

    const int n = c.model.n_cavities;
    const ComplexMatrix defect = g.matrix * g.matrix.adjoint() - ComplexMatrix::Identity(n, n);
    unitary.record(defect.cwiseAbs().maxCoeff(), where);
    norm.record(std::abs(oracle.norm() - 1.0), where);
    photons.record(std::abs(oracle.mean_occupation().sum() - 2.0), where);

    const CorrelationReport report = report_from_state(oracle);
    double qsum = 0.0;
    for (int m = 1; m <= n; ++m) {
      for (int k = m; k <= n; ++k) qsum += report.q(m, k);
    }
    joint_sum.record(std::abs(qsum - 1.0), where);

    if (n > 1) {
      const RealMatrix q = joint_closed_form(g, c.family);
      closed.record((q - report.joint).cwiseAbs().maxCoeff(), where);
      double pgap = 0.0;
      for (int m = 1; m <= n; ++m) {
        for (int k = 1; k <= n; ++k) {
          const FlaggedValue p = p_closed_form(g, c.family, m, k);
          if (p.degenerate || report.degenerate(m - 1, k - 1)) continue;
          const double denom = report.mean_occupation(m - 1) * report.mean_occupation(k - 1);
          pgap = std::max(pgap, normalized_gap(p.value, report.p(m, k), denom));
        }
      }
      normalized.record(pgap, where);
    }
  }

  for (int n : sizes) {
    const ArrayModel model = ArrayModel::make(n, omega, hopping);
    const TwoPhotonState chi = chi_state(n);
    const ComplexVector residual =
        sector_hamiltonian(model).cast<Complex>() * chi.amplitudes - 2.0 * omega * chi.amplitudes;
    eigen.record(residual.cwiseAbs().maxCoeff(), "N=" + std::to_string(n));
    const SectorEvolver evolver(model);
    const ComplexVector coeffs = evolver.project(chi);
    const double t_max = 400.0 / std::abs(hopping);
    for (int i = 0; i < 200; ++i) {
      const double t = t_max * i / 199.0;
      chi_s.record(std::abs(delocalization(evolver.evolve_projected(coeffs, t))),
                   "N=" + std::to_string(n) + " t=" + std::to_string(t));
    }
  }

  rep.checks = {pairs, closed, normalized, unitary, norm, photons, joint_sum, eigen, chi_s};
  return rep;
}

}  // namespace cavitywalk

#endif  // CAVITYWALK_VERIFY_HPP
