// Acceptance suite: one PASS/FAIL line per criterion, each with its own
// tolerance and runtime budget. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cavitywalk/correlations.hpp"
#include "cavitywalk/fock.hpp"
#include "cavitywalk/lattice.hpp"
#include "cavitywalk/sweep.hpp"

namespace cw = cavitywalk;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOmega = 1.0;
constexpr double kHopping = 0.1;
constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
  bool pass = true;
  std::string detail;
};

struct RandomCase {
  cw::ArrayModel model;
  cw::TwoPhotonState initial;
  cw::PsiFamily family;
  double t;
};

// 200 cases, N uniform in 1..12; N = 1 has no psi-family, so it starts in |2_1>.
std::vector<RandomCase> random_cases() {
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<int> size(1, 12);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  std::uniform_real_distribution<double> time(0.0, 400.0 / kHopping);
  std::vector<RandomCase> out;
  for (int i = 0; i < 200; ++i) {
    const int n = size(rng);
    cw::PsiFamily f{1, 2, angle(rng), angle(rng)};
    const double t = time(rng);
    if (n > 1) {
      std::uniform_int_distribution<int> site(1, n);
      f.r = site(rng);
      do {
        f.s = site(rng);
      } while (f.s == f.r);
    }
    const cw::ArrayModel model{n, kOmega, kHopping};
    out.push_back({model, n > 1 ? cw::psi_state(f, n) : cw::fock_state(1, 1, 1), f, t});
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

Verdict dual_path_equivalence() {
  double worst = 0.0;
  for (const auto& c : random_cases()) {
    const auto oracle = cw::evolve_oracle(c.model, c.initial, c.t);
    const auto g = cw::propagator(c.model, c.t);
    const auto via_g = cw::propagate_state(g, c.initial);
    worst = std::max(worst, (oracle.amplitudes.cwiseAbs2() - via_g.amplitudes.cwiseAbs2())
                                .cwiseAbs()
                                .maxCoeff());
    if (c.model.n_cavities > 1) {
      const cw::RealMatrix q = cw::joint_closed_form(g, c.family);
      const auto rep = cw::report_from_state(oracle);
      worst = std::max(worst, (q - rep.joint).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-10, "max |dP_pair| = " + fmt(worst) + " (tol 1e-10)"};
}

Verdict eigenstate_invariance() {
  double residual = 0.0;
  double s_worst = 0.0;
  for (int n = 1; n <= 16; ++n) {
    const cw::ArrayModel model{n, kOmega, kHopping};
    const auto chi = cw::chi_state(n);
    const cw::ComplexVector r = cw::sector_hamiltonian(model).cast<cw::Complex>() * chi.amplitudes -
                                2.0 * kOmega * chi.amplitudes;
    residual = std::max(residual, r.cwiseAbs().maxCoeff());
    const cw::SectorEvolver evolver(model);
    const auto coeffs = evolver.project(chi);
    for (int i = 0; i < 1000; ++i) {
      const double t = (400.0 / kHopping) * i / 999.0;
      s_worst = std::max(s_worst, std::abs(cw::delocalization(evolver.evolve_projected(coeffs, t))));
    }
  }
  return {residual < 1e-12 && s_worst < 1e-12,
          "max |H chi - 2w chi| = " + fmt(residual) + ", max S(chi,t) = " + fmt(s_worst) +
              " (tol 1e-12)"};
}

Verdict two_cavity_dynamics() {
  const cw::ArrayModel model{2, kOmega, kHopping};
  const auto grid = cw::TimeGrid::for_model(model);
  const auto swing = cw::max_delocalization(model, {1, 2, kPi / 4, 0.0}, grid);
  const auto cancel = cw::max_delocalization(model, {1, 2, kPi / 4, kPi}, grid);
  const double t_expected = kPi / (4 * kHopping);
  const bool ok = std::abs(swing.s_max - 1.0) < 1e-6 &&
                  std::abs(swing.t_at_max - t_expected) < 1e-6 && cancel.s_max <= 1e-10;
  return {ok, "phi=0: s_max-1 = " + fmt(swing.s_max - 1.0) + ", t-pi/(4J) = " +
                  fmt(swing.t_at_max - t_expected) + "; phi=pi: s_max = " + fmt(cancel.s_max)};
}

const std::vector<double> kPhis{0.0, kPi / 4, kPi / 2, 3 * kPi / 4, kPi};

Verdict phase_trend() {
  Verdict v;
  std::ostringstream os;
  const std::vector<double> thetas{kPi / 8, kPi / 4, 3 * kPi / 8};
  for (int n : {2, 8}) {
    const cw::ArrayModel model{n, kOmega, kHopping};
    const auto res = cw::theta_phi_sweep(model, thetas, kPhis, cw::TimeGrid::for_model(model));
    // Rows are sorted by (theta, phi).
    for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
      os << "N=" << n << " th=" << ti + 1 << "pi/8:";
      for (std::size_t pi = 0; pi < kPhis.size(); ++pi) {
        const auto& row = res.rows[ti * kPhis.size() + pi];
        os << ' ' << std::round(row.s_max * 1000) / 1000;
        if (pi > 0 && row.s_max > res.rows[ti * kPhis.size() + pi - 1].s_max + 0.02) v.pass = false;
      }
      os << "; ";
    }
    if (res.spot_check.max_discrepancy > cw::kSpotCheckTolerance) v.pass = false;
  }
  v.detail = os.str();
  return v;
}

std::vector<double> n_trend(double phi, double horizon) {
  const std::vector<int> sizes{2, 4, 8, 16};
  std::vector<cw::ArrayModel> models;
  for (int n : sizes) models.push_back({n, kOmega, kHopping});
  const std::vector<cw::FamilySetting> setting{{kPi / 4, phi}};
  const auto grid = cw::TimeGrid::for_model(models[0], horizon);
  const auto res = cw::n_sweep(models, setting, grid);
  std::vector<double> out;
  for (const auto& row : res.rows) out.push_back(row.s_max);
  return out;
}

Verdict size_trend() {
  Verdict v;
  std::ostringstream os;
  for (double horizon : {400.0, 800.0}) {
    const auto rising = n_trend(3 * kPi / 4, horizon);
    const auto plateau = n_trend(kPi / 4, horizon);
    bool rises = true;
    for (std::size_t i = 1; i < rising.size(); ++i) {
      if (rising[i] < rising[i - 1] - 0.02) rises = false;
    }
    bool flat = true;
    for (double s : plateau) {
      if (std::abs(s - 1.0) > 0.05) flat = false;
    }
    v.pass = v.pass && rises && flat;
    os << "t_max=" << horizon << "/J: phi=3pi/4 " << (rises ? "non-decreasing" : "DECREASES") << " [";
    for (double s : rising) os << ' ' << std::round(s * 1e4) / 1e4;
    os << " ]; phi=pi/4 " << (flat ? "within 0.05 of 1" : "NOT within 0.05 of 1") << " [";
    for (double s : plateau) os << ' ' << std::round(s * 1e4) / 1e4;
    os << " ]; ";
  }
  v.detail = os.str();
  return v;
}

Verdict negativity_formula() {
  double worst = 0.0;
  bool identical = true;
  for (int i = 0; i < 100; ++i) {
    const double theta = (kPi / 2) * i / 99.0;
    const double ref = cw::negativity({1, 2, theta, 0.0}).value;
    worst = std::max(worst, std::abs(ref - std::sin(2 * theta) / 2));
    for (double phi : {kPi / 2, kPi}) {
      const double v = cw::negativity({1, 2, theta, phi}).value;
      if (std::memcmp(&v, &ref, sizeof v) != 0) identical = false;
    }
  }
  return {worst < 1e-12 && identical, "max |N_e - sin(2th)/2| = " + fmt(worst) +
                                          (identical ? ", bit-identical across phi"
                                                     : ", NOT bit-identical across phi")};
}

Verdict conservation() {
  double unitary = 0.0;
  double norm = 0.0;
  double photons = 0.0;
  double qsum = 0.0;
  for (const auto& c : random_cases()) {
    const int n = c.model.n_cavities;
    const auto g = cw::propagator(c.model, c.t);
    unitary = std::max(unitary, (g.matrix * g.matrix.adjoint() - cw::ComplexMatrix::Identity(n, n))
                                    .cwiseAbs()
                                    .maxCoeff());
    const auto st = cw::evolve_oracle(c.model, c.initial, c.t);
    norm = std::max(norm, std::abs(st.norm() - 1.0));
    photons = std::max(photons, std::abs(st.mean_occupation().sum() - 2.0));
    const auto rep = cw::report_from_state(st);
    double upper = 0.0;
    for (int m = 1; m <= n; ++m) {
      for (int k = m; k <= n; ++k) upper += rep.q(m, k);
    }
    qsum = std::max(qsum, std::abs(upper - 1.0));
  }
  const bool ok = unitary < 1e-12 && norm < 1e-12 && photons < 1e-12 && qsum < 1e-12;
  return {ok, "unitarity " + fmt(unitary) + ", norm " + fmt(norm) + ", photons " + fmt(photons) +
                  ", sum Q " + fmt(qsum) + " (tol 1e-12)"};
}

Verdict closed_form_spot_values() {
  const cw::ArrayModel model{8, kOmega, kHopping};
  const cw::PsiFamily f = cw::PsiFamily::centered(8, 0.0, 0.0);
  const auto prr = cw::p_closed_form(model, f, 0.0, f.r, f.r);
  const auto pss = cw::p_closed_form(model, f, 0.0, f.s, f.s);
  const bool ok = !prr.degenerate && std::abs(prr.value - 0.5) < 1e-15 && pss.degenerate &&
                  pss.value == 0.0 && !std::isnan(pss.value);
  return {ok, "P_rr(0) = " + fmt(prr.value) + ", P_ss(0) = " + fmt(pss.value) +
                  (pss.degenerate ? " flagged" : " NOT flagged")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {"1 dual-path equivalence", 30.0, dual_path_equivalence},
      {"2 chi eigenstate invariance", 10.0, eigenstate_invariance},
      {"3 exact two-cavity dynamics", 5.0, two_cavity_dynamics},
      {"4 max S decreases with phi (N=2, 8)", 120.0, phase_trend},
      {"5 max S versus N, stable under horizon doubling", 300.0, size_trend},
      {"6 negativity = sin(2 theta)/2", 10.0, negativity_formula},
      {"7 conservation suite", 30.0, conservation},
      {"8 closed-form spot values", 5.0, closed_form_spot_values},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v = c.check();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) v.pass = false;
    if (!v.pass) ++failures;
    std::printf("[%s] criterion %s (%.2fs / %.0fs): %s\n", v.pass ? "PASS" : "FAIL", c.name, secs,
                c.budget_s, v.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
