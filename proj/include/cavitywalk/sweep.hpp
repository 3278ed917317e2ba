#ifndef CAVITYWALK_SWEEP_HPP
#define CAVITYWALK_SWEEP_HPP

// Maximum delocalization over a time window and the (theta, phi) and N
// parameter sweeps built on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "cavitywalk/correlations.hpp"
#include "cavitywalk/fock.hpp"
#include "cavitywalk/lattice.hpp"

namespace cavitywalk {

struct TimeGrid {
  double t_max = 4000.0;
  double step = 0.5;
  bool refine = true;

  void validate() const {
    if (!std::isfinite(t_max) || !std::isfinite(step) || !(step > 0.0) || !(step < t_max)) {
      throw std::invalid_argument("TimeGrid: need 0 < step < t_max");
    }
  }

  /// t_max = horizon/|J|, step = resolution/|J|. Defaults 400 and 0.05.
  static TimeGrid for_model(const ArrayModel& model, double horizon = 400.0,
                            double resolution = 0.05, bool refine = true) {
    const double j = std::abs(model.hopping);
    if (!(j > 0.0)) throw std::invalid_argument("TimeGrid: default grid needs nonzero hopping");
    TimeGrid g{horizon / j, resolution / j, refine};
    g.validate();
    return g;
  }
};

struct MaxResult {
  double s_max = 0.0;
  double t_at_max = 0.0;
};

/// Golden-section search for a maximizer of f on [lo, hi]. Returns the best
/// abscissa seen, stopping once the bracket is narrower than tol.
template <class F>
double golden_section_maximize(F&& f, double lo, double hi, double tol = 1e-10,
                               int max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iterations && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (fc >= fd) ? c : d;
}

/// Ties in S closer than this resolve to the earliest time.
inline constexpr double kMaxTieTolerance = 1e-9;

/// Maximizes a function of time over grid.
///
/// Coarse scan on t = 0, step, 2 step, ... (t_max appended if off-grid). With
/// refinement, every coarse local maximum that could still hide the global
/// maximum is polished by golden section within +/- one step. S(t) is a
/// trigonometric polynomial whose frequencies are differences of two-photon
/// energies, all below 8|J|; Bernstein's inequality then bounds the coarse
/// undershoot of any peak by 4 (J step)^2, which is the candidate margin.
///
/// The reported pair satisfies s_max = f(t_at_max); among maxima within
/// kMaxTieTolerance the earliest is reported.
template <class F>
MaxResult maximize_over_time(F&& s_of_t, const TimeGrid& grid, double bandwidth_hopping) {
  grid.validate();
  std::vector<double> times;
  const auto steps = static_cast<std::size_t>(std::floor(grid.t_max / grid.step + 1e-9));
  times.reserve(steps + 2);
  for (std::size_t i = 0; i <= steps; ++i) times.push_back(static_cast<double>(i) * grid.step);
  if (grid.t_max - times.back() > 1e-12 * grid.t_max) times.push_back(grid.t_max);

  std::vector<double> values(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) values[i] = s_of_t(times[i]);

  const double coarse_best = *std::max_element(values.begin(), values.end());
  if (!grid.refine) {
    const auto it = std::find(values.begin(), values.end(), coarse_best);
    return {coarse_best, times[static_cast<std::size_t>(it - values.begin())]};
  }

  const double js = bandwidth_hopping * grid.step;
  const double margin = 4.0 * js * js + kMaxTieTolerance;

  std::vector<MaxResult> refined;
  const std::size_t last = values.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double v = values[i];
    if (v < coarse_best - margin) continue;
    // Left strict, right non-strict: one candidate per plateau.
    const bool rises = (i == 0) || v > values[i - 1];
    const bool falls = (i == last) || v >= values[i + 1];
    if (!rises || !falls) continue;

    const double lo = (i == 0) ? times[0] : times[i - 1];
    const double hi = (i == last) ? times[last] : times[i + 1];
    MaxResult best{v, times[i]};
    const double t_star = golden_section_maximize(s_of_t, lo, hi);
    const double v_star = s_of_t(t_star);
    if (v_star > best.s_max) best = {v_star, t_star};
    refined.push_back(best);
  }

  double top = coarse_best;
  for (const auto& r : refined) top = std::max(top, r.s_max);
  for (const auto& r : refined) {
    if (r.s_max >= top - kMaxTieTolerance) return r;
  }
  // Unreachable: the coarse maximum itself is always a candidate.
  throw NumericError("maximize_over_time: no candidate maximum found");
}

inline MaxResult max_delocalization(const ArrayModel& model, const PsiFamily& family,
                                    const TimeGrid& grid) {
  const ClosedFormDelocalization s_of_t(model, family);
  return maximize_over_time(s_of_t, grid, std::abs(model.hopping));
}

/// Same search driven by the Fock-sector oracle. Slower; used to cross-check.
inline MaxResult max_delocalization_oracle(const ArrayModel& model, const PsiFamily& family,
                                           const TimeGrid& grid) {
  const OracleDelocalization s_of_t(model, family);
  return maximize_over_time(s_of_t, grid, std::abs(model.hopping));
}

struct SweepRow {
  int n_cavities = 0;
  int r = 0;
  int s = 0;
  double theta = 0.0;
  double phi = 0.0;
  double s_max = 0.0;
  double t_at_max = 0.0;
  double negativity = 0.0;
};

struct SpotCheck {
  std::size_t rows_checked = 0;
  double max_discrepancy = 0.0;
  std::size_t worst_row = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SpotCheck spot_check;
};

struct SweepOptions {
  /// Every k-th row (after sorting) is re-evaluated with the oracle; 0 disables.
  std::size_t spot_check_stride = 20;
};

/// Tolerance between the closed-form and oracle S at a reported maximum.
inline constexpr double kSpotCheckTolerance = 1e-8;

namespace detail {

inline SweepRow sweep_row(const ArrayModel& model, const PsiFamily& family, const TimeGrid& grid) {
  const MaxResult m = max_delocalization(model, family, grid);
  return {model.n_cavities, family.r,  family.s,  family.theta, family.phi,
          m.s_max,          m.t_at_max, negativity(family).value};
}

inline void sort_and_check(SweepResult& result, std::span<const ArrayModel> models_by_row,
                           const SweepOptions& options) {
  std::vector<std::size_t> order(result.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto key = [&](std::size_t i) {
    const auto& r = result.rows[i];
    return std::tuple(r.n_cavities, r.theta, r.phi);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<SweepRow> sorted;
  std::vector<ArrayModel> models;
  for (std::size_t i : order) {
    sorted.push_back(result.rows[i]);
    models.push_back(models_by_row[i]);
  }
  result.rows = std::move(sorted);

  if (options.spot_check_stride == 0) return;
  for (std::size_t i = 0; i < result.rows.size(); i += options.spot_check_stride) {
    const auto& row = result.rows[i];
    const PsiFamily family{row.r, row.s, row.theta, row.phi};
    const double oracle = OracleDelocalization(models[i], family)(row.t_at_max);
    const double diff = std::abs(oracle - row.s_max);
    ++result.spot_check.rows_checked;
    if (diff > result.spot_check.max_discrepancy) {
      result.spot_check.max_discrepancy = diff;
      result.spot_check.worst_row = i;
    }
  }
}

}  // namespace detail

/// One row per (theta, phi) with r = floor(N/2), s = r + 1.
inline SweepResult theta_phi_sweep(const ArrayModel& model, std::span<const double> thetas,
                                   std::span<const double> phis, const TimeGrid& grid,
                                   const SweepOptions& options = {}) {
  if (thetas.empty() || phis.empty()) throw std::invalid_argument("theta_phi_sweep: empty grid");
  model.validate();
  grid.validate();
  SweepResult result;
  std::vector<ArrayModel> models;
  for (double theta : thetas) {
    for (double phi : phis) {
      const PsiFamily family = PsiFamily::centered(model.n_cavities, theta, phi);
      result.rows.push_back(detail::sweep_row(model, family, grid));
      models.push_back(model);
    }
  }
  detail::sort_and_check(result, models, options);
  return result;
}

struct FamilySetting {
  double theta = 0.0;
  double phi = 0.0;
};

/// One row per (N, theta, phi) with r = floor(N/2), s = r + 1.
inline SweepResult n_sweep(std::span<const ArrayModel> models,
                           std::span<const FamilySetting> settings, const TimeGrid& grid,
                           const SweepOptions& options = {}) {
  if (models.empty() || settings.empty()) throw std::invalid_argument("n_sweep: empty input");
  for (const auto& m : models) {
    m.validate();
    if (m.omega != models[0].omega || m.hopping != models[0].hopping) {
      throw std::invalid_argument("n_sweep: models must share omega and hopping");
    }
  }
  grid.validate();
  SweepResult result;
  std::vector<ArrayModel> row_models;
  for (const auto& model : models) {
    for (const auto& setting : settings) {
      const PsiFamily family = PsiFamily::centered(model.n_cavities, setting.theta, setting.phi);
      result.rows.push_back(detail::sweep_row(model, family, grid));
      row_models.push_back(model);
    }
  }
  detail::sort_and_check(result, row_models, options);
  return result;
}

}  // namespace cavitywalk

#endif  // CAVITYWALK_SWEEP_HPP
