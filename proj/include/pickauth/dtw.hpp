#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "pickauth/series.hpp"

namespace pickauth::dtw {

/// Local point distance: absolute difference, in sensor units.
inline double local_distance(double a, double b) noexcept { return std::abs(a - b); }

struct Options {
  /// Sakoe-Chiba band radius in samples. Unset = unconstrained alignment.
  /// When set, the effective radius is widened to at least |N - M| so a
  /// valid path always exists.
  std::optional<std::size_t> band_radius;
};

struct Result {
  /// Cumulative cost of the minimizing path divided by its length. This is
  /// the average cost along the optimal-sum path, not a true min of
  /// averages; normalizing keeps one threshold meaningful across signals of
  /// different durations.
  double distance = 0.0;
  /// Unnormalized minimum cumulative cost (1-D only).
  double cumulative_cost = 0.0;
  /// Length L of the tie-broken minimizing path (1-D only).
  std::size_t path_length = 0;
  /// DP cells evaluated; N*M without a band.
  std::size_t cells = 0;
  /// Unweighted per-channel distances (multi-channel variants).
  std::vector<double> per_channel;
  /// Minimizing path, when requested (1-D only).
  std::optional<WarpingPath> path;
};

/// One-dimensional DTW with the classical step pattern (i-1,j), (i,j-1),
/// (i-1,j-1). Ties in cumulative cost are broken toward the shorter path,
/// then by step preference diagonal, vertical, horizontal, which keeps the
/// reported distance symmetric in (x, y) and the recovered path
/// deterministic.
Result dtw_1d(const Series& x, const Series& y, bool recover_path = false,
              const Options& options = {});

/// Multi-dimensional DTW, baseline form: each channel aligned independently,
/// distance is the plain average of the per-channel distances.
Result dtw_multi_baseline(const MultiSeries& x, const MultiSeries& y,
                          const Options& options = {});

/// Weighted multi-dimensional DTW: distance = sum_i w_i * dtw_1d(x_i, y_i).
/// per_channel carries the unweighted channel distances.
Result dtw_multi_weighted(const MultiSeries& x, const MultiSeries& y, const WeightVector& w,
                          const Options& options = {});

/// Expand two series along a warping path: element l of the outputs is
/// (x[n_l], y[m_l]). Both outputs have length L.
std::pair<Series, Series> align(const Series& x, const Series& y, const WarpingPath& p);

}  // namespace pickauth::dtw
