#include "pickauth/dtw.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace pickauth::dtw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Predecessor selection order: lower cumulative cost, then shorter path,
// then diagonal > vertical > horizontal. Encoded by strict-< updates in
// consideration order.
struct Best {
  double cum = kInf;
  std::uint32_t len = 0;

  void consider(double c, std::uint32_t l) noexcept {
    if (c < cum || (c == cum && l < len)) {
      cum = c;
      len = l;
    }
  }
};

std::size_t effective_radius(std::size_t n, std::size_t m, const Options& opt) {
  if (!opt.band_radius) return n + m;  // unconstrained
  const std::size_t diff = n > m ? n - m : m - n;
  return std::max(*opt.band_radius, diff);
}

// Distance-only kernel, unconstrained: two rolling rows of (cumulative cost,
// path length), with the first row and first column peeled out of the inner
// loop. This is the hot path of every batch evaluation.
Result dtw_rolling_full(const Series& x, const Series& y) {
  const std::size_t n = x.size(), m = y.size();
  const double* xv = x.values().data();
  const double* yv = y.values().data();

  std::vector<double> prev_cum(m), cur_cum(m);
  std::vector<std::uint32_t> prev_len(m), cur_len(m);

  double run = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    run += local_distance(xv[0], yv[j]);
    prev_cum[j] = run;
    prev_len[j] = static_cast<std::uint32_t>(j + 1);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double xi = xv[i];
    double left_cum = prev_cum[0] + local_distance(xi, yv[0]);
    std::uint32_t left_len = prev_len[0] + 1;
    cur_cum[0] = left_cum;
    cur_len[0] = left_len;
    for (std::size_t j = 1; j < m; ++j) {
      double bc = prev_cum[j - 1];
      std::uint32_t bl = prev_len[j - 1];
      const double vc = prev_cum[j];
      const std::uint32_t vl = prev_len[j];
      if (vc < bc || (vc == bc && vl < bl)) {
        bc = vc;
        bl = vl;
      }
      if (left_cum < bc || (left_cum == bc && left_len < bl)) {
        bc = left_cum;
        bl = left_len;
      }
      left_cum = bc + local_distance(xi, yv[j]);
      left_len = bl + 1;
      cur_cum[j] = left_cum;
      cur_len[j] = left_len;
    }
    std::swap(prev_cum, cur_cum);
    std::swap(prev_len, cur_len);
  }

  Result r;
  r.cumulative_cost = prev_cum[m - 1];
  r.path_length = prev_len[m - 1];
  r.distance = r.cumulative_cost / static_cast<double>(r.path_length);
  r.cells = n * m;
  return r;
}

// Distance-only kernel with a Sakoe-Chiba band.
Result dtw_rolling_banded(const Series& x, const Series& y, const Options& opt) {
  const std::size_t n = x.size(), m = y.size();
  const std::size_t radius = effective_radius(n, m, opt);

  std::vector<double> prev_cum(m, kInf), cur_cum(m, kInf);
  std::vector<std::uint32_t> prev_len(m, 0), cur_len(m, 0);
  std::size_t cells = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t jlo = i > radius ? i - radius : 0;
    const std::size_t jhi = std::min(m - 1, i + radius);
    std::fill(cur_cum.begin(), cur_cum.end(), kInf);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const double d = local_distance(x[i], y[j]);
      ++cells;
      if (i == 0 && j == 0) {
        cur_cum[0] = d;
        cur_len[0] = 1;
        continue;
      }
      Best best;
      if (i > 0 && j > 0 && prev_cum[j - 1] < kInf) best.consider(prev_cum[j - 1], prev_len[j - 1]);
      if (i > 0 && prev_cum[j] < kInf) best.consider(prev_cum[j], prev_len[j]);
      if (j > 0 && cur_cum[j - 1] < kInf) best.consider(cur_cum[j - 1], cur_len[j - 1]);
      cur_cum[j] = best.cum + d;
      cur_len[j] = best.len + 1;
    }
    std::swap(prev_cum, cur_cum);
    std::swap(prev_len, cur_len);
  }

  Result r;
  r.cumulative_cost = prev_cum[m - 1];
  r.path_length = prev_len[m - 1];
  r.distance = r.cumulative_cost / static_cast<double>(r.path_length);
  r.cells = cells;
  return r;
}

Result dtw_rolling(const Series& x, const Series& y, const Options& opt) {
  return opt.band_radius ? dtw_rolling_banded(x, y, opt) : dtw_rolling_full(x, y);
}

// Full-matrix kernel with backtrace. Same selection rule as the rolling
// kernel, so both report identical cost, length and distance.
Result dtw_with_path(const Series& x, const Series& y, const Options& opt) {
  const std::size_t n = x.size(), m = y.size();
  const std::size_t radius = effective_radius(n, m, opt);

  std::vector<double> cum(n * m, kInf);
  std::vector<std::uint32_t> len(n * m, 0);
  auto at = [m](std::size_t i, std::size_t j) { return i * m + j; };
  std::size_t cells = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t jlo = i > radius ? i - radius : 0;
    const std::size_t jhi = std::min(m - 1, i + radius);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const double d = local_distance(x[i], y[j]);
      ++cells;
      if (i == 0 && j == 0) {
        cum[0] = d;
        len[0] = 1;
        continue;
      }
      Best best;
      if (i > 0 && j > 0 && cum[at(i - 1, j - 1)] < kInf)
        best.consider(cum[at(i - 1, j - 1)], len[at(i - 1, j - 1)]);
      if (i > 0 && cum[at(i - 1, j)] < kInf) best.consider(cum[at(i - 1, j)], len[at(i - 1, j)]);
      if (j > 0 && cum[at(i, j - 1)] < kInf) best.consider(cum[at(i, j - 1)], len[at(i, j - 1)]);
      cum[at(i, j)] = best.cum + d;
      len[at(i, j)] = best.len + 1;
    }
  }

  WarpingPath path;
  path.pairs.reserve(len[at(n - 1, m - 1)]);
  std::size_t i = n - 1, j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    Best best;
    int pick = -1;
    auto try_pred = [&](std::size_t pi, std::size_t pj, int which) {
      const double c = cum[at(pi, pj)];
      if (c >= kInf) return;
      const std::uint32_t l = len[at(pi, pj)];
      if (c < best.cum || (c == best.cum && l < best.len)) {
        best.cum = c;
        best.len = l;
        pick = which;
      }
    };
    if (i > 0 && j > 0) try_pred(i - 1, j - 1, 0);
    if (i > 0) try_pred(i - 1, j, 1);
    if (j > 0) try_pred(i, j - 1, 2);
    if (pick == 0) {
      --i;
      --j;
    } else if (pick == 1) {
      --i;
    } else {
      --j;
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());

  Result r;
  r.cumulative_cost = cum[at(n - 1, m - 1)];
  r.path_length = len[at(n - 1, m - 1)];
  r.distance = r.cumulative_cost / static_cast<double>(r.path_length);
  r.cells = cells;
  r.path = std::move(path);
  return r;
}

void require_matching_channels(const MultiSeries& x, const MultiSeries& y) {
  if (x.channel_ids() != y.channel_ids())
    throw std::invalid_argument("dtw: channel ids differ between the two signals");
}

}  // namespace

Result dtw_1d(const Series& x, const Series& y, bool recover_path, const Options& options) {
  return recover_path ? dtw_with_path(x, y, options) : dtw_rolling(x, y, options);
}

Result dtw_multi_baseline(const MultiSeries& x, const MultiSeries& y, const Options& options) {
  require_matching_channels(x, y);
  const std::size_t k = x.channel_count();
  Result r;
  r.per_channel.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Result ci = dtw_rolling(x.channel(i), y.channel(i), options);
    r.per_channel.push_back(ci.distance);
    r.distance += ci.distance;
    r.cells += ci.cells;
  }
  r.distance /= static_cast<double>(k);
  return r;
}

Result dtw_multi_weighted(const MultiSeries& x, const MultiSeries& y, const WeightVector& w,
                          const Options& options) {
  require_matching_channels(x, y);
  const std::size_t k = x.channel_count();
  if (w.size() != k)
    throw std::invalid_argument("dtw: weight count does not match channel count");
  Result r;
  r.per_channel.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Result ci = dtw_rolling(x.channel(i), y.channel(i), options);
    r.per_channel.push_back(ci.distance);
    r.distance += w[i] * ci.distance;
    r.cells += ci.cells;
  }
  return r;
}

std::pair<Series, Series> align(const Series& x, const Series& y, const WarpingPath& p) {
  if (!p.valid_for(x.size(), y.size()))
    throw std::invalid_argument("align: warping path invalid for the given lengths");
  std::vector<double> xa, ya;
  xa.reserve(p.length());
  ya.reserve(p.length());
  for (const auto& [i, j] : p.pairs) {
    xa.push_back(x[i]);
    ya.push_back(y[j]);
  }
  return {Series(std::move(xa)), Series(std::move(ya))};
}

}  // namespace pickauth::dtw
