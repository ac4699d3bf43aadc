#include "pickauth/batch.hpp"

#include <omp.h>

#include <stdexcept>

#include "pickauth/dtw.hpp"

namespace pickauth::batch {

namespace {

void validate_set(std::span<const sig::PickUpSignal> signals) {
  if (signals.empty()) throw std::invalid_argument("batch: empty signal set");
  for (const sig::PickUpSignal& s : signals)
    if (s.signal.channel_ids() != signals.front().signal.channel_ids())
      throw std::invalid_argument("batch: signals have mismatched channels");
}

void fill_pair(const sig::PickUpSignal& a, const sig::PickUpSignal& b, double* row,
               std::size_t k) {
  for (std::size_t c = 0; c < k; ++c)
    row[c] = dtw::dtw_1d(a.signal.channel(c), b.signal.channel(c)).distance;
}

}  // namespace

std::size_t PairTable::pair_index(std::size_t i, std::size_t j) const noexcept {
  if (i > j) std::swap(i, j);
  // Row-major enumeration of (i, j), i < j: pairs before row i plus offset.
  return i * count - i * (i + 1) / 2 + (j - i - 1);
}

std::span<const double> PairTable::at(std::size_t i, std::size_t j) const noexcept {
  return {values.data() + pair_index(i, j) * channels, channels};
}

std::span<const double> CrossTable::at(std::size_t probe, std::size_t reference) const noexcept {
  return {values.data() + (probe * references + reference) * channels, channels};
}

PairTable pairwise_table_serial(std::span<const sig::PickUpSignal> signals) {
  validate_set(signals);
  const std::size_t n = signals.size();
  const std::size_t k = signals.front().signal.channel_count();
  PairTable table{n, k, std::vector<double>(n * (n - 1) / 2 * k)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      fill_pair(signals[i], signals[j], table.values.data() + table.pair_index(i, j) * k, k);
  return table;
}

PairTable pairwise_table_parallel(std::span<const sig::PickUpSignal> signals, int jobs) {
  validate_set(signals);
  const std::size_t n = signals.size();
  const std::size_t k = signals.front().signal.channel_count();
  PairTable table{n, k, std::vector<double>(n * (n - 1) / 2 * k)};

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pairs.size()); ++p) {
    const auto [i, j] = pairs[p];
    fill_pair(signals[i], signals[j], table.values.data() + static_cast<std::size_t>(p) * k, k);
  }
  return table;
}

CrossTable cross_table_serial(std::span<const sig::PickUpSignal> probes,
                              std::span<const sig::PickUpSignal> references) {
  validate_set(probes);
  validate_set(references);
  if (probes.front().signal.channel_ids() != references.front().signal.channel_ids())
    throw std::invalid_argument("batch: probe/reference channels differ");
  const std::size_t k = probes.front().signal.channel_count();
  CrossTable table{probes.size(), references.size(), k,
                   std::vector<double>(probes.size() * references.size() * k)};
  for (std::size_t p = 0; p < probes.size(); ++p)
    for (std::size_t r = 0; r < references.size(); ++r)
      fill_pair(probes[p], references[r], table.values.data() + (p * references.size() + r) * k, k);
  return table;
}

CrossTable cross_table_parallel(std::span<const sig::PickUpSignal> probes,
                                std::span<const sig::PickUpSignal> references, int jobs) {
  validate_set(probes);
  validate_set(references);
  if (probes.front().signal.channel_ids() != references.front().signal.channel_ids())
    throw std::invalid_argument("batch: probe/reference channels differ");
  const std::size_t k = probes.front().signal.channel_count();
  const std::size_t nr = references.size();
  CrossTable table{probes.size(), nr, k, std::vector<double>(probes.size() * nr * k)};

  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const std::ptrdiff_t cells = static_cast<std::ptrdiff_t>(probes.size() * nr);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::ptrdiff_t cell = 0; cell < cells; ++cell) {
    const std::size_t p = static_cast<std::size_t>(cell) / nr;
    const std::size_t r = static_cast<std::size_t>(cell) % nr;
    fill_pair(probes[p], references[r], table.values.data() + static_cast<std::size_t>(cell) * k, k);
  }
  return table;
}

double combine(std::span<const double> per_channel, const WeightVector& w) {
  if (per_channel.size() != w.size())
    throw std::invalid_argument("combine: weight/channel arity mismatch");
  double d = 0.0;
  for (std::size_t c = 0; c < per_channel.size(); ++c) d += w[c] * per_channel[c];
  return d;
}

}  // namespace pickauth::batch
