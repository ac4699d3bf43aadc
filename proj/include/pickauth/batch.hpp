#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pickauth/series.hpp"
#include "pickauth/signal.hpp"

namespace pickauth::batch {

/// Per-channel DTW distances for every unordered signal pair, flattened as
/// pair-major rows of k values. Pair p = (i, j), i < j, enumerated row-major;
/// use pair_index() to address a row.
struct PairTable {
  std::size_t count = 0;        // number of signals
  std::size_t channels = 0;     // k
  std::vector<double> values;   // n_pairs * k

  std::size_t pair_index(std::size_t i, std::size_t j) const noexcept;
  std::span<const double> at(std::size_t i, std::size_t j) const noexcept;
};

/// Per-channel DTW distances of each probe against each reference signal,
/// row-major probe x reference x k.
struct CrossTable {
  std::size_t probes = 0;
  std::size_t references = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  std::span<const double> at(std::size_t probe, std::size_t reference) const noexcept;
};

/// Serial reference implementations. These are the ground truth the
/// OpenMP kernels are tested against.
PairTable pairwise_table_serial(std::span<const sig::PickUpSignal> signals);
CrossTable cross_table_serial(std::span<const sig::PickUpSignal> probes,
                              std::span<const sig::PickUpSignal> references);

/// OpenMP-parallel kernels; identical output to the serial versions.
/// jobs = 0 uses the OpenMP default thread count.
PairTable pairwise_table_parallel(std::span<const sig::PickUpSignal> signals, int jobs = 0);
CrossTable cross_table_parallel(std::span<const sig::PickUpSignal> probes,
                                std::span<const sig::PickUpSignal> references, int jobs = 0);

/// Weighted distance from a cached per-channel row.
double combine(std::span<const double> per_channel, const WeightVector& w);

}  // namespace pickauth::batch
