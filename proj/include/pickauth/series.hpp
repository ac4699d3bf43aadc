#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace pickauth {

/// One channel of a time series. Construction validates that the channel is
/// non-empty and every value is finite, so the DP kernels never see NaN/Inf.
class Series {
public:
  explicit Series(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool operator==(const Series&) const = default;

private:
  std::vector<double> values_;
};

/// k equal-length channels with unique labels, e.g. acc-x..gyr-z.
class MultiSeries {
public:
  MultiSeries(std::vector<Series> channels, std::vector<std::string> channel_ids);

  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t length() const noexcept { return channels_.front().size(); }
  const Series& channel(std::size_t i) const noexcept { return channels_[i]; }
  const std::vector<Series>& channels() const noexcept { return channels_; }
  const std::vector<std::string>& channel_ids() const noexcept { return channel_ids_; }

  bool operator==(const MultiSeries&) const = default;

private:
  std::vector<Series> channels_;
  std::vector<std::string> channel_ids_;
};

/// Alignment between two sequences as an ordered list of index pairs.
/// Indices are 0-based; a valid path starts at (0,0), ends at (n-1,m-1) and
/// each step advances either index by 0 or 1, never both by 0.
struct WarpingPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t length() const noexcept { return pairs.size(); }
  bool valid_for(std::size_t n, std::size_t m) const noexcept;

  bool operator==(const WarpingPath&) const = default;
};

/// Non-negative per-channel weights summing to 1 (tolerance 1e-9).
class WeightVector {
public:
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t k);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  const std::vector<double>& values() const noexcept { return weights_; }

  bool operator==(const WeightVector&) const = default;

private:
  std::vector<double> weights_;
};

}  // namespace pickauth
