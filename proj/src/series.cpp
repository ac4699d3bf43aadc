#include "pickauth/series.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace pickauth {

Series::Series(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("Series: must contain at least one value");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Series: non-finite value");
  }
}

MultiSeries::MultiSeries(std::vector<Series> channels, std::vector<std::string> channel_ids)
    : channels_(std::move(channels)), channel_ids_(std::move(channel_ids)) {
  if (channels_.empty()) throw std::invalid_argument("MultiSeries: needs at least one channel");
  if (channel_ids_.size() != channels_.size())
    throw std::invalid_argument("MultiSeries: channel/id count mismatch");
  const std::size_t len = channels_.front().size();
  for (const Series& c : channels_) {
    if (c.size() != len) throw std::invalid_argument("MultiSeries: channels differ in length");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& id : channel_ids_) {
    if (!seen.insert(id).second)
      throw std::invalid_argument("MultiSeries: duplicate channel id '" + id + "'");
  }
}

bool WarpingPath::valid_for(std::size_t n, std::size_t m) const noexcept {
  if (pairs.empty()) return false;
  if (pairs.front() != std::pair<std::size_t, std::size_t>{0, 0}) return false;
  if (pairs.back() != std::pair<std::size_t, std::size_t>{n - 1, m - 1}) return false;
  for (std::size_t l = 0; l < pairs.size(); ++l) {
    if (pairs[l].first >= n || pairs[l].second >= m) return false;
    if (l == 0) continue;
    const std::size_t di = pairs[l].first - pairs[l - 1].first;
    const std::size_t dj = pairs[l].second - pairs[l - 1].second;
    if (pairs[l].first < pairs[l - 1].first || pairs[l].second < pairs[l - 1].second) return false;
    if (di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
  }
  return true;
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("WeightVector: empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("WeightVector: weights must be finite and non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("WeightVector: weights must sum to 1");
}

WeightVector WeightVector::uniform(std::size_t k) {
  if (k == 0) throw std::invalid_argument("WeightVector::uniform: k must be positive");
  return WeightVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

}  // namespace pickauth
