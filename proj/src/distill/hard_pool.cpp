#include "r2l/distill/hard_pool.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "r2l/common/error.hpp"

namespace r2l::distill {

std::size_t pool_share(double ratio, std::size_t batch) {
  // The epsilon keeps e.g. 0.2·10 at 2 despite binary rounding of 0.2.
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(batch) + 1e-9));
}

HardExamplePool::HardExamplePool(double ratio, std::size_t capacity) : ratio_(ratio), capacity_(capacity) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw ConfigError("hard-example ratio must lie in [0, 1)");
  entries_.reserve(capacity_);
}

HardExamplePool HardExamplePool::for_batch(double ratio, std::size_t batch) {
  return HardExamplePool(ratio, 4 * pool_share(ratio, batch));
}

std::size_t HardExamplePool::update(std::span<const Ray> rays, const tensor::Matrix<float>& targets,
                                    std::span<const double> losses, Rng& rng) {
  if (rays.size() != losses.size() || targets.rows() != static_cast<tensor::Index>(rays.size())) {
    throw UsageError("pool update: rays, targets and losses are not aligned");
  }
  for (const double l : losses) {
    if (!std::isfinite(l)) throw UsageError("pool update: non-finite loss");
  }
  const std::size_t take = std::min(pool_share(ratio_, rays.size()), rays.size());
  if (take == 0 || capacity_ == 0) return 0;
  std::vector<std::size_t> order(rays.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) { return losses[a] > losses[b] || (losses[a] == losses[b] && a < b); });
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t i = order[k];
    const auto t = targets.row(static_cast<tensor::Index>(i));
    PoolEntry e{rays[i], {t(0), t(1), t(2)}, losses[i]};
    if (entries_.size() < capacity_) {
      entries_.push_back(e);
    } else {
      entries_[rng.below(entries_.size())] = e;
    }
  }
  return take;
}

const PoolEntry& HardExamplePool::draw(Rng& rng) const {
  if (entries_.empty()) throw UsageError("draw from an empty hard-example pool");
  return entries_[rng.below(entries_.size())];
}

EpochStream::EpochStream(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
  if (n == 0) throw UsageError("epoch stream over an empty dataset");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  reshuffle();
}

void EpochStream::reshuffle() {
  shuffle(order_.begin(), order_.end(), rng_);
  cursor_ = 0;
}

std::size_t EpochStream::next() {
  if (cursor_ == order_.size()) {
    reshuffle();
    ++epoch_;
  }
  return order_[cursor_++];
}

TrainingBatch compose_batch(const RecordSource& source, EpochStream& stream, const HardExamplePool& pool,
                            std::size_t batch, double ratio, Rng& rng) {
  if (batch == 0) throw UsageError("compose_batch: batch size must be ≥ 1");
  const std::size_t n_pool = std::min(pool_share(ratio, batch), pool.size());
  const std::size_t n_fresh = batch - n_pool;
  TrainingBatch out;
  out.rays.reserve(batch);
  out.targets.resize(static_cast<tensor::Index>(batch), 3);
  for (std::size_t i = 0; i < n_fresh; ++i) {
    const std::size_t k = stream.next();
    out.rays.push_back(source.ray(k));
    const auto t = source.target(k);
    out.targets.row(static_cast<tensor::Index>(i)) << t[0], t[1], t[2];
  }
  for (std::size_t i = n_fresh; i < batch; ++i) {
    const PoolEntry& e = pool.draw(rng);
    out.rays.push_back(e.ray);
    out.targets.row(static_cast<tensor::Index>(i)) << e.target[0], e.target[1], e.target[2];
  }
  out.from_pool = n_pool;
  return out;
}

}  // namespace r2l::distill
