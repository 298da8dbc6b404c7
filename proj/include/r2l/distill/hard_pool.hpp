#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "r2l/common/rng.hpp"
#include "r2l/scene/ray.hpp"
#include "r2l/tensor/matrix.hpp"

namespace r2l::distill {

/// A hard example keeps the ray itself (re-encoded on every reuse), its
/// target and the loss it had when inserted.
struct PoolEntry {
  Ray ray;
  std::array<float, 3> target{};
  double loss = 0.0;
};

/// Number of pool rays in a batch of B at ratio r: ⌊r·B⌋.
std::size_t pool_share(double ratio, std::size_t batch);

/// Bounded store of high-loss rays with uniform random eviction.
class HardExamplePool {
 public:
  /// Throws ConfigError when ratio ∉ [0, 1).
  HardExamplePool(double ratio, std::size_t capacity);
  /// Capacity 4·r·B.
  static HardExamplePool for_batch(double ratio, std::size_t batch);

  double ratio() const { return ratio_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<PoolEntry>& entries() const { return entries_; }

  /// Inserts the ⌊r·B⌋ largest-loss rays of the batch (ties keep batch order).
  /// Returns the number inserted. Throws UsageError for misaligned or non-finite losses.
  std::size_t update(std::span<const Ray> rays, const tensor::Matrix<float>& targets, std::span<const double> losses,
                     Rng& rng);

  const PoolEntry& draw(Rng& rng) const;

 private:
  double ratio_;
  std::size_t capacity_;
  std::vector<PoolEntry> entries_;
};

/// Visits every index of [0, n) exactly once per epoch, reshuffling between epochs.
class EpochStream {
 public:
  EpochStream(std::size_t n, std::uint64_t seed);
  std::size_t next();
  std::size_t size() const { return order_.size(); }
  std::uint64_t epoch() const { return epoch_; }

 private:
  void reshuffle();

  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::uint64_t epoch_ = 0;
  Rng rng_;
};

struct TrainingBatch {
  std::vector<Ray> rays;
  tensor::Matrix<float> targets;  // B × 3
  std::size_t from_pool = 0;
};

/// Source of fresh supervised rays (dataset record i → ray and target).
struct RecordSource {
  virtual ~RecordSource() = default;
  virtual std::size_t size() const = 0;
  virtual Ray ray(std::size_t i) const = 0;
  virtual std::array<float, 3> target(std::size_t i) const = 0;
};

/// B − min(⌊r·B⌋, |pool|) fresh rays from the epoch stream, then the rest drawn
/// uniformly from the pool. Always exactly B rays.
TrainingBatch compose_batch(const RecordSource& source, EpochStream& stream, const HardExamplePool& pool,
                            std::size_t batch, double ratio, Rng& rng);

}  // namespace r2l::distill
