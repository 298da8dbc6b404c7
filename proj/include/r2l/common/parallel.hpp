#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace r2l {

struct ShardRange {
  std::size_t index;
  std::size_t begin;
  std::size_t end;
};

/// Contiguous, deterministic split of [0, n) into `shards` pieces. Earlier
/// shards get the remainder so the layout only depends on (n, shards).
inline std::vector<ShardRange> split_shards(std::size_t n, std::size_t shards) {
  if (shards == 0) shards = 1;
  std::vector<ShardRange> out;
  out.reserve(shards);
  const std::size_t base = n / shards;
  const std::size_t extra = n % shards;
  std::size_t at = 0;
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t len = base + (s < extra ? 1 : 0);
    out.push_back({s, at, at + len});
    at += len;
  }
  return out;
}

inline std::size_t default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(shard) for every shard of [0, n); shard 0 runs on the calling
/// thread. Exceptions are rethrown in shard order after all workers join.
inline void parallel_shards(std::size_t n, std::size_t threads,
                            const std::function<void(const ShardRange&)>& fn) {
  const auto shards = split_shards(n, threads == 0 ? 1 : threads);
  if (shards.size() == 1) {
    fn(shards.front());
    return;
  }
  std::vector<std::exception_ptr> errors(shards.size());
  {
    std::vector<std::jthread> workers;
    workers.reserve(shards.size() - 1);
    for (std::size_t s = 1; s < shards.size(); ++s) {
      workers.emplace_back([&, s] {
        try {
          fn(shards[s]);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
    try {
      fn(shards[0]);
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace r2l
