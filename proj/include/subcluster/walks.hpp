#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "subcluster/graph.hpp"
#include "subcluster/sparse.hpp"

namespace subcluster {

// One lazy step driven by coin in [0, 2d): stay when coin < d, otherwise
// move along slot coin - d (padding slots are self-loops).
Vertex lazy_step(const Graph& g, Vertex x, std::uint64_t coin);

// T x W grid of 4-wise independent hash functions h: vertex -> [0, 2d).
// Cell (s, w) drives step s of walk column w.  Each cell is a random cubic
// polynomial over GF(2^61 - 1).
class WalkTable {
 public:
  static constexpr std::size_t kDefaultMaxBytes = std::size_t{256} << 20;

  WalkTable(std::size_t steps, std::size_t width, int d, std::uint64_t seed,
            std::size_t max_bytes = kDefaultMaxBytes);

  std::uint64_t coin(std::size_t step, std::size_t column, Vertex v) const;
  std::uint64_t hash(std::size_t step, std::size_t column, std::uint64_t v) const;

  std::size_t steps() const { return steps_; }
  std::size_t width() const { return width_; }
  int d() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t bytes() const { return cells_.size() * sizeof(cells_[0]); }

  static std::size_t bytes_for(std::size_t steps, std::size_t width) {
    return steps * width * sizeof(std::array<std::uint64_t, 4>);
  }

 private:
  std::size_t steps_, width_;
  int d_;
  std::uint64_t seed_;
  std::vector<std::array<std::uint64_t, 4>> cells_;  // [column][step]
};

enum class WalkMode : std::uint8_t { counter = 0, table = 1 };

// Randomness for walks.  Counter mode keys every walk by
// (seed, trial, start, lane, walk index); table mode reads hash cells from
// column (trial * lanes + lane) * r + walk index.
struct WalkSource {
  WalkMode mode = WalkMode::counter;
  std::uint64_t seed = 0;
  std::shared_ptr<const WalkTable> table;
};

// Which batch of r walks is being drawn: trial index and walk-length lane.
struct WalkBatch {
  std::uint64_t trial = 0;
  std::size_t lane = 0;
  std::size_t lanes = 1;
};

EmpiricalDistribution random_walks(const Graph& g, std::size_t r, std::size_t t, Vertex x,
                                   const WalkSource& src, const WalkBatch& batch = {});

// Same law as r independent walks, simulated by splitting counts
// multinomially at every vertex and step.  Cost scales with the support,
// not with r.
EmpiricalDistribution batched_walks(const Graph& g, std::uint64_t r, std::size_t t, Vertex x, std::uint64_t key);

}  // namespace subcluster
