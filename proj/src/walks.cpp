#include "subcluster/walks.hpp"

#include <algorithm>
#include <random>

#include "subcluster/errors.hpp"
#include "subcluster/rng.hpp"

namespace subcluster {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 z = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(z) & kMersenne61;
  std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
  std::uint64_t s = lo + hi;
  return s >= kMersenne61 ? s - kMersenne61 : s;
}

std::uint64_t addmod61(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kMersenne61 ? s - kMersenne61 : s;
}

}  // namespace

Vertex lazy_step(const Graph& g, Vertex x, std::uint64_t coin) {
  const auto d = static_cast<std::uint64_t>(g.d());
  if (coin >= 2 * d) throw ContractViolation("coin outside [0, 2d)");
  if (x >= g.n()) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  return coin < d ? x : g.neighbor_unchecked(x, static_cast<int>(coin - d));
}

WalkTable::WalkTable(std::size_t steps, std::size_t width, int d, std::uint64_t seed, std::size_t max_bytes)
    : steps_(steps), width_(width), d_(d), seed_(seed) {
  if (d < 1) throw ContractViolation("walk table needs d >= 1");
  if (width != 0 && steps > max_bytes / width / sizeof(cells_[0]))
    throw CapacityError("walk table of " + std::to_string(steps) + " x " + std::to_string(width) +
                        " cells exceeds the memory cap of " + std::to_string(max_bytes) + " bytes");
  cells_.resize(steps * width);
  for (std::size_t w = 0; w < width; ++w) {
    Stream s(derive_key({seed, 0x7461626cULL, w}));
    for (std::size_t t = 0; t < steps; ++t) {
      auto& c = cells_[w * steps + t];
      for (auto& a : c) a = s.below(kMersenne61);
    }
  }
}

std::uint64_t WalkTable::hash(std::size_t step, std::size_t column, std::uint64_t v) const {
  const auto& c = cells_[column * steps_ + step];
  v %= kMersenne61;
  std::uint64_t h = c[3];
  h = addmod61(mulmod61(h, v), c[2]);
  h = addmod61(mulmod61(h, v), c[1]);
  h = addmod61(mulmod61(h, v), c[0]);
  return h;
}

std::uint64_t WalkTable::coin(std::size_t step, std::size_t column, Vertex v) const {
  if (step >= steps_ || column >= width_)
    throw CapacityError("walk table capacity exceeded: cell (" + std::to_string(step) + ", " +
                        std::to_string(column) + ") outside " + std::to_string(steps_) + " x " +
                        std::to_string(width_));
  return hash(step, column, v) % (2 * static_cast<std::uint64_t>(d_));
}

EmpiricalDistribution random_walks(const Graph& g, std::size_t r, std::size_t t, Vertex x, const WalkSource& src,
                                   const WalkBatch& batch) {
  if (r < 1) throw ContractViolation("random_walks needs r >= 1");
  if (x >= g.n()) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  std::vector<Vertex> ends(r);
  const auto two_d = 2 * static_cast<std::uint64_t>(g.d());
  const auto d = static_cast<std::uint64_t>(g.d());
  if (src.mode == WalkMode::table) {
    const WalkTable* table = src.table.get();
    if (!table) throw ContractViolation("table walk mode without a walk table");
    if (table->d() != g.d()) throw ContractViolation("walk table built for a different degree bound");
    const std::size_t base = (static_cast<std::size_t>(batch.trial) * batch.lanes + batch.lane) * r;
    if (t > table->steps() || (r > 0 && base + r > table->width()))
      throw CapacityError("walk table capacity exceeded: need " + std::to_string(t) + " steps and column " +
                          std::to_string(base + r) + ", table is " + std::to_string(table->steps()) + " x " +
                          std::to_string(table->width()));
    for (std::size_t i = 0; i < r; ++i) {
      Vertex v = x;
      for (std::size_t s = 0; s < t; ++s) {
        std::uint64_t c = table->hash(s, base + i, v) % two_d;
        if (c >= d) v = g.neighbor_unchecked(v, static_cast<int>(c - d));
      }
      ends[i] = v;
    }
  } else {
    for (std::size_t i = 0; i < r; ++i) {
      Stream s(derive_key({src.seed, batch.trial, x, batch.lane, i}));
      Vertex v = x;
      for (std::size_t step = 0; step < t; ++step) {
        std::uint64_t c = s.below(two_d);
        if (c >= d) v = g.neighbor_unchecked(v, static_cast<int>(c - d));
      }
      ends[i] = v;
    }
  }
  return EmpiricalDistribution::from_endpoints(std::move(ends));
}

EmpiricalDistribution batched_walks(const Graph& g, std::uint64_t r, std::size_t t, Vertex x, std::uint64_t key) {
  if (r < 1) throw ContractViolation("batched_walks needs r >= 1");
  if (x >= g.n()) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  Stream rng(key);
  const int d = g.d();
  std::vector<CountEntry> cur{{x, r}};
  std::vector<CountEntry> next;
  for (std::size_t step = 0; step < t; ++step) {
    next.clear();
    for (const auto& [v, c] : cur) {
      std::uint64_t stay = std::binomial_distribution<std::uint64_t>(c, 0.5)(rng);
      std::uint64_t left = c - stay;
      std::uint64_t self = stay;
      for (int i = 0; i < d && left > 0; ++i) {
        std::uint64_t take =
            i == d - 1 ? left : std::binomial_distribution<std::uint64_t>(left, 1.0 / static_cast<double>(d - i))(rng);
        left -= take;
        if (take == 0) continue;
        Vertex y = g.neighbor_unchecked(v, i);
        if (y == v)
          self += take;
        else
          next.push_back({y, take});
      }
      if (self > 0) next.push_back({v, self});
    }
    std::sort(next.begin(), next.end(), [](const CountEntry& a, const CountEntry& b) { return a.id < b.id; });
    cur.clear();
    for (const auto& e : next) {
      if (!cur.empty() && cur.back().id == e.id)
        cur.back().count += e.count;
      else
        cur.push_back(e);
    }
  }
  return {std::move(cur), r};
}

}  // namespace subcluster
