#include <doctest.h>

#include <cmath>
#include <map>

#include "subcluster/bytes.hpp"
#include "subcluster/errors.hpp"
#include "subcluster/exact_ref.hpp"
#include "subcluster/generator.hpp"
#include "subcluster/sparse.hpp"
#include "subcluster/walks.hpp"

using namespace subcluster;

namespace {

SparseVector sv(std::vector<SparseEntry> e) { return SparseVector::from_unsorted(std::move(e)); }

WalkSource counter(std::uint64_t seed) { return {WalkMode::counter, seed, nullptr}; }

}  // namespace

TEST_CASE("lazy step") {
  Graph iso(1, 3, {{}});
  for (std::uint64_t c = 0; c < 6; ++c) CHECK(lazy_step(iso, 0, c) == 0);

  Graph edge(2, 1, {{1}, {0}});
  CHECK(lazy_step(edge, 0, 0) == 0);
  CHECK(lazy_step(edge, 0, 1) == 1);
  CHECK_THROWS_AS(lazy_step(edge, 0, 2), ContractViolation);

  // Enumerating every coin reproduces the row of M = I/2 + A/(2d).
  Graph tri(3, 3, {{1, 2}, {0, 2}, {0, 1}});
  const Eigen::MatrixXd M = lazy_walk_matrix(tri);
  std::map<Vertex, int> hits;
  for (std::uint64_t c = 0; c < 6; ++c) ++hits[lazy_step(tri, 0, c)];
  for (Vertex y = 0; y < 3; ++y) CHECK(hits[y] / 6.0 == doctest::Approx(M(0, y)));
  CHECK(M(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(M(0, 1) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("random walks basic laws") {
  const auto inst = generate_clusterable({40, 4, 6, 0.0, 1});
  const Graph& g = inst.graph;
  const auto zero = random_walks(g, 17, 0, 5, counter(1));
  REQUIRE(zero.counts.size() == 1);
  CHECK(zero.counts[0] == CountEntry{5, 17});

  // Components are never left.
  for (std::size_t t : {1u, 7u, 40u}) {
    const auto p = random_walks(g, 200, t, 3, counter(9));
    CHECK(p.total() == 200);
    CHECK(p.counts.size() <= 200);
    for (const auto& e : p.counts) CHECK(inst.truth.labels[e.id] == inst.truth.labels[3]);
    double mass = 0;
    for (const auto& e : p.counts) mass += p.weight(e.id);
    CHECK(mass == doctest::Approx(1.0));
  }

  Graph edge(2, 1, {{1}, {0}});
  const std::size_t r = 40000;
  const auto p = random_walks(edge, r, 1, 0, counter(3));
  const double se = std::sqrt(0.25 / r);
  CHECK(std::abs(p.weight(0) - 0.5) <= 3 * se);
  CHECK(std::abs(p.weight(1) - 0.5) <= 3 * se);
}

TEST_CASE("random walks are unbiased against dense M^t") {
  const auto inst = generate_clusterable({30, 2, 4, 0.1, 4});
  const Graph& g = inst.graph;
  const std::size_t t = 3, r = 50, runs = 400;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(g.n());
  e[0] = 1;
  const Eigen::VectorXd exact = walk_power(g, e, t);
  for (WalkMode mode : {WalkMode::counter, WalkMode::table}) {
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(g.n());
    auto table = std::make_shared<WalkTable>(t, r * runs, g.d(), 77);
    for (std::size_t run = 0; run < runs; ++run) {
      WalkSource src{mode, 100 + run, table};
      const auto p = random_walks(g, r, t, 0, src, {run, 0, 1});
      for (const auto& c : p.counts) avg[c.id] += p.weight(c.id);
    }
    avg /= static_cast<double>(runs);
    const double total = static_cast<double>(r * runs);
    for (Vertex y = 0; y < g.n(); ++y) {
      const double sd = std::sqrt(exact[y] * (1 - exact[y]) / total);
      CHECK(std::abs(avg[y] - exact[y]) <= 5 * sd + 1e-12);
    }
  }
}

TEST_CASE("batched walks follow the same law") {
  const auto inst = generate_clusterable({30, 2, 4, 0.1, 4});
  const Graph& g = inst.graph;
  const std::uint64_t r = 1000000;
  const auto p = batched_walks(g, r, 4, 2, 99);
  CHECK(p.total() == r);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(g.n());
  e[2] = 1;
  const Eigen::VectorXd exact = walk_power(g, e, 4);
  for (Vertex y = 0; y < g.n(); ++y) {
    const double sd = std::sqrt(exact[y] * (1 - exact[y]) / static_cast<double>(r));
    CHECK(std::abs(p.weight(y) - exact[y]) <= 5 * sd + 1e-12);
  }
  CHECK(batched_walks(g, r, 4, 2, 99) == p);
}

TEST_CASE("walk table determinism, range and capacity") {
  const auto inst = generate_clusterable({40, 4, 6, 0.0, 1});
  const Graph& g = inst.graph;
  auto t1 = std::make_shared<WalkTable>(10, 64, g.d(), 5);
  auto t2 = std::make_shared<WalkTable>(10, 64, g.d(), 5);
  WalkSource a{WalkMode::table, 0, t1}, b{WalkMode::table, 0, t2};
  CHECK(random_walks(g, 32, 10, 7, a, {1, 0, 1}) == random_walks(g, 32, 10, 7, b, {1, 0, 1}));
  CHECK_THROWS_AS(random_walks(g, 32, 10, 7, a, {2, 0, 1}), CapacityError);
  CHECK_THROWS_AS(random_walks(g, 32, 11, 7, a, {0, 0, 1}), CapacityError);
  CHECK_THROWS_AS(WalkTable(1000, 1000, 6, 1, 1000), CapacityError);

  // Coins land in [0, 2d) and are close to uniform over many vertices.
  std::vector<int> hist(12, 0);
  for (Vertex v = 0; v < 12000; ++v) {
    const auto c = t1->coin(3, 9, v);
    REQUIRE(c < 12);
    ++hist[c];
  }
  for (int h : hist) CHECK(std::abs(h - 1000) < 150);
  // Pairwise: the joint distribution of two points' coins over random cells.
  int same = 0;
  WalkTable wide(1, 20000, 6, 9);
  for (std::size_t w = 0; w < 20000; ++w) same += wide.coin(0, w, 3) == wide.coin(0, w, 4);
  CHECK(std::abs(same / 20000.0 - 1.0 / 12.0) < 0.01);
}

TEST_CASE("counter mode is keyed per walk") {
  const auto inst = generate_clusterable({40, 4, 6, 0.0, 1});
  const Graph& g = inst.graph;
  const auto a = random_walks(g, 50, 6, 7, counter(3), {4, 1, 2});
  CHECK(a == random_walks(g, 50, 6, 7, counter(3), {4, 1, 2}));
  CHECK(!(a == random_walks(g, 50, 6, 7, counter(3), {5, 1, 2})));
}

TEST_CASE("sparse dot and axpy") {
  CHECK(sparse_dot(sv({{0, 1}}), sv({{1, 1}})) == 0.0);
  CHECK(sparse_dot(sv({{0, .5}, {1, .5}}), sv({{0, .5}, {1, .5}})) == doctest::Approx(0.5));
  CHECK(sparse_dot(sv({{0, .25}, {3, .75}}), sv({{3, .5}, {7, .5}})) == doctest::Approx(0.375));

  SparseVector acc;
  sparse_axpy(acc, 1.0, sv({{4, 1}}));
  CHECK(acc == sv({{4, 1}}));
  SparseVector v = sv({{1, .3}, {5, -2}});
  SparseVector b = v;
  sparse_axpy(b, 1.0, v);
  sparse_axpy(b, -2.0, v);
  CHECK(b.empty());
  SparseVector c = sv({{0, 1}});
  sparse_axpy(c, -1.0, sv({{0, 1}, {1, 1}}));
  CHECK(c == sv({{1, -1}}));

  const auto u = SparseVector::from_unsorted({{3, 1}, {1, 2}, {3, -1}, {2, 0}});
  CHECK(u == sv({{1, 2}}));
}

TEST_CASE("sparse serialization round trip") {
  const auto v = sv({{2, 0.5}, {9, -1.25}, {100000, 3.0}});
  ByteWriter w;
  write_sparse(w, v);
  const std::string bytes = w.str();
  ByteReader r(bytes);
  CHECK(read_sparse(r) == v);
  ByteReader cut(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_sparse(cut), ParseError);
}

TEST_CASE("empirical distributions keep exact counts") {
  const auto e = EmpiricalDistribution::from_endpoints({4, 1, 4, 4, 2});
  CHECK(e.r == 5);
  CHECK(e.total() == 5);
  CHECK(e.weight(4) == doctest::Approx(0.6));
  CHECK(e.to_sparse(2.0).at(1) == doctest::Approx(0.4));
}
