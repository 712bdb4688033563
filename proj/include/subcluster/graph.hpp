#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace subcluster {

using Vertex = std::uint32_t;

// Undirected graph with maximum degree d.  Vertices with fewer than d
// neighbors are padded with implicit self-loops, so every vertex behaves as
// if it had degree exactly d.  Immutable after construction.
class Graph {
 public:
  Graph() = default;
  // Validates bounds, degree and symmetry; throws ParseError naming the
  // offending vertex (line = vertex + 2 in the text format).
  Graph(std::size_t n, int d, const std::vector<std::vector<Vertex>>& adjacency);

  std::size_t n() const { return n_; }
  int d() const { return d_; }
  int degree(Vertex x) const;
  std::span<const Vertex> neighbors(Vertex x) const;

  // i-th neighbor with self-loop padding for deg(x) <= i < d.
  Vertex neighbor(Vertex x, int i) const;
  // Same without argument checks, for inner loops.
  Vertex neighbor_unchecked(Vertex x, int i) const {
    const std::size_t b = offsets_[x];
    return static_cast<std::size_t>(i) < offsets_[x + 1] - b ? nbrs_[b + i] : x;
  }

  std::uint64_t digest() const;
  std::size_t edge_count() const;  // undirected real edges, self-loops counted once

  bool operator==(const Graph& o) const = default;

 private:
  std::size_t n_ = 0;
  int d_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> nbrs_;
};

Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);
Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

struct Clustering {
  std::vector<int> labels;
  int k = 0;

  Clustering() = default;
  Clustering(std::vector<int> labels, int k);

  std::vector<std::size_t> sizes() const;
  std::vector<std::vector<Vertex>> members() const;
  double eta() const;  // max/min cluster size
};

Clustering read_labels(std::istream& in, std::size_t n);
void write_labels(std::ostream& out, const Clustering& c);
Clustering load_labels(const std::string& path, std::size_t n);
void save_labels(const Clustering& c, const std::string& path);

// |E(S, V \ S)| / (d |S|), real edges only.  Duplicates in S are ignored.
double outer_conductance(const Graph& g, std::span<const Vertex> S);

// Component id per vertex, ids assigned in order of smallest member.
std::vector<int> connected_components(const Graph& g);

}  // namespace subcluster
