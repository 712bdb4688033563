#include "subcluster/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "subcluster/errors.hpp"

namespace subcluster {

namespace {

std::string line_msg(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

Graph::Graph(std::size_t n, int d, const std::vector<std::vector<Vertex>>& adjacency)
    : n_(n), d_(d) {
  if (d < 1) throw ParseError(line_msg(1, "degree bound must be positive"));
  if (adjacency.size() != n) throw ParseError("adjacency has " + std::to_string(adjacency.size()) +
                                              " rows, expected " + std::to_string(n));
  offsets_.assign(n + 1, 0);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& row = adjacency[x];
    if (row.size() > static_cast<std::size_t>(d))
      throw ParseError(line_msg(x + 2, "vertex " + std::to_string(x) + " lists " +
                                           std::to_string(row.size()) + " neighbors, bound is " +
                                           std::to_string(d)));
    for (Vertex y : row)
      if (y >= n) throw ParseError(line_msg(x + 2, "neighbor id " + std::to_string(y) + " out of range"));
    std::vector<Vertex> sorted(row);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] == sorted[i - 1] && sorted[i] != x)
        throw ParseError(line_msg(x + 2, "parallel edge to " + std::to_string(sorted[i])));
    offsets_[x + 1] = offsets_[x] + row.size();
  }
  nbrs_.reserve(offsets_[n]);
  for (const auto& row : adjacency) nbrs_.insert(nbrs_.end(), row.begin(), row.end());

  for (std::size_t x = 0; x < n; ++x) {
    for (Vertex y : neighbors(static_cast<Vertex>(x))) {
      if (y == x) continue;
      auto ny = neighbors(y);
      if (std::find(ny.begin(), ny.end(), static_cast<Vertex>(x)) == ny.end())
        throw ParseError(line_msg(x + 2, "asymmetric adjacency: " + std::to_string(x) + " lists " +
                                             std::to_string(y) + " but not vice versa"));
    }
  }
}

int Graph::degree(Vertex x) const {
  if (x >= n_) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  return static_cast<int>(offsets_[x + 1] - offsets_[x]);
}

std::span<const Vertex> Graph::neighbors(Vertex x) const {
  if (x >= n_) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  return {nbrs_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
}

Vertex Graph::neighbor(Vertex x, int i) const {
  if (x >= n_) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
  if (i < 0 || i >= d_) throw ContractViolation("neighbor index " + std::to_string(i) + " outside [0,d)");
  return neighbor_unchecked(x, i);
}

std::uint64_t Graph::digest() const {
  // FNV-1a over n, d and the adjacency lists (with per-vertex lengths).
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(n_);
  mix(static_cast<std::uint64_t>(d_));
  for (std::size_t x = 0; x < n_; ++x) {
    mix(offsets_[x + 1] - offsets_[x]);
    for (std::size_t j = offsets_[x]; j < offsets_[x + 1]; ++j) mix(nbrs_[j]);
  }
  return h;
}

std::size_t Graph::edge_count() const {
  std::size_t loops = 0;
  for (std::size_t x = 0; x < n_; ++x)
    for (Vertex y : neighbors(static_cast<Vertex>(x)))
      if (y == x) ++loops;
  return (nbrs_.size() - loops) / 2 + loops;
}

Graph read_graph(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(line_msg(1, "missing header"));
  std::istringstream hs(line);
  long long n = -1, d = -1;
  std::string extra;
  if (!(hs >> n >> d) || (hs >> extra) || n < 0 || d < 1)
    throw ParseError(line_msg(1, "malformed header, expected 'n d'"));
  std::vector<std::vector<Vertex>> adj(static_cast<std::size_t>(n));
  for (long long x = 0; x < n; ++x) {
    if (!std::getline(in, line))
      throw ParseError(line_msg(x + 2, "unexpected end of file, expected " + std::to_string(n) + " vertex lines"));
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p == end) break;
      unsigned long long v = 0;
      auto [q, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || (q < end && *q != ' ' && *q != '\t' && *q != '\r'))
        throw ParseError(line_msg(x + 2, "malformed neighbor id"));
      if (v >= static_cast<unsigned long long>(n))
        throw ParseError(line_msg(x + 2, "neighbor id " + std::to_string(v) + " out of range"));
      adj[x].push_back(static_cast<Vertex>(v));
      if (adj[x].size() > static_cast<std::size_t>(d))
        throw ParseError(line_msg(x + 2, "more than d=" + std::to_string(d) + " neighbors"));
      p = q;
    }
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw ParseError("trailing content after " + std::to_string(n) + " vertex lines");
  return Graph(static_cast<std::size_t>(n), static_cast<int>(d), adj);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.n() << ' ' << g.d() << '\n';
  for (std::size_t x = 0; x < g.n(); ++x) {
    bool first = true;
    for (Vertex y : g.neighbors(static_cast<Vertex>(x))) {
      if (!first) out << ' ';
      out << y;
      first = false;
    }
    out << '\n';
  }
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path);
  try {
    return read_graph(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write graph file " + path);
  write_graph(out, g);
}

Clustering::Clustering(std::vector<int> l, int kk) : labels(std::move(l)), k(kk) {
  if (k < 1) throw ContractViolation("cluster count must be positive");
  for (int v : labels)
    if (v < 0 || v >= k) throw ContractViolation("label " + std::to_string(v) + " outside [0,k)");
}

std::vector<std::size_t> Clustering::sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(k), 0);
  for (int v : labels) ++s[static_cast<std::size_t>(v)];
  return s;
}

std::vector<std::vector<Vertex>> Clustering::members() const {
  std::vector<std::vector<Vertex>> m(static_cast<std::size_t>(k));
  for (std::size_t x = 0; x < labels.size(); ++x) m[static_cast<std::size_t>(labels[x])].push_back(static_cast<Vertex>(x));
  return m;
}

double Clustering::eta() const {
  auto s = sizes();
  auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  if (*lo == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(*hi) / static_cast<double>(*lo);
}

Clustering read_labels(std::istream& in, std::size_t n) {
  std::vector<int> labels;
  labels.reserve(n);
  std::string line;
  std::size_t lineno = 0;
  int k = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (labels.size() == n) continue;
      throw ParseError(line_msg(lineno, "empty label line"));
    }
    std::istringstream ls(line);
    long long v;
    std::string extra;
    if (!(ls >> v) || (ls >> extra) || v < 0) throw ParseError(line_msg(lineno, "malformed label"));
    if (labels.size() == n) throw ParseError(line_msg(lineno, "more than n labels"));
    labels.push_back(static_cast<int>(v));
    k = std::max(k, static_cast<int>(v) + 1);
  }
  if (labels.size() != n)
    throw ParseError("expected " + std::to_string(n) + " labels, found " + std::to_string(labels.size()));
  return Clustering(std::move(labels), std::max(k, 1));
}

void write_labels(std::ostream& out, const Clustering& c) {
  for (int v : c.labels) out << v << '\n';
}

Clustering load_labels(const std::string& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open labels file " + path);
  try {
    return read_labels(in, n);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_labels(const Clustering& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write labels file " + path);
  write_labels(out, c);
}

double outer_conductance(const Graph& g, std::span<const Vertex> S) {
  if (S.empty()) throw ContractViolation("outer_conductance of an empty set");
  std::vector<char> in(g.n(), 0);
  std::size_t size = 0;
  for (Vertex x : S) {
    if (x >= g.n()) throw ContractViolation("vertex " + std::to_string(x) + " out of range");
    if (!in[x]) ++size;
    in[x] = 1;
  }
  std::size_t cut = 0;
  for (std::size_t x = 0; x < g.n(); ++x) {
    if (!in[x]) continue;
    for (Vertex y : g.neighbors(static_cast<Vertex>(x)))
      if (!in[y]) ++cut;
  }
  return static_cast<double>(cut) / (static_cast<double>(g.d()) * static_cast<double>(size));
}

std::vector<int> connected_components(const Graph& g) {
  std::vector<int> comp(g.n(), -1);
  int next = 0;
  std::vector<Vertex> stack;
  for (std::size_t s = 0; s < g.n(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(static_cast<Vertex>(s));
    while (!stack.empty()) {
      Vertex x = stack.back();
      stack.pop_back();
      for (Vertex y : g.neighbors(x))
        if (comp[y] < 0) {
          comp[y] = next;
          stack.push_back(y);
        }
    }
    ++next;
  }
  return comp;
}

}  // namespace subcluster
