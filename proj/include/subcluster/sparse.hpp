#pragma once

#include <cstdint>
#include <vector>

#include "subcluster/bytes.hpp"
#include "subcluster/graph.hpp"

namespace subcluster {

struct SparseEntry {
  Vertex id;
  double w;
  bool operator==(const SparseEntry&) const = default;
};

// Sorted by id, ids unique, no stored zeros.
struct SparseVector {
  std::vector<SparseEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  double at(Vertex id) const;
  double sum() const;
  bool operator==(const SparseVector&) const = default;

  // Sorts, merges duplicate ids (summing in input order) and drops zeros.
  static SparseVector from_unsorted(std::vector<SparseEntry> items);
};

double sparse_dot(const SparseVector& u, const SparseVector& v);
// acc += coeff * v
void sparse_axpy(SparseVector& acc, double coeff, const SparseVector& v);
SparseVector scaled(const SparseVector& v, double coeff);

struct CountEntry {
  Vertex id;
  std::uint64_t count;
  bool operator==(const CountEntry&) const = default;
};

// Empirical distribution of r walk endpoints: exact integer counts.
struct EmpiricalDistribution {
  std::vector<CountEntry> counts;
  std::uint64_t r = 0;

  double weight(Vertex id) const;
  std::uint64_t total() const;
  SparseVector to_sparse(double coeff = 1.0) const;
  bool operator==(const EmpiricalDistribution&) const = default;

  static EmpiricalDistribution from_endpoints(std::vector<Vertex> endpoints);
};

// Record: varint count, then (varint id delta, f64 little-endian) pairs.
void write_sparse(ByteWriter& out, const SparseVector& v);
SparseVector read_sparse(ByteReader& in);

}  // namespace subcluster
