#include "subcluster/sparse.hpp"

#include <algorithm>

namespace subcluster {

double SparseVector::at(Vertex id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const SparseEntry& e, Vertex v) { return e.id < v; });
  return it != entries.end() && it->id == id ? it->w : 0.0;
}

double SparseVector::sum() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.w;
  return s;
}

SparseVector SparseVector::from_unsorted(std::vector<SparseEntry> items) {
  std::stable_sort(items.begin(), items.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.id < b.id; });
  SparseVector out;
  out.entries.reserve(items.size());
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    double w = 0.0;
    for (; j < items.size() && items[j].id == items[i].id; ++j) w += items[j].w;
    if (w != 0.0) out.entries.push_back({items[i].id, w});
    i = j;
  }
  return out;
}

double sparse_dot(const SparseVector& u, const SparseVector& v) {
  double s = 0.0;
  auto a = u.entries.begin(), b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->id < b->id) {
      ++a;
    } else if (b->id < a->id) {
      ++b;
    } else {
      s += a->w * b->w;
      ++a;
      ++b;
    }
  }
  return s;
}

void sparse_axpy(SparseVector& acc, double coeff, const SparseVector& v) {
  std::vector<SparseEntry> merged;
  merged.reserve(acc.size() + v.size());
  auto a = acc.entries.cbegin();
  auto b = v.entries.cbegin();
  while (a != acc.entries.end() || b != v.entries.end()) {
    if (b == v.entries.end() || (a != acc.entries.end() && a->id < b->id)) {
      merged.push_back(*a++);
    } else if (a == acc.entries.end() || b->id < a->id) {
      double w = coeff * b->w;
      if (w != 0.0) merged.push_back({b->id, w});
      ++b;
    } else {
      double w = a->w + coeff * b->w;
      if (w != 0.0) merged.push_back({a->id, w});
      ++a;
      ++b;
    }
  }
  acc.entries = std::move(merged);
}

SparseVector scaled(const SparseVector& v, double coeff) {
  SparseVector out;
  sparse_axpy(out, coeff, v);
  return out;
}

double EmpiricalDistribution::weight(Vertex id) const {
  auto it = std::lower_bound(counts.begin(), counts.end(), id,
                             [](const CountEntry& e, Vertex v) { return e.id < v; });
  if (it == counts.end() || it->id != id) return 0.0;
  return static_cast<double>(it->count) / static_cast<double>(r);
}

std::uint64_t EmpiricalDistribution::total() const {
  std::uint64_t s = 0;
  for (const auto& c : counts) s += c.count;
  return s;
}

SparseVector EmpiricalDistribution::to_sparse(double coeff) const {
  SparseVector out;
  if (coeff == 0.0) return out;
  out.entries.reserve(counts.size());
  const double unit = coeff / static_cast<double>(r);
  for (const auto& c : counts) out.entries.push_back({c.id, unit * static_cast<double>(c.count)});
  return out;
}

EmpiricalDistribution EmpiricalDistribution::from_endpoints(std::vector<Vertex> endpoints) {
  std::sort(endpoints.begin(), endpoints.end());
  EmpiricalDistribution out;
  out.r = endpoints.size();
  for (std::size_t i = 0; i < endpoints.size();) {
    std::size_t j = i;
    while (j < endpoints.size() && endpoints[j] == endpoints[i]) ++j;
    out.counts.push_back({endpoints[i], j - i});
    i = j;
  }
  return out;
}

void write_sparse(ByteWriter& out, const SparseVector& v) {
  out.varint(v.size());
  Vertex prev = 0;
  for (const auto& e : v.entries) {
    out.varint(e.id - prev);
    out.f64(e.w);
    prev = e.id;
  }
}

SparseVector read_sparse(ByteReader& in) {
  const std::uint64_t count = in.varint();
  SparseVector v;
  std::uint64_t id = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t delta = in.varint();
    if (i > 0 && delta == 0) in.fail("sparse ids not strictly increasing");
    id += delta;
    if (id > 0xffffffffULL) in.fail("sparse id overflow");
    const double w = in.f64();
    if (w == 0.0) in.fail("stored zero weight");
    v.entries.push_back({static_cast<Vertex>(id), w});
  }
  return v;
}

}  // namespace subcluster
