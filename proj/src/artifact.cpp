#include <fstream>
#include <iterator>

#include "subcluster/bytes.hpp"
#include "subcluster/errors.hpp"
#include "subcluster/preprocess.hpp"

namespace subcluster {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'O', 'R', 'A', 'C', 'L', 'E'};
const char* const kHeaderNote = "logarithms: natural";

void write_optional(ByteWriter& w, const std::optional<int>& v) {
  w.u8(v.has_value());
  w.u32(static_cast<std::uint32_t>(v.value_or(0)));
}

std::optional<int> read_optional(ByteReader& r) {
  const bool has = r.u8() != 0;
  const auto v = static_cast<int>(r.u32());
  return has ? std::optional<int>(v) : std::nullopt;
}

void write_config(ByteWriter& w, const PreprocessConfig& c) {
  w.u64(c.k_hat);
  w.f64(c.phi);
  w.f64(c.eps);
  w.f64(c.sample_multiplier);
  w.f64(c.walks_scale);
  w.f64(c.delta_exp);
  w.u32(static_cast<std::uint32_t>(c.votes));
  w.u8(c.max_leaves.has_value());
  w.u64(c.max_leaves.value_or(0));
  w.f64(c.vote_fraction);
  w.f64(c.dot_fraction);
  w.f64(c.eta);
  w.u8(c.absolute_threshold.has_value() ? (*c.absolute_threshold ? 2 : 1) : 0);
  write_optional(w, c.t_min);
  write_optional(w, c.degree);
  w.u64(c.seed);
  w.u8(c.fresh_queries);
  w.u8(static_cast<std::uint8_t>(c.query_walks));
  w.u64(c.table_max_bytes);
  w.u8(c.strict_poly);
  w.u8(c.validate_poly);
}

PreprocessConfig read_config(ByteReader& r) {
  PreprocessConfig c;
  c.k_hat = r.u64();
  c.phi = r.f64();
  c.eps = r.f64();
  c.sample_multiplier = r.f64();
  c.walks_scale = r.f64();
  c.delta_exp = r.f64();
  c.votes = static_cast<int>(r.u32());
  const bool has_leaves = r.u8() != 0;
  const std::uint64_t leaves = r.u64();
  if (has_leaves) c.max_leaves = leaves;
  c.vote_fraction = r.f64();
  c.dot_fraction = r.f64();
  c.eta = r.f64();
  const auto abs = r.u8();
  if (abs > 2) r.fail("bad threshold mode");
  if (abs) c.absolute_threshold = abs == 2;
  c.t_min = read_optional(r);
  c.degree = read_optional(r);
  c.seed = r.u64();
  c.fresh_queries = r.u8() != 0;
  const auto mode = r.u8();
  if (mode > 1) r.fail("bad walk mode");
  c.query_walks = static_cast<WalkMode>(mode);
  c.table_max_bytes = r.u64();
  c.strict_poly = r.u8() != 0;
  c.validate_poly = r.u8() != 0;
  return c;
}

void write_sketch(ByteWriter& w, const SketchVector& s) {
  write_sparse(w, s.v);
  w.varint(s.signs.size());
  for (auto v : s.signs) w.u8(static_cast<std::uint8_t>(v));
  w.varint(s.set_size);
  w.u64(s.poly_digest);
}

SketchVector read_sketch(ByteReader& r) {
  SketchVector s;
  s.v = read_sparse(r);
  const std::uint64_t count = r.varint();
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto v = static_cast<std::int8_t>(r.u8());
    if (v != 1 && v != -1) r.fail("bad sign");
    s.signs.push_back(v);
  }
  s.set_size = r.varint();
  s.poly_digest = r.u64();
  return s;
}

}  // namespace

std::string serialize_artifact(const OracleArtifact& a) {
  ByteWriter w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(OracleArtifact::kVersion);
  w.bytes(kHeaderNote);
  write_config(w, a.config);
  w.u64(a.graph_digest);
  w.u64(a.n);
  w.u32(static_cast<std::uint32_t>(a.d));
  w.u32(static_cast<std::uint32_t>(a.poly.t_min));
  w.varint(a.poly.coeffs.size());
  for (double c : a.poly.coeffs) w.f64(c);
  w.u64(a.r_stored);
  w.u64(a.r_query);
  w.u64(a.max_leaves);
  w.u64(a.tree_seed);
  w.u64(a.query_seed);
  const auto& dg = a.diag;
  for (std::size_t v : {dg.sample_size, dg.directed_edges, dg.mutual_edges, dg.components, dg.candidates,
                        dg.representatives, dg.aborted_queries, dg.singleton_hits})
    w.u64(v);
  const auto& t = a.tree;
  w.u32(static_cast<std::uint32_t>(t.votes));
  w.varint(t.order.size());
  for (Vertex v : t.order) w.varint(v);
  w.varint(t.nodes.size());
  for (const auto& node : t.nodes) {
    w.varint(node.begin);
    w.varint(node.end);
    w.varint(static_cast<std::uint64_t>(node.left + 1));
    w.varint(static_cast<std::uint64_t>(node.right + 1));
    w.varint(node.sketches.size());
    for (const auto& s : node.sketches) write_sketch(w, s);
  }
  std::string out = w.str();
  ByteWriter tail;
  tail.u64(fnv1a(out.data(), out.size()));
  return out + tail.str();
}

OracleArtifact deserialize_artifact(const std::string& bytes) {
  if (bytes.size() < 8 + 4 + 8) throw ParseError("offset 0: truncated artifact");
  ByteReader body(bytes.data(), bytes.size() - 8);
  for (char c : kMagic)
    if (body.u8() != static_cast<std::uint8_t>(c)) throw ParseError("offset 0: not an oracle artifact");
  const std::uint32_t version = body.u32();
  if (version != OracleArtifact::kVersion)
    throw ParseError("offset 8: unsupported artifact format version " + std::to_string(version) + ", expected " +
                     std::to_string(OracleArtifact::kVersion));
  {
    ByteReader tail(bytes.data() + bytes.size() - 8, 8);
    if (tail.u64() != fnv1a(bytes.data(), bytes.size() - 8))
      throw ParseError("offset " + std::to_string(bytes.size() - 8) + ": checksum mismatch (corrupt or truncated artifact)");
  }
  auto& r = body;
  OracleArtifact a;
  r.bytes();
  a.config = read_config(r);
  a.graph_digest = r.u64();
  a.n = r.u64();
  a.d = static_cast<int>(r.u32());
  const auto t_min = static_cast<int>(r.u32());
  const std::uint64_t ncoeff = r.varint();
  if (ncoeff == 0) r.fail("empty walk polynomial");
  std::vector<double> coeffs;
  for (std::uint64_t i = 0; i < ncoeff; ++i) coeffs.push_back(r.f64());
  a.poly = make_walk_polynomial(t_min, std::move(coeffs));
  a.r_stored = r.u64();
  a.r_query = r.u64();
  a.max_leaves = r.u64();
  a.tree_seed = r.u64();
  a.query_seed = r.u64();
  auto& dg = a.diag;
  for (std::size_t* v : {&dg.sample_size, &dg.directed_edges, &dg.mutual_edges, &dg.components, &dg.candidates,
                         &dg.representatives, &dg.aborted_queries, &dg.singleton_hits})
    *v = r.u64();
  auto& t = a.tree;
  t.votes = static_cast<int>(r.u32());
  if (t.votes < 1) r.fail("bad vote count");
  const std::uint64_t order = r.varint();
  for (std::uint64_t i = 0; i < order; ++i) {
    const std::uint64_t v = r.varint();
    if (v >= a.n) r.fail("representative id out of range");
    t.order.push_back(static_cast<Vertex>(v));
  }
  const std::uint64_t nodes = r.varint();
  if (order == 0 || nodes != 2 * order - 1) r.fail("tree shape does not match its base set");
  for (std::uint64_t u = 0; u < nodes; ++u) {
    TreeNode node;
    node.begin = r.varint();
    node.end = r.varint();
    node.left = static_cast<int>(r.varint()) - 1;
    node.right = static_cast<int>(r.varint()) - 1;
    if (node.begin >= node.end || node.end > order) r.fail("bad node range");
    if (node.left >= static_cast<int>(nodes) || node.right >= static_cast<int>(nodes)) r.fail("bad child index");
    const std::uint64_t count = r.varint();
    if (count != static_cast<std::uint64_t>(t.votes)) r.fail("node sketch count differs from J");
    for (std::uint64_t j = 0; j < count; ++j) node.sketches.push_back(read_sketch(r));
    t.nodes.push_back(std::move(node));
  }
  if (!r.done()) r.fail("trailing bytes");
  a.prepare();
  return a;
}

void save_artifact(const OracleArtifact& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write artifact " + path);
  const std::string bytes = serialize_artifact(a);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError("failed writing artifact " + path);
}

OracleArtifact load_artifact(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open artifact " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_artifact(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace subcluster
