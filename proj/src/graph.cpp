#include "trustcascade/graph.hpp"

#include <charconv>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "trustcascade/error.hpp"

namespace trustcascade {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidTopology: return "invalid-topology";
    case ErrorCode::Contract: return "contract";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Resource: return "resource";
    case ErrorCode::Singularity: return "singularity";
    case ErrorCode::Undefined: return "undefined";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

const char* to_string(Shape shape) noexcept {
  switch (shape) {
    case Shape::Chain: return "chain";
    case Shape::Star: return "star";
    case Shape::BridgedChains: return "bridged";
  }
  return "unknown";
}

void TopologySpec::validate() const {
  require(n >= 2, ErrorCode::InvalidTopology,
          std::string(to_string(shape)) + " topology needs n >= 2, got " + std::to_string(n));
  if (shape == Shape::BridgedChains) {
    require(l >= 2 && l <= n && h >= 2 && h <= n, ErrorCode::InvalidTopology,
            "bridge endpoints must be normal nodes: need 2 <= l,h <= n, got l=" +
                std::to_string(l) + " h=" + std::to_string(h));
  }
}

std::string topology_to_text(const TopologySpec& spec) {
  nlohmann::ordered_json j;
  j["shape"] = to_string(spec.shape);
  j["n"] = spec.n;
  if (spec.shape == Shape::BridgedChains) {
    j["l"] = spec.l;
    j["h"] = spec.h;
  }
  return j.dump();
}

TopologySpec topology_from_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("topology text is not valid JSON: ") + e.what());
  }
  require(j.is_object() && j.contains("shape") && j.contains("n"), ErrorCode::Config,
          "topology needs keys 'shape' and 'n'");
  TopologySpec spec;
  try {
    const auto shape = j.at("shape").get<std::string>();
    if (shape == "chain") {
      spec.shape = Shape::Chain;
    } else if (shape == "star") {
      spec.shape = Shape::Star;
    } else if (shape == "bridged") {
      spec.shape = Shape::BridgedChains;
    } else {
      fail(ErrorCode::Config, "unknown topology shape '" + shape + "'");
    }
    spec.n = j.at("n").get<int>();
    spec.l = j.value("l", 0);
    spec.h = j.value("h", 0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("malformed topology: ") + e.what());
  }
  spec.validate();
  return spec;
}

TrustGraph::TrustGraph(std::vector<NodeKind> kinds)
    : kinds_(std::move(kinds)), out_(kinds_.size()), in_(kinds_.size()), component_(kinds_.size()) {
  std::iota(component_.begin(), component_.end(), std::size_t{0});
}

EdgeId TrustGraph::add_edge(NodeId src, NodeId dst, double weight) {
  require(contains(src) && contains(dst), ErrorCode::Contract,
          "edge endpoint out of range: " + std::to_string(src.index) + "->" +
              std::to_string(dst.index));
  require(src != dst, ErrorCode::Contract, "self loops are not allowed");
  require(!find_edge(src, dst), ErrorCode::Contract,
          "duplicate edge " + std::to_string(src.index) + "->" + std::to_string(dst.index));
  require(weight >= 0.0 && weight <= 1.0, ErrorCode::Contract, "weight outside [0, 1]");
  // The reverse direction of an existing pair is the same undirected edge.
  if (forest_ && !find_edge(dst, src)) {
    const auto ra = root(src.slot());
    const auto rb = root(dst.slot());
    forest_ = ra != rb;
    component_[ra] = rb;
  }
  const EdgeId id{static_cast<std::uint32_t>(edges_.size())};
  edges_.push_back({src, dst});
  weights_.push_back(weight);
  out_[src.slot()].push_back({static_cast<std::uint32_t>(dst.slot()), id});
  in_[dst.slot()].push_back({static_cast<std::uint32_t>(src.slot()), id});
  return id;
}

std::size_t TrustGraph::normal_count() const noexcept {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), NodeKind::Normal));
}

NodeKind TrustGraph::kind(NodeId id) const {
  require(contains(id), ErrorCode::Contract, "unknown node " + std::to_string(id.index));
  return kinds_[id.slot()];
}

std::optional<EdgeId> TrustGraph::find_edge(NodeId src, NodeId dst) const {
  if (!contains(src) || !contains(dst)) return std::nullopt;
  for (const auto& arc : out_[src.slot()]) {
    if (arc.node == dst.slot()) return arc.edge;
  }
  return std::nullopt;
}

double TrustGraph::weight(NodeId src, NodeId dst) const {
  const auto id = find_edge(src, dst);
  require(id.has_value(), ErrorCode::Contract,
          "no edge " + std::to_string(src.index) + "->" + std::to_string(dst.index));
  return weights_[id->value];
}

void TrustGraph::set_weight(EdgeId id, double w) {
  require(id.value < weights_.size(), ErrorCode::Contract, "unknown edge id");
  require(w >= 0.0 && w <= 1.0, ErrorCode::Contract, "weight outside [0, 1]");
  weights_[id.value] = w;
}

void TrustGraph::set_weight(NodeId src, NodeId dst, double w) {
  const auto id = find_edge(src, dst);
  require(id.has_value(), ErrorCode::Contract,
          "no edge " + std::to_string(src.index) + "->" + std::to_string(dst.index));
  set_weight(*id, w);
}

std::size_t TrustGraph::root(std::size_t x) {
  while (component_[x] != x) {
    component_[x] = component_[component_[x]];
    x = component_[x];
  }
  return x;
}

bool operator==(const TrustGraph& a, const TrustGraph& b) {
  if (a.kinds_ != b.kinds_ || a.weights_ != b.weights_ || a.edges_.size() != b.edges_.size())
    return false;
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    if (a.edges_[i].src != b.edges_[i].src || a.edges_[i].dst != b.edges_[i].dst) return false;
  }
  return true;
}

NodeId chain_a_node(int index) noexcept { return NodeId{index}; }
NodeId chain_b_node(int n, int index) noexcept { return NodeId{n + index}; }

namespace {

void add_pair(TrustGraph& g, NodeId a, NodeId b) {
  g.add_edge(a, b);
  g.add_edge(b, a);
}

void add_chain_links(TrustGraph& g, int offset, int n) {
  for (int i = 1; i < n; ++i) add_pair(g, NodeId{offset + i}, NodeId{offset + i + 1});
}

}  // namespace

TrustGraph build_chain(int n) {
  const auto spec = TopologySpec::chain(n);
  spec.validate();
  std::vector<NodeKind> kinds(static_cast<std::size_t>(n), NodeKind::Normal);
  kinds[0] = NodeKind::Smart;
  TrustGraph g(std::move(kinds));
  add_chain_links(g, 0, n);
  g.set_topology(spec);
  return g;
}

TrustGraph build_star(int n) {
  const auto spec = TopologySpec::star(n);
  spec.validate();
  std::vector<NodeKind> kinds(static_cast<std::size_t>(n), NodeKind::Normal);
  kinds[0] = NodeKind::Smart;
  TrustGraph g(std::move(kinds));
  for (int i = 2; i <= n; ++i) add_pair(g, NodeId{1}, NodeId{i});
  g.set_topology(spec);
  return g;
}

TrustGraph build_bridged_chains(int n, int l, int h) {
  const auto spec = TopologySpec::bridged(n, l, h);
  spec.validate();
  std::vector<NodeKind> kinds(static_cast<std::size_t>(2 * n), NodeKind::Normal);
  kinds[0] = NodeKind::Smart;
  kinds[static_cast<std::size_t>(n)] = NodeKind::Smart;
  TrustGraph g(std::move(kinds));
  add_chain_links(g, 0, n);
  add_chain_links(g, n, n);
  add_pair(g, chain_a_node(l), chain_b_node(n, h));
  g.set_topology(spec);
  return g;
}

TrustGraph build_topology(const TopologySpec& spec) {
  switch (spec.shape) {
    case Shape::Chain: return build_chain(spec.n);
    case Shape::Star: return build_star(spec.n);
    case Shape::BridgedChains: return build_bridged_chains(spec.n, spec.l, spec.h);
  }
  fail(ErrorCode::InvalidTopology, "unknown shape");
}

void set_limit_weights(TrustGraph& graph, const TopologySpec& spec) {
  spec.validate();
  require(graph.topology().has_value() && *graph.topology() == spec, ErrorCode::Contract,
          "graph was not built for topology " + topology_to_text(spec));
  const auto reference = build_topology(spec);
  require(reference.edge_count() == graph.edge_count() &&
              reference.node_count() == graph.node_count(),
          ErrorCode::Contract, "graph structure does not match " + topology_to_text(spec));

  for (auto& w : graph.weights()) w = kInitialWeight;
  const int n = spec.n;
  switch (spec.shape) {
    case Shape::Chain:
      for (int i = 2; i <= n; ++i) graph.set_weight(NodeId{i - 1}, NodeId{i}, 1.0);
      break;
    case Shape::Star:
      for (int i = 2; i <= n; ++i) graph.set_weight(NodeId{1}, NodeId{i}, 1.0);
      break;
    case Shape::BridgedChains: {
      for (int i = 2; i <= n; ++i) {
        graph.set_weight(chain_a_node(i - 1), chain_a_node(i), 1.0);
        graph.set_weight(chain_b_node(n, i - 1), chain_b_node(n, i), 1.0);
      }
      graph.set_weight(chain_a_node(spec.l), chain_b_node(n, spec.h), 1.0);
      graph.set_weight(chain_b_node(n, spec.h), chain_a_node(spec.l), 1.0);
      for (int i = 3; i <= spec.l; ++i) graph.set_weight(chain_a_node(i), chain_a_node(i - 1), 1.0);
      for (int i = 3; i <= spec.h; ++i)
        graph.set_weight(chain_b_node(n, i), chain_b_node(n, i - 1), 1.0);
      break;
    }
  }
}

std::string dump_graph(const TrustGraph& graph) {
  std::ostringstream out;
  out << "# kinds: ";
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    if (i) out << ',';
    out << (graph.is_smart(i) ? 'S' : 'N');
  }
  out << '\n';
  if (graph.topology()) out << "# topology: " << topology_to_text(*graph.topology()) << '\n';
  out << "src,dst,weight\n";
  char buf[64];
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(EdgeId{static_cast<std::uint32_t>(e)});
    std::snprintf(buf, sizeof buf, "%.17g", graph.weight(EdgeId{static_cast<std::uint32_t>(e)}));
    out << edge.src.index << ',' << edge.dst.index << ',' << buf << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc{} && ptr == s.data() + s.size(), ErrorCode::Config,
          "expected integer, got '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s) {
  const std::string copy(trim(s));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(copy, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::Config, "expected number, got '" + copy + "'");
  }
  require(used == copy.size(), ErrorCode::Config, "expected number, got '" + copy + "'");
  return v;
}

}  // namespace

TrustGraph parse_graph_dump(std::string_view text) {
  std::vector<NodeKind> kinds;
  std::optional<TopologySpec> topology;
  std::vector<std::tuple<int, int, double>> edges;
  bool saw_kinds = false;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line == "src,dst,weight") continue;
    if (line.starts_with("# kinds:")) {
      for (auto tok : split(line.substr(8), ',')) {
        tok = trim(tok);
        require(tok == "S" || tok == "N", ErrorCode::Config, "bad node kind '" + std::string(tok) + "'");
        kinds.push_back(tok == "S" ? NodeKind::Smart : NodeKind::Normal);
      }
      saw_kinds = true;
      continue;
    }
    if (line.starts_with("# topology:")) {
      topology = topology_from_text(line.substr(11));
      continue;
    }
    if (line.starts_with('#')) continue;
    const auto cols = split(line, ',');
    require(cols.size() == 3, ErrorCode::Config, "edge line needs src,dst,weight: '" + std::string(line) + "'");
    edges.emplace_back(parse_int(cols[0]), parse_int(cols[1]), parse_double(cols[2]));
  }
  require(saw_kinds, ErrorCode::Config, "graph dump lacks the '# kinds:' header");
  TrustGraph g(std::move(kinds));
  for (const auto& [s, d, w] : edges) g.add_edge(NodeId{s}, NodeId{d}, w);
  if (topology) g.set_topology(*topology);
  return g;
}

}  // namespace trustcascade
