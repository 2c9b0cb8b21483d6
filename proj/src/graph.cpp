#include "voter/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "voter/errors.hpp"
#include "voter/rng.hpp"

namespace voter {

Graph::Graph(std::size_t node_count, std::vector<std::vector<NodeId>> in_neighbors,
             std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  if (node_count == 0) throw InvalidArgument("graph must have at least one node");
  if (in_neighbors.size() != node_count)
    throw InvalidArgument("neighbor table size does not match node count");
  if (!labels_.empty() && labels_.size() != node_count)
    throw InvalidArgument("label count does not match node count");

  offsets_.reserve(node_count + 1);
  offsets_.push_back(0);
  out_.assign(node_count, {});
  for (std::size_t i = 0; i < node_count; ++i) {
    auto& nb = in_neighbors[i];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    if (nb.empty())
      throw InvalidArgument("node " + std::to_string(i) + " has no in-neighbors");
    if (nb.back() >= node_count)
      throw InvalidArgument("neighbor index out of range at node " + std::to_string(i));
    for (NodeId j : nb) {
      neighbors_.push_back(j);
      out_[j].push_back(static_cast<NodeId>(i));
    }
    offsets_.push_back(neighbors_.size());
  }
}

std::span<const NodeId> Graph::in_neighbors(NodeId i) const {
  return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::size_t Graph::undirected_degree(NodeId i) const {
  std::vector<NodeId> all(in_neighbors(i).begin(), in_neighbors(i).end());
  all.insert(all.end(), out_[i].begin(), out_[i].end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return static_cast<std::size_t>(
      std::count_if(all.begin(), all.end(), [i](NodeId j) { return j != i; }));
}

bool Graph::has_edge(NodeId from, NodeId to) const {
  auto nb = in_neighbors(to);
  return std::binary_search(nb.begin(), nb.end(), from);
}

Graph make_line(std::size_t n, bool self_loop) {
  if (n == 0) throw InvalidArgument("line length must be positive");
  std::vector<std::vector<NodeId>> nb(n + 1);
  nb[0] = {0};
  for (std::size_t i = 1; i <= n; ++i) {
    nb[i].push_back(static_cast<NodeId>(i - 1));
    if (self_loop) nb[i].push_back(static_cast<NodeId>(i));
  }
  return Graph(n + 1, std::move(nb));
}

Graph make_scale_free(std::size_t n, std::size_t attachment_count, std::uint64_t seed) {
  if (attachment_count == 0 || attachment_count >= n)
    throw InvalidArgument("scale-free graph needs 1 <= attachment_count < n");

  // Grow the chord diagram on n*m vertices, then merge each run of m
  // consecutive vertices into one node.
  const std::size_t m = attachment_count;
  const std::size_t total = n * m;
  Engine rng = make_stream(seed);
  std::vector<std::size_t> endpoints;
  endpoints.reserve(2 * total);
  std::vector<std::vector<NodeId>> nb(n);
  for (std::size_t v = 0; v < total; ++v) {
    endpoints.push_back(v);
    const std::size_t target = endpoints[uniform_index(rng, endpoints.size())];
    endpoints.push_back(target);
    const auto a = static_cast<NodeId>(v / m);
    const auto b = static_cast<NodeId>(target / m);
    nb[a].push_back(b);
    nb[b].push_back(a);
  }
  return Graph(n, std::move(nb));
}

bool is_controlled_line(const Graph& g) {
  const std::size_t count = g.node_count();
  if (count < 2) return false;
  auto n0 = g.in_neighbors(0);
  if (n0.size() != 1 || n0[0] != 0) return false;
  for (NodeId i = 1; i < count; ++i) {
    auto nb = g.in_neighbors(i);
    if (nb.size() != 2 || nb[0] != i - 1 || nb[1] != i) return false;
  }
  return true;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes=" << g.node_count() << '\n';
  if (g.has_labels()) {
    for (NodeId i = 0; i < g.node_count(); ++i) out << "# label " << i << ' ' << g.label(i) << '\n';
  }
  for (NodeId dst = 0; dst < g.node_count(); ++dst) {
    for (NodeId src : g.in_neighbors(dst)) out << src << ' ' << dst << '\n';
  }
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t nodes = 0;
  bool have_header = false;
  std::vector<std::pair<std::size_t, std::string>> labels;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# nodes=", 0) == 0) {
        try {
          nodes = std::stoul(line.substr(8));
        } catch (const std::exception&) {
          throw InvalidArgument("malformed node-count header on line " + std::to_string(line_no));
        }
        have_header = true;
      } else if (line.rfind("# label ", 0) == 0) {
        std::istringstream ls(line.substr(8));
        std::size_t idx = 0;
        ls >> idx;
        std::string text;
        std::getline(ls >> std::ws, text);
        labels.emplace_back(idx, text);
      }
      continue;
    }
    std::istringstream ls(line);
    long long src = -1, dst = -1;
    if (!(ls >> src >> dst) || src < 0 || dst < 0)
      throw InvalidArgument("malformed edge on line " + std::to_string(line_no));
    edges.emplace_back(static_cast<std::size_t>(src), static_cast<std::size_t>(dst));
  }
  if (!have_header) throw InvalidArgument("edge list is missing the '# nodes=<n>' header");

  std::vector<std::vector<NodeId>> nb(nodes);
  for (auto [src, dst] : edges) {
    if (src >= nodes || dst >= nodes) throw InvalidArgument("edge endpoint out of range");
    nb[dst].push_back(static_cast<NodeId>(src));
  }
  std::vector<std::string> names;
  if (!labels.empty()) {
    names.assign(nodes, "");
    for (auto& [idx, text] : labels) {
      if (idx >= nodes) throw InvalidArgument("label index out of range");
      names[idx] = text;
    }
  }
  return Graph(nodes, std::move(nb), std::move(names));
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open graph file: " + path);
  return read_edge_list(in);
}

}  // namespace voter
