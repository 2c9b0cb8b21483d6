#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace voter {

using NodeId = std::uint32_t;

/// Interaction graph of the voter model.
///
/// Each node i owns the set N_i of nodes it looks at when updating
/// (its in-neighbors). Neighbor lists are sorted and deduplicated, so a
/// self-loop counts once. Graphs are immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Throws InvalidArgument if a neighbor index is out of range or a node
  /// has no in-neighbors.
  Graph(std::size_t node_count, std::vector<std::vector<NodeId>> in_neighbors,
        std::vector<std::string> labels = {});

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const NodeId> in_neighbors(NodeId i) const;
  std::size_t in_degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t edge_count() const { return neighbors_.size(); }

  bool has_labels() const { return !labels_.empty(); }
  const std::string& label(NodeId i) const { return labels_.at(i); }

  /// Number of distinct nodes adjacent to i in either direction, self excluded.
  std::size_t undirected_degree(NodeId i) const;

  bool has_edge(NodeId from, NodeId to) const;  // from ∈ N_to

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_ && a.labels_ == b.labels_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<std::string> labels_;
  std::vector<std::vector<NodeId>> out_;  // reverse adjacency, for degree queries
};

/// Directed line of n+1 nodes 0..n. Node 0 looks only at itself; node i ≥ 1
/// looks at i-1 (and at itself when self_loop is set).
Graph make_line(std::size_t n, bool self_loop = true);

/// Undirected preferential-attachment graph in the linearized chord diagram
/// construction: each new vertex sends attachment_count edges, choosing an
/// endpoint with probability proportional to current degree (self-loops
/// allowed). Neighbor sets are symmetric.
Graph make_scale_free(std::size_t n, std::size_t attachment_count, std::uint64_t seed);

/// True when g has exactly the shape produced by make_line(n, true).
bool is_controlled_line(const Graph& g);

// Edge-list text format:
//   # nodes=<n>
//   <src> <dst>        (one per line; src ∈ N_dst, i.e. dst looks at src)
// Optional "# label <i> <text>" lines carry node labels.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);

}  // namespace voter
