#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cnup {

using NodeIndex = std::uint32_t;
using EdgeId = std::uint32_t;

/// Membership of a topology edge in the initial and/or final configuration.
/// The topology carries no other edges; an edge outside both configurations
/// is not representable.
enum class EdgeLabel : std::uint8_t { InitialOnly, FinalOnly, Both };

struct Edge {
  NodeIndex from;
  NodeIndex to;
  EdgeLabel label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

inline bool label_in_initial(EdgeLabel l) { return l != EdgeLabel::FinalOnly; }
inline bool label_in_final(EdgeLabel l) { return l != EdgeLabel::InitialOnly; }

/// Malformed or improper instance description (parse errors, properness
/// violations, bad node references).
class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Edge-presence set over the owning instance's edge table.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t edge_count)
      : words_((edge_count + 63) / 64, 0), size_(edge_count) {}

  bool contains(EdgeId e) const {
    return (words_[e >> 6] >> (e & 63)) & 1u;
  }
  void insert(EdgeId e) { words_[e >> 6] |= std::uint64_t{1} << (e & 63); }
  void erase(EdgeId e) { words_[e >> 6] &= ~(std::uint64_t{1} << (e & 63)); }
  void unite(const Configuration& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  }
  std::size_t edge_capacity() const { return size_; }
  std::size_t count() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

/// Node/edge lists before validation; input to instance construction and to
/// the multi-source reduction.
struct TopologyDraft {
  std::vector<std::string> nodes;
  struct DraftEdge {
    std::string from;
    std::string to;
    EdgeLabel label;
  };
  std::vector<DraftEdge> edges;
};

/// Immutable topology plus the fixed initial/final configuration pair.
/// Node indices order node names lexicographically, which gives every
/// tie-break in the planner a stable meaning.
class NetworkInstance {
 public:
  static NetworkInstance create(const TopologyDraft& draft,
                                const std::string& source,
                                std::optional<std::string> master = {});

  std::size_t node_count() const { return names_.size(); }
  const std::string& name(NodeIndex n) const { return names_[n]; }
  std::optional<NodeIndex> index_of(std::string_view name) const;
  NodeIndex require_index(std::string_view name) const;

  NodeIndex source() const { return source_; }
  /// Synthetic master introduced by the multi-source reduction, if any.
  std::optional<NodeIndex> master() const { return master_; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::size_t edge_count() const { return edges_.size(); }
  bool edge_in_initial(EdgeId e) const { return label_in_initial(edges_[e].label); }
  bool edge_in_final(EdgeId e) const { return label_in_final(edges_[e].label); }

  /// All topology out-edges of a node (edges of either configuration).
  const std::vector<EdgeId>& out_all(NodeIndex n) const { return out_all_[n]; }
  const std::vector<EdgeId>& in_all(NodeIndex n) const { return in_all_[n]; }
  /// out(C_i, n) and out(C_f, n) over the canonical configurations.
  const std::vector<EdgeId>& out_initial(NodeIndex n) const { return out_initial_[n]; }
  const std::vector<EdgeId>& out_final(NodeIndex n) const { return out_final_[n]; }

  const Configuration& config_initial() const { return config_initial_; }
  const Configuration& config_final() const { return config_final_; }
  Configuration empty_config() const { return Configuration(edges_.size()); }

  /// Nodes whose out-edge sets differ between the configurations, sorted by
  /// index (hence by name). No-op nodes and the synthetic master never
  /// appear here.
  const std::vector<NodeIndex>& changed_nodes() const { return changed_; }
  bool is_changed(NodeIndex n) const { return changed_mask_[n] != 0; }

 private:
  NetworkInstance() = default;

  std::vector<std::string> names_;
  NodeIndex source_ = 0;
  std::optional<NodeIndex> master_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_all_, in_all_, out_initial_, out_final_;
  Configuration config_initial_, config_final_;
  std::vector<NodeIndex> changed_;
  std::vector<std::uint8_t> changed_mask_;
};

/// out(C, u): the edges of C whose source is u.
std::vector<Edge> out(const NetworkInstance& inst, const Configuration& c, NodeIndex u);
std::vector<Edge> out(const NetworkInstance& inst, const Configuration& c, std::string_view node);

/// upd1: replace u's initial out-edges with its final ones; everything else
/// is untouched.
Configuration upd1(const NetworkInstance& inst, const Configuration& c, NodeIndex u);
Configuration upd1(const NetworkInstance& inst, const Configuration& c, std::string_view node);

/// Left fold of upd1 over a repetition-free node sequence.
Configuration upd(const NetworkInstance& inst, Configuration c, std::span<const NodeIndex> seq);
Configuration upd(const NetworkInstance& inst, Configuration c, std::span<const std::string> seq);

enum class MultiSourcePolicy { Reject, Reduce };

/// Parse the JSON instance format (see README for the grammar). Validates
/// properness of both canonical configurations. Multi-source files are
/// rejected or reduced per the policy.
NetworkInstance parse_instance(std::string_view text,
                               MultiSourcePolicy policy = MultiSourcePolicy::Reject);

/// Canonical serialization; parse(serialize(x)) reproduces x exactly.
std::string serialize_instance(const NetworkInstance& inst);

/// Attach a fresh master source with a Both-labeled edge to every declared
/// source. Identity (no master) when exactly one source is declared.
NetworkInstance reduce_multi_source(const std::vector<std::string>& sources,
                                    const TopologyDraft& draft);

}  // namespace cnup
