#pragma once

#include <functional>
#include <span>
#include <vector>

#include "relaysim/channel.hpp"

namespace relaysim {

enum class TopologyKind { mesh, multihop };

// Builds the spec of one directed link. `hop` is 1-based; `from` indexes the
// sending group (group hop-1, with group 0 the source) and `to` the
// receiving group.
using ChannelFactory = std::function<ChannelSpec(int hop, int from, int to)>;

/// Relay network layout with its per-hop channel grid. Group 0 is the
/// source, groups 1..K the relay groups, group K+1 the destination. Hop k
/// carries group k-1 to group k; there are K+1 hops in total. Links within
/// a hop are ordered by receiving node, so each node's incoming links and
/// channels form contiguous spans.
class NetworkTopology {
 public:
  struct Link {
    int from;
    int to;
  };

  TopologyKind kind() const { return kind_; }
  int hop_count() const { return hops_; }  // K, number of relay groups
  int total_hops() const { return hops_ + 1; }
  std::span<const int> group_sizes() const { return sizes_; }

  int group_size(int group) const;

  std::span<const Link> links(int hop) const;
  std::span<const ChannelSpec> channels(int hop) const;
  std::size_t link_count() const;

  // Incoming links of `node` in group `hop`, as spans into links()/channels().
  std::span<const Link> incoming_links(int hop, int node) const;
  std::span<const ChannelSpec> incoming_channels(int hop, int node) const;
  int fan_in(int hop, int node) const;

  // Rebuilds every channel spec in place (new fading block, same layout).
  void refill_channels(const ChannelFactory& factory);

  friend NetworkTopology build_mesh(int hops, std::span<const int> sizes,
                                    const ChannelFactory& factory);
  friend NetworkTopology build_multihop(int hops, int branches,
                                        const ChannelFactory& factory);

 private:
  NetworkTopology() = default;
  void check_hop(int hop) const;

  TopologyKind kind_ = TopologyKind::mesh;
  int hops_ = 0;
  std::vector<int> sizes_;
  std::vector<std::vector<Link>> hop_links_;
  std::vector<std::vector<ChannelSpec>> hop_channels_;
  // node_offsets_[k][j] .. [j+1] bounds node j's incoming links in hop k+1
  std::vector<std::vector<int>> node_offsets_;
};

// Full bipartite connectivity between consecutive groups.
NetworkTopology build_mesh(int hops, std::span<const int> sizes,
                           const ChannelFactory& factory);

// Parallel chains: node i of a group hears only node i of the previous
// group; the source feeds every chain and the destination collects them.
NetworkTopology build_multihop(int hops, int branches,
                               const ChannelFactory& factory);

}  // namespace relaysim
