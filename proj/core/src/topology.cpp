#include "relaysim/topology.hpp"

#include <stdexcept>
#include <string>

namespace relaysim {

int NetworkTopology::group_size(int group) const {
  if (group < 0 || group > hops_ + 1)
    throw std::out_of_range("group index out of range");
  if (group == 0 || group == hops_ + 1) return 1;
  return sizes_[static_cast<std::size_t>(group - 1)];
}

void NetworkTopology::check_hop(int hop) const {
  if (hop < 1 || hop > hops_ + 1) throw std::out_of_range("hop out of range");
}

std::span<const NetworkTopology::Link> NetworkTopology::links(int hop) const {
  check_hop(hop);
  return hop_links_[static_cast<std::size_t>(hop - 1)];
}

std::span<const ChannelSpec> NetworkTopology::channels(int hop) const {
  check_hop(hop);
  return hop_channels_[static_cast<std::size_t>(hop - 1)];
}

std::size_t NetworkTopology::link_count() const {
  std::size_t total = 0;
  for (const auto& hop : hop_links_) total += hop.size();
  return total;
}

std::span<const NetworkTopology::Link> NetworkTopology::incoming_links(
    int hop, int node) const {
  check_hop(hop);
  const auto& offsets = node_offsets_[static_cast<std::size_t>(hop - 1)];
  if (node < 0 || node + 1 >= static_cast<int>(offsets.size()))
    throw std::out_of_range("node index out of range");
  const auto lo = static_cast<std::size_t>(offsets[static_cast<std::size_t>(node)]);
  const auto hi =
      static_cast<std::size_t>(offsets[static_cast<std::size_t>(node) + 1]);
  return std::span<const Link>(hop_links_[static_cast<std::size_t>(hop - 1)])
      .subspan(lo, hi - lo);
}

std::span<const ChannelSpec> NetworkTopology::incoming_channels(
    int hop, int node) const {
  check_hop(hop);
  const auto& offsets = node_offsets_[static_cast<std::size_t>(hop - 1)];
  if (node < 0 || node + 1 >= static_cast<int>(offsets.size()))
    throw std::out_of_range("node index out of range");
  const auto lo = static_cast<std::size_t>(offsets[static_cast<std::size_t>(node)]);
  const auto hi =
      static_cast<std::size_t>(offsets[static_cast<std::size_t>(node) + 1]);
  return std::span<const ChannelSpec>(
             hop_channels_[static_cast<std::size_t>(hop - 1)])
      .subspan(lo, hi - lo);
}

int NetworkTopology::fan_in(int hop, int node) const {
  return static_cast<int>(incoming_links(hop, node).size());
}

void NetworkTopology::refill_channels(const ChannelFactory& factory) {
  for (int hop = 1; hop <= hops_ + 1; ++hop) {
    auto& chans = hop_channels_[static_cast<std::size_t>(hop - 1)];
    const auto& links = hop_links_[static_cast<std::size_t>(hop - 1)];
    for (std::size_t i = 0; i < links.size(); ++i)
      chans[i] = factory(hop, links[i].from, links[i].to);
  }
}

namespace {

// Links arrive ordered by (to, from); record the contiguous per-node ranges.
std::vector<int> offsets_for(const std::vector<NetworkTopology::Link>& links,
                             int receivers) {
  std::vector<int> offsets(static_cast<std::size_t>(receivers) + 1, 0);
  for (const auto& link : links)
    ++offsets[static_cast<std::size_t>(link.to) + 1];
  for (int j = 0; j < receivers; ++j)
    offsets[static_cast<std::size_t>(j) + 1] +=
        offsets[static_cast<std::size_t>(j)];
  return offsets;
}

}  // namespace

NetworkTopology build_mesh(int hops, std::span<const int> sizes,
                           const ChannelFactory& factory) {
  if (hops < 1) throw std::invalid_argument("hop count must be >= 1");
  if (sizes.size() != static_cast<std::size_t>(hops))
    throw std::invalid_argument("need one group size per hop");
  for (int n : sizes)
    if (n < 1) throw std::invalid_argument("group sizes must be >= 1");

  NetworkTopology topo;
  topo.kind_ = TopologyKind::mesh;
  topo.hops_ = hops;
  topo.sizes_.assign(sizes.begin(), sizes.end());
  for (int hop = 1; hop <= hops + 1; ++hop) {
    const int senders = topo.group_size(hop - 1);
    const int receivers = topo.group_size(hop);
    std::vector<NetworkTopology::Link> links;
    std::vector<ChannelSpec> chans;
    links.reserve(static_cast<std::size_t>(senders) *
                  static_cast<std::size_t>(receivers));
    for (int to = 0; to < receivers; ++to) {
      for (int from = 0; from < senders; ++from) {
        links.push_back({from, to});
        chans.push_back(factory(hop, from, to));
      }
    }
    topo.node_offsets_.push_back(offsets_for(links, receivers));
    topo.hop_links_.push_back(std::move(links));
    topo.hop_channels_.push_back(std::move(chans));
  }
  return topo;
}

NetworkTopology build_multihop(int hops, int branches,
                               const ChannelFactory& factory) {
  if (hops < 1) throw std::invalid_argument("hop count must be >= 1");
  if (branches < 1) throw std::invalid_argument("branches must be >= 1");

  NetworkTopology topo;
  topo.kind_ = TopologyKind::multihop;
  topo.hops_ = hops;
  topo.sizes_.assign(static_cast<std::size_t>(hops), branches);
  for (int hop = 1; hop <= hops + 1; ++hop) {
    const int receivers = topo.group_size(hop);
    std::vector<NetworkTopology::Link> links;
    std::vector<ChannelSpec> chans;
    if (hop == 1) {
      for (int to = 0; to < branches; ++to) {
        links.push_back({0, to});
        chans.push_back(factory(hop, 0, to));
      }
    } else if (hop == hops + 1) {
      for (int from = 0; from < branches; ++from) {
        links.push_back({from, 0});
        chans.push_back(factory(hop, from, 0));
      }
    } else {
      for (int node = 0; node < branches; ++node) {
        links.push_back({node, node});
        chans.push_back(factory(hop, node, node));
      }
    }
    topo.node_offsets_.push_back(offsets_for(links, receivers));
    topo.hop_links_.push_back(std::move(links));
    topo.hop_channels_.push_back(std::move(chans));
  }
  return topo;
}

}  // namespace relaysim
