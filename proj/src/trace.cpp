#include "flowpart/trace.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <string>
#include <tuple>

#include <fmt/core.h>

namespace flowpart {

double ExecutionTrace::makespan() const {
  double last = 0.0;
  for (const auto& v : vertices) last = std::max(last, v.finish);
  return last;
}

std::vector<double> ExecutionTrace::event_times() const {
  std::vector<double> times;
  times.reserve(2 * (vertices.size() + transfers.size()));
  for (const auto& v : vertices) {
    times.push_back(v.start);
    times.push_back(v.finish);
  }
  for (const auto& t : transfers) {
    times.push_back(t.start);
    times.push_back(t.end);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

std::vector<EdgeId> active_edges(const ExecutionTrace& trace, const DataflowGraph& graph,
                                 double time, DeviceId device) {
  std::vector<EdgeId> active;
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& transfer = trace.transfers[e];
    if (transfer.dst_device != device) continue;
    if (transfer.end <= time && trace.vertices[graph.edge(e).dst].start > time) active.push_back(e);
  }
  return active;
}

std::vector<MemoryPeak> peak_memory(const ExecutionTrace& trace, const DataflowGraph& graph,
                                    std::size_t num_devices) {
  // (time, +1 arrive / -1 consume, edge); consumption sorts first at equal
  // times because an edge stops being active at its consumer's start.
  using Change = std::tuple<double, int, EdgeId>;
  std::vector<std::vector<Change>> changes(num_devices);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto& transfer = trace.transfers[e];
    if (transfer.dst_device >= num_devices) continue;
    const double consumed = trace.vertices[graph.edge(e).dst].start;
    if (transfer.end < consumed) {
      changes[transfer.dst_device].emplace_back(transfer.end, 1, e);
      changes[transfer.dst_device].emplace_back(consumed, -1, e);
    }
  }

  std::vector<MemoryPeak> peaks(num_devices);
  for (std::size_t d = 0; d < num_devices; ++d) {
    auto& list = changes[d];
    std::sort(list.begin(), list.end());
    // Sums are recomputed in edge order at every sample so the result is
    // bit-identical to summing active_edges() directly.
    std::set<EdgeId> active;
    std::size_t i = 0;
    while (i < list.size()) {
      const double now = std::get<0>(list[i]);
      for (; i < list.size() && std::get<0>(list[i]) == now; ++i) {
        if (std::get<1>(list[i]) > 0) {
          active.insert(std::get<2>(list[i]));
        } else {
          active.erase(std::get<2>(list[i]));
        }
      }
      double sum = 0.0;
      for (EdgeId e : active) sum += graph.edge(e).volume;
      if (sum > peaks[d].volume) peaks[d] = {sum, now};
    }
  }
  return peaks;
}

void write_trace(std::ostream& out, const ExecutionTrace& trace, const DataflowGraph& graph,
                 const DeviceCluster& cluster) {
  // kind rank keeps ties readable: arrivals, finishes, starts, departures
  struct Line {
    double time;
    int rank;
    std::uint32_t id;
    std::string text;
  };
  std::vector<Line> lines;
  for (VertexId v = 0; v < trace.vertices.size(); ++v) {
    const auto& t = trace.vertices[v];
    const auto& name = graph.vertex(v).id;
    const auto& dev = cluster.device(t.device).id;
    lines.push_back({t.start, 2, v, fmt::format("start {} {} {}", t.start, name, dev)});
    lines.push_back({t.finish, 1, v, fmt::format("finish {} {} {}", t.finish, name, dev)});
  }
  for (EdgeId e = 0; e < trace.transfers.size(); ++e) {
    const auto& t = trace.transfers[e];
    if (t.src_device == t.dst_device) continue;
    const auto& edge = graph.edge(e);
    const auto edge_name = fmt::format("{}->{}", graph.vertex(edge.src).id, graph.vertex(edge.dst).id);
    const auto link = fmt::format("{}->{}", cluster.device(t.src_device).id, cluster.device(t.dst_device).id);
    lines.push_back({t.start, 3, e, fmt::format("send {} {} {}", t.start, edge_name, link)});
    lines.push_back({t.end, 0, e, fmt::format("recv {} {} {}", t.end, edge_name, link)});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    return std::tie(a.time, a.rank, a.id) < std::tie(b.time, b.rank, b.id);
  });
  for (const auto& line : lines) out << line.text << '\n';
}

}  // namespace flowpart
