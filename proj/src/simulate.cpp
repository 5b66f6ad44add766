#include "flowpart/simulate.hpp"

#include <memory>
#include <numeric>
#include <queue>
#include <tuple>

#include <fmt/core.h>

#include "flowpart/error.hpp"

namespace flowpart::sim {

double SimReport::mean_utilization() const {
  if (utilization.empty()) return 0.0;
  return std::accumulate(utilization.begin(), utilization.end(), 0.0) / static_cast<double>(utilization.size());
}

namespace {

enum class EventKind : int { transfer_complete = 0, vertex_finish = 1 };

struct Event {
  double time;
  EventKind kind;
  std::uint32_t id;  // EdgeId or VertexId

  bool operator>(const Event& other) const {
    return std::tie(time, kind, id) > std::tie(other.time, other.kind, other.id);
  }
};

class Engine {
 public:
  Engine(const DataflowGraph& graph, const DeviceCluster& cluster, const Partition& partition, Policy policy,
         const MsrWeights& weights, std::uint64_t seed)
      : graph_(graph),
        cluster_(cluster),
        partition_(partition),
        sched_(policy, cluster.size(), weights, seed),
        idle_(std::make_unique<bool[]>(cluster.size())),
        pending_inputs_(graph.num_vertices()) {
    if (partition.assignment.size() != graph.num_vertices()) {
      throw Error(ErrorCode::invalid_instance, "partition does not cover every vertex");
    }
    for (DeviceId d : partition.assignment) {
      if (d >= cluster.size()) throw Error(ErrorCode::invalid_instance, "partition names an unknown device");
    }
    if (policy == Policy::pct) pct_ = compute_pct(graph, cluster, partition);
    for (DeviceId d = 0; d < cluster.size(); ++d) idle_[d] = true;

    trace_.vertices.resize(graph.num_vertices());
    trace_.transfers.resize(graph.num_edges());
    trace_.device_order.resize(cluster.size());
  }

  SimResult execute() {
    for (VertexId v : graph_.topological_order()) {
      pending_inputs_[v] = graph_.in_edges(v).size();
      if (pending_inputs_[v] == 0) sched_.make_ready(partition_.device_of(v), v, 0.0);
    }
    dispatch(0.0);

    std::size_t finished = 0;
    std::size_t events = 0;
    while (!queue_.empty()) {
      const double now = queue_.top().time;
      while (!queue_.empty() && queue_.top().time == now) {
        const Event event = queue_.top();
        queue_.pop();
        ++events;
        if (event.kind == EventKind::vertex_finish) {
          finish_vertex(event.id, now);
          ++finished;
        } else {
          deliver(event.id, now);
        }
      }
      dispatch(now);
    }
    if (finished != graph_.num_vertices()) {
      throw Error(ErrorCode::internal,
                  fmt::format("deadlock: {} of {} vertices finished", finished, graph_.num_vertices()));
    }

    fill_idle_intervals();
    auto summary = report(trace_, graph_, cluster_, events);
    return {std::move(trace_), std::move(summary)};
  }

 private:
  void dispatch(double now) {
    for (DeviceId d = 0; d < cluster_.size(); ++d) {
      if (!idle_[d] || sched_.empty(d)) continue;
      PickContext context{graph_, partition_, pct_.empty() ? nullptr : &pct_,
                          std::span<const bool>(idle_.get(), cluster_.size())};
      const auto v = pick_next(d, sched_, context);
      if (!v) continue;
      const double finish = now + exec_time(graph_.vertex(*v), cluster_.device(d));
      trace_.vertices[*v] = {now, finish, d};
      trace_.device_order[d].push_back(*v);
      idle_[d] = false;
      queue_.push({finish, EventKind::vertex_finish, *v});
    }
  }

  void finish_vertex(VertexId v, double now) {
    const DeviceId here = partition_.device_of(v);
    idle_[here] = true;
    for (EdgeId e : graph_.out_edges(v)) {
      const auto& edge = graph_.edge(e);
      const DeviceId there = partition_.device_of(edge.dst);
      const double arrival = now + transfer_time(edge, here, there, cluster_);
      trace_.transfers[e] = {now, arrival, here, there};
      if (there == here) {
        deliver(e, now);
      } else {
        queue_.push({arrival, EventKind::transfer_complete, e});
      }
    }
  }

  void deliver(EdgeId e, double now) {
    const VertexId dst = graph_.edge(e).dst;
    if (--pending_inputs_[dst] == 0) sched_.make_ready(partition_.device_of(dst), dst, now);
  }

  void fill_idle_intervals() {
    const double makespan = trace_.makespan();
    trace_.idle.assign(cluster_.size(), {});
    for (DeviceId d = 0; d < cluster_.size(); ++d) {
      double cursor = 0.0;
      for (VertexId v : trace_.device_order[d]) {
        if (trace_.vertices[v].start > cursor) trace_.idle[d].push_back({cursor, trace_.vertices[v].start});
        cursor = trace_.vertices[v].finish;
      }
      if (makespan > cursor) trace_.idle[d].push_back({cursor, makespan});
    }
  }

  const DataflowGraph& graph_;
  const DeviceCluster& cluster_;
  const Partition& partition_;
  SchedulerState sched_;
  PctTable pct_;
  std::unique_ptr<bool[]> idle_;
  std::vector<std::size_t> pending_inputs_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  ExecutionTrace trace_;
};

}  // namespace

SimResult run(const DataflowGraph& graph, const DeviceCluster& cluster, const Partition& partition,
              Policy policy, const MsrWeights& weights, std::uint64_t seed) {
  return Engine(graph, cluster, partition, policy, weights, seed).execute();
}

SimReport report(const ExecutionTrace& trace, const DataflowGraph& graph, const DeviceCluster& cluster,
                 std::size_t event_count) {
  SimReport out;
  out.makespan = trace.makespan();
  out.event_count = event_count;
  out.utilization.assign(cluster.size(), 0.0);
  for (VertexId v = 0; v < trace.vertices.size(); ++v) {
    const auto& t = trace.vertices[v];
    out.utilization[t.device] += t.finish - t.start;
  }
  for (auto& u : out.utilization) u = out.makespan > 0.0 ? u / out.makespan : 0.0;

  const auto peaks = peak_memory(trace, graph, cluster.size());
  out.peak_memory.resize(cluster.size());
  for (DeviceId d = 0; d < cluster.size(); ++d) {
    out.peak_memory[d] = peaks[d].volume;
    if (peaks[d].volume >= cluster.device(d).memory) {
      out.memory_violations.push_back({d, peaks[d].time, peaks[d].volume, cluster.device(d).memory});
    }
  }
  return out;
}

}  // namespace flowpart::sim
