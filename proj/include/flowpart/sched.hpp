#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flowpart/assignment.hpp"
#include "flowpart/cluster.hpp"
#include "flowpart/graph.hpp"
#include "flowpart/random.hpp"

namespace flowpart {

/// Local, per-device, non-preemptive policies.
enum class Policy { fifo, pct, msr };

std::string_view to_string(Policy policy);
std::optional<Policy> parse_policy(std::string_view name);
inline constexpr Policy all_policies[] = {Policy::fifo, Policy::pct, Policy::msr};

struct MsrWeights {
  double alpha = 1.0;  // per successor
  double beta = 1.0;   // successor on another device
  double gamma = 1.0;  // successor has this vertex as its only predecessor
  double delta = 5.0;  // ... and its device is idle right now
};

/// Upward path computation time per vertex: own execution time plus the
/// longest (successor PCT + transfer time) over successors.
using PctTable = std::vector<double>;

PctTable compute_pct(const DataflowGraph& graph, const DeviceCluster& cluster, const Partition& partition);

/// `idle` is indexed by device and read at decision time.
double msr_score(VertexId vertex, const DataflowGraph& graph, const Partition& partition,
                 std::span<const bool> idle, const MsrWeights& weights);

struct PickContext;

struct ReadyEntry {
  VertexId vertex;
  double ready_time;
};

/// Per-device ready queues. A vertex is queued once all of its input tensors
/// are on its device and it has not started yet.
class SchedulerState {
 public:
  SchedulerState(Policy policy, std::size_t num_devices, MsrWeights weights = {}, std::uint64_t seed = 0);

  Policy policy() const { return policy_; }
  const MsrWeights& weights() const { return weights_; }

  void make_ready(DeviceId device, VertexId vertex, double time) { queues_[device].push_back({vertex, time}); }
  std::span<const ReadyEntry> queue(DeviceId device) const { return queues_[device]; }
  bool empty(DeviceId device) const { return queues_[device].empty(); }

 private:
  friend std::optional<VertexId> pick_next(DeviceId, SchedulerState&, const PickContext&);

  Policy policy_;
  MsrWeights weights_;
  Rng rng_;
  std::vector<std::vector<ReadyEntry>> queues_;
};

struct PickContext {
  const DataflowGraph& graph;
  const Partition& partition;
  const PctTable* pct = nullptr;  // required for Policy::pct
  std::span<const bool> idle;     // required for Policy::msr
};

/// Removes and returns the next vertex for `device`, or nullopt if nothing
/// is executable there. FIFO takes the earliest ready time with a seeded
/// random tie-break; PCT and MSR take the highest score, ties to the smallest
/// vertex id.
std::optional<VertexId> pick_next(DeviceId device, SchedulerState& state, const PickContext& context);

}  // namespace flowpart
