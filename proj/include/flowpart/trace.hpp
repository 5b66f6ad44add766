#pragma once

#include <iosfwd>
#include <vector>

#include "flowpart/cluster.hpp"
#include "flowpart/graph.hpp"

namespace flowpart {

struct VertexTiming {
  double start = 0.0;
  double finish = 0.0;
  DeviceId device = 0;
};

/// A tensor's trip from producer to consumer. Local edges have start == end
/// == the producer's finish time.
struct TransferRecord {
  double start = 0.0;
  double end = 0.0;
  DeviceId src_device = 0;
  DeviceId dst_device = 0;
};

struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

struct ExecutionTrace {
  std::vector<VertexTiming> vertices;                // indexed by VertexId
  std::vector<TransferRecord> transfers;             // indexed by EdgeId
  std::vector<std::vector<VertexId>> device_order;   // execution order per device
  std::vector<std::vector<Interval>> idle;           // gaps within [0, makespan]

  double makespan() const;
  /// Sorted distinct vertex start/finish and transfer start/end times.
  std::vector<double> event_times() const;
};

/// Edges whose data sits in device memory at `time`: arrived (transfer end
/// <= time) and not yet consumed (consumer start > time).
std::vector<EdgeId> active_edges(const ExecutionTrace& trace, const DataflowGraph& graph,
                                 double time, DeviceId device);

struct MemoryPeak {
  double volume = 0.0;
  double time = 0.0;
};

/// Per-device maximum of the active-edge volume over all times, by sweep.
std::vector<MemoryPeak> peak_memory(const ExecutionTrace& trace, const DataflowGraph& graph,
                                    std::size_t num_devices);

/// One event per line: `<kind> <time> <vertex-or-edge> <device>`, sorted by
/// time. Edges print as `src->dst`, transfer devices as `from->to`.
void write_trace(std::ostream& out, const ExecutionTrace& trace, const DataflowGraph& graph,
                 const DeviceCluster& cluster);

}  // namespace flowpart
