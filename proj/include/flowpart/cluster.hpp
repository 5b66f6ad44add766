#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowpart/graph.hpp"

namespace flowpart {

struct DeviceRecord {
  std::string id;
  double speed = 1.0;   // operations per time unit
  double memory = 1.0;  // bytes

  bool operator==(const DeviceRecord&) const = default;
};

/// Heterogeneous device set with a dense, possibly asymmetric, bandwidth
/// matrix in bytes per time unit. Diagonal entries are never read.
class DeviceCluster {
 public:
  DeviceCluster() = default;
  /// Throws Error(invalid_instance) on non-positive speed or memory, a
  /// matrix that is not k*k, or negative bandwidth.
  DeviceCluster(std::vector<DeviceRecord> devices, std::vector<double> bandwidth);

  /// k devices sharing one speed, memory and off-diagonal bandwidth.
  static DeviceCluster uniform(std::size_t k, double speed, double memory, double bandwidth);

  std::size_t size() const { return devices_.size(); }
  const DeviceRecord& device(DeviceId d) const { return devices_[d]; }
  std::span<const DeviceRecord> devices() const { return devices_; }
  double bandwidth(DeviceId from, DeviceId to) const { return bandwidth_[from * size() + to]; }
  std::span<const double> bandwidth_matrix() const { return bandwidth_; }

  std::optional<DeviceId> find(std::string_view id) const;
  double max_speed() const;
  /// Descending speed, ties by ascending id.
  std::vector<DeviceId> by_speed() const;

  bool operator==(const DeviceCluster&) const = default;

 private:
  std::vector<DeviceRecord> devices_;
  std::vector<double> bandwidth_;
};

inline double exec_time(double cost, const DeviceRecord& device) { return cost / device.speed; }
inline double exec_time(const VertexRecord& vertex, const DeviceRecord& device) {
  return exec_time(vertex.cost, device);
}

/// Zero on the same device; otherwise volume / bandwidth(src, dst). Throws
/// Error(unreachable_link) when positive volume meets zero bandwidth.
double transfer_time(double volume, DeviceId src, DeviceId dst, const DeviceCluster& cluster);
inline double transfer_time(const EdgeRecord& edge, DeviceId src, DeviceId dst,
                            const DeviceCluster& cluster) {
  return transfer_time(edge.volume, src, dst, cluster);
}

}  // namespace flowpart
