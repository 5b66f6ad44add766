#include "flowpart/cluster.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/core.h>

#include "flowpart/error.hpp"

namespace flowpart {

DeviceCluster::DeviceCluster(std::vector<DeviceRecord> devices, std::vector<double> bandwidth)
    : devices_(std::move(devices)), bandwidth_(std::move(bandwidth)) {
  for (const auto& d : devices_) {
    if (!(d.speed > 0.0) || !(d.memory > 0.0)) {
      throw Error(ErrorCode::invalid_instance,
                  fmt::format("device '{}' needs positive speed and memory", d.id));
    }
  }
  if (bandwidth_.size() != devices_.size() * devices_.size()) {
    throw Error(ErrorCode::invalid_instance, "bandwidth matrix incomplete");
  }
  for (double b : bandwidth_) {
    if (!(b >= 0.0)) throw Error(ErrorCode::invalid_instance, "negative bandwidth");
  }
}

DeviceCluster DeviceCluster::uniform(std::size_t k, double speed, double memory, double bandwidth) {
  std::vector<DeviceRecord> devices;
  for (std::size_t i = 0; i < k; ++i) devices.push_back({fmt::format("d{}", i), speed, memory});
  return DeviceCluster(std::move(devices), std::vector<double>(k * k, bandwidth));
}

std::optional<DeviceId> DeviceCluster::find(std::string_view id) const {
  for (DeviceId d = 0; d < devices_.size(); ++d) {
    if (devices_[d].id == id) return d;
  }
  return std::nullopt;
}

double DeviceCluster::max_speed() const {
  double best = 0.0;
  for (const auto& d : devices_) best = std::max(best, d.speed);
  return best;
}

std::vector<DeviceId> DeviceCluster::by_speed() const {
  std::vector<DeviceId> order(devices_.size());
  std::iota(order.begin(), order.end(), DeviceId{0});
  std::stable_sort(order.begin(), order.end(), [&](DeviceId a, DeviceId b) {
    return devices_[a].speed > devices_[b].speed;
  });
  return order;
}

double transfer_time(double volume, DeviceId src, DeviceId dst, const DeviceCluster& cluster) {
  if (src == dst || volume == 0.0) return 0.0;
  const double b = cluster.bandwidth(src, dst);
  if (!(b > 0.0)) {
    throw Error(ErrorCode::unreachable_link,
                fmt::format("unreachable link {} -> {}", cluster.device(src).id,
                            cluster.device(dst).id));
  }
  return volume / b;
}

}  // namespace flowpart
