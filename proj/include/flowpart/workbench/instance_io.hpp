#pragma once

#include <iosfwd>
#include <string>

#include "flowpart/assignment.hpp"
#include "flowpart/simulate.hpp"
#include "flowpart/workbench/instance.hpp"

namespace flowpart {

// Instance documents are JSON with four sections:
//
//   {"format": "flowpart-instance", "version": 1,
//    "devices":   [{"id": "d0", "speed": 10, "memory": 500}, ...],
//    "bandwidth": [[0, 12.5, ...], ...],          // k rows of k entries
//    "vertices":  [{"id": "v0", "cost": 3, "group": "g1", "device": "d0"}, ...],
//    "edges":     [{"src": "v0", "dst": "v1", "volume": 10}, ...]}
//
// "group" and "device" are optional. Numbers round-trip exactly.

std::string dump_instance(const Instance& instance);
/// Throws Error(parse_error) with a line/field diagnostic, or
/// Error(invalid_instance) listing validate_dag() violations.
Instance parse_instance(const std::string& text);

void save_instance(const Instance& instance, const std::string& path);
Instance load_instance(const std::string& path);

// Assignment documents: {"strategy": "...", "seed": 7,
//                        "assignment": [{"vertex": "v0", "device": "d1"}, ...]}
std::string dump_partition(const Partition& partition, const Instance& instance);
Partition parse_partition(const std::string& text, const Instance& instance);

std::string dump_report(const sim::SimReport& report, const DeviceCluster& cluster);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace flowpart
