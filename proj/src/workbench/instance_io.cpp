#include "flowpart/workbench/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "flowpart/error.hpp"

namespace flowpart {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* instance_format = "flowpart-instance";

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::parse_error, where.empty() ? what : fmt::format("{}: {}", where, what));
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(fmt::format("line {}", line_of(text, e.byte)), "malformed document");
  }
}

const json& field(const json& object, const char* key, const std::string& where) {
  if (!object.is_object()) fail(where, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) fail(where, fmt::format("missing field \"{}\"", key));
  return *it;
}

const json* optional_field(const json& object, const char* key) {
  auto it = object.find(key);
  return it == object.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& value, const std::string& where) {
  if (!value.is_number()) fail(where, "expected a number");
  return value.get<double>();
}

std::string text_of(const json& value, const std::string& where) {
  if (!value.is_string()) fail(where, "expected a string");
  return value.get<std::string>();
}

const json& array(const json& value, const std::string& where) {
  if (!value.is_array()) fail(where, "expected an array");
  return value;
}

}  // namespace

std::string dump_instance(const Instance& instance) {
  const auto& graph = instance.graph;
  const auto& cluster = instance.cluster;
  ordered_json doc;
  doc["format"] = instance_format;
  doc["version"] = 1;

  auto devices = ordered_json::array();
  for (const auto& d : cluster.devices()) {
    devices.push_back({{"id", d.id}, {"speed", d.speed}, {"memory", d.memory}});
  }
  doc["devices"] = std::move(devices);

  auto bandwidth = ordered_json::array();
  const auto k = cluster.size();
  for (DeviceId i = 0; i < k; ++i) {
    auto row = ordered_json::array();
    for (DeviceId j = 0; j < k; ++j) row.push_back(cluster.bandwidth(i, j));
    bandwidth.push_back(std::move(row));
  }
  doc["bandwidth"] = std::move(bandwidth);

  auto vertices = ordered_json::array();
  for (const auto& v : graph.vertices()) {
    ordered_json entry{{"id", v.id}, {"cost", v.cost}};
    if (v.colocation_group) entry["group"] = *v.colocation_group;
    if (v.device_constraint) entry["device"] = cluster.device(*v.device_constraint).id;
    vertices.push_back(std::move(entry));
  }
  doc["vertices"] = std::move(vertices);

  auto edges = ordered_json::array();
  for (const auto& e : graph.edges()) {
    edges.push_back({{"src", graph.vertex(e.src).id}, {"dst", graph.vertex(e.dst).id}, {"volume", e.volume}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(1) + "\n";
}

Instance parse_instance(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) fail("document", "expected an object");
  if (auto* format = optional_field(doc, "format"); format && *format != instance_format) {
    fail("format", "not a flowpart instance");
  }

  std::vector<DeviceRecord> devices;
  const auto& device_list = array(field(doc, "devices", "document"), "devices");
  for (std::size_t i = 0; i < device_list.size(); ++i) {
    const std::string where = fmt::format("devices[{}]", i);
    const auto& d = device_list[i];
    devices.push_back({text_of(field(d, "id", where), where + ".id"),
                       number(field(d, "speed", where), where + ".speed"),
                       number(field(d, "memory", where), where + ".memory")});
  }
  const auto k = devices.size();

  std::vector<double> bandwidth;
  const auto& rows = array(field(doc, "bandwidth", "document"), "bandwidth");
  if (rows.size() != k) fail("bandwidth", "bandwidth matrix incomplete");
  for (std::size_t i = 0; i < k; ++i) {
    const std::string where = fmt::format("bandwidth[{}]", i);
    const auto& row = array(rows[i], where);
    if (row.size() != k) fail(where, "bandwidth matrix incomplete");
    for (std::size_t j = 0; j < k; ++j) bandwidth.push_back(number(row[j], fmt::format("{}[{}]", where, j)));
  }

  DeviceCluster cluster;
  try {
    cluster = DeviceCluster(std::move(devices), std::move(bandwidth));
  } catch (const Error& e) {
    fail("devices", e.what());
  }

  std::vector<VertexRecord> vertices;
  std::unordered_map<std::string, VertexId> index;
  const auto& vertex_list = array(field(doc, "vertices", "document"), "vertices");
  for (std::size_t i = 0; i < vertex_list.size(); ++i) {
    const std::string where = fmt::format("vertices[{}]", i);
    const auto& v = vertex_list[i];
    VertexRecord record;
    record.id = text_of(field(v, "id", where), where + ".id");
    record.cost = number(field(v, "cost", where), where + ".cost");
    if (auto* group = optional_field(v, "group")) record.colocation_group = text_of(*group, where + ".group");
    if (auto* device = optional_field(v, "device")) {
      const auto name = text_of(*device, where + ".device");
      auto d = cluster.find(name);
      if (!d) fail(where + ".device", fmt::format("unknown device \"{}\"", name));
      record.device_constraint = *d;
    }
    index.emplace(record.id, static_cast<VertexId>(vertices.size()));
    vertices.push_back(std::move(record));
  }

  std::vector<EdgeRecord> edges;
  const auto& edge_list = array(field(doc, "edges", "document"), "edges");
  for (std::size_t i = 0; i < edge_list.size(); ++i) {
    const std::string where = fmt::format("edges[{}]", i);
    const auto& e = edge_list[i];
    auto endpoint = [&](const char* key) {
      const auto name = text_of(field(e, key, where), fmt::format("{}.{}", where, key));
      auto it = index.find(name);
      if (it == index.end()) fail(fmt::format("{}.{}", where, key), fmt::format("unknown endpoint \"{}\"", name));
      return it->second;
    };
    const VertexId src = endpoint("src");
    const VertexId dst = endpoint("dst");
    edges.push_back({src, dst, number(field(e, "volume", where), where + ".volume")});
  }

  DataflowGraph graph(std::move(vertices), std::move(edges));
  if (auto violations = validate_dag(graph); !violations.empty()) {
    std::string message;
    for (const auto& v : violations) message += (message.empty() ? "" : "; ") + v.message;
    throw Error(ErrorCode::invalid_instance, message);
  }
  return {std::move(graph), std::move(cluster)};
}

void save_instance(const Instance& instance, const std::string& path) { write_file(path, dump_instance(instance)); }

Instance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string dump_partition(const Partition& partition, const Instance& instance) {
  ordered_json doc;
  doc["strategy"] = partition.strategy;
  if (partition.seed) doc["seed"] = *partition.seed;
  auto assignment = ordered_json::array();
  for (VertexId v = 0; v < partition.assignment.size(); ++v) {
    assignment.push_back({{"vertex", instance.graph.vertex(v).id},
                          {"device", instance.cluster.device(partition.assignment[v]).id}});
  }
  doc["assignment"] = std::move(assignment);
  return doc.dump(1) + "\n";
}

Partition parse_partition(const std::string& text, const Instance& instance) {
  const json doc = parse_json(text);
  Partition partition;
  if (!doc.is_object()) fail("document", "expected an object");
  if (auto* strategy = optional_field(doc, "strategy")) partition.strategy = text_of(*strategy, "strategy");
  if (auto* seed = optional_field(doc, "seed")) {
    if (!seed->is_number_unsigned()) fail("seed", "expected an unsigned integer");
    partition.seed = seed->get<std::uint64_t>();
  }

  const auto n = instance.graph.num_vertices();
  std::vector<bool> seen(n, false);
  partition.assignment.assign(n, 0);
  const auto& list = array(field(doc, "assignment", "document"), "assignment");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = fmt::format("assignment[{}]", i);
    const auto vertex = text_of(field(list[i], "vertex", where), where + ".vertex");
    const auto device = text_of(field(list[i], "device", where), where + ".device");
    auto v = instance.graph.find(vertex);
    if (!v) fail(where + ".vertex", fmt::format("unknown vertex \"{}\"", vertex));
    auto d = instance.cluster.find(device);
    if (!d) fail(where + ".device", fmt::format("unknown device \"{}\"", device));
    if (seen[*v]) fail(where + ".vertex", fmt::format("vertex \"{}\" assigned twice", vertex));
    seen[*v] = true;
    partition.assignment[*v] = *d;
  }
  for (VertexId v = 0; v < n; ++v) {
    if (!seen[v]) fail("assignment", fmt::format("vertex \"{}\" is not assigned", instance.graph.vertex(v).id));
  }
  return partition;
}

std::string dump_report(const sim::SimReport& report, const DeviceCluster& cluster) {
  ordered_json doc;
  doc["makespan"] = report.makespan;
  doc["mean_utilization"] = report.mean_utilization();
  doc["event_count"] = report.event_count;
  auto devices = ordered_json::array();
  for (DeviceId d = 0; d < cluster.size(); ++d) {
    devices.push_back({{"id", cluster.device(d).id},
                       {"utilization", report.utilization[d]},
                       {"peak_memory", report.peak_memory[d]},
                       {"capacity", cluster.device(d).memory}});
  }
  doc["devices"] = std::move(devices);
  auto violations = ordered_json::array();
  for (const auto& v : report.memory_violations) {
    violations.push_back(
        {{"device", cluster.device(v.device).id}, {"time", v.time}, {"peak", v.peak}, {"capacity", v.capacity}});
  }
  doc["memory_violations"] = std::move(violations);
  return doc.dump(1) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, fmt::format("cannot open {}", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::internal, fmt::format("cannot write {}", path));
  out << contents;
  if (!out.flush()) throw Error(ErrorCode::internal, fmt::format("cannot write {}", path));
}

}  // namespace flowpart
