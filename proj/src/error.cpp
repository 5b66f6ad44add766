#include "flowpart/error.hpp"

#include <algorithm>

#include "flowpart/violation.hpp"

namespace flowpart {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_graph: return "empty graph";
    case ErrorCode::cyclic_graph: return "cyclic graph";
    case ErrorCode::invalid_instance: return "invalid instance";
    case ErrorCode::unreachable_link: return "unreachable link";
    case ErrorCode::contradictory_constraints: return "contradictory device constraints";
    case ErrorCode::infeasible_instance: return "infeasible instance";
    case ErrorCode::instance_too_large: return "instance too large";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown";
}

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::duplicate_vertex: return "duplicate vertex";
    case ViolationKind::unknown_endpoint: return "unknown endpoint";
    case ViolationKind::self_loop: return "self-loop";
    case ViolationKind::duplicate_edge: return "duplicate edge";
    case ViolationKind::negative_cost: return "negative cost";
    case ViolationKind::negative_volume: return "negative volume";
    case ViolationKind::cycle: return "cycle";
    case ViolationKind::incomplete_partition: return "incomplete partition";
    case ViolationKind::unknown_device: return "unknown device";
    case ViolationKind::collocation: return "collocation";
    case ViolationKind::device_constraint: return "device constraint";
    case ViolationKind::memory: return "memory";
    case ViolationKind::precedence: return "precedence";
    case ViolationKind::duration: return "duration";
    case ViolationKind::device_exclusivity: return "device exclusivity";
    case ViolationKind::execution_count: return "execution count";
  }
  return "unknown";
}

bool contains(const ViolationList& violations, ViolationKind kind) {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

}  // namespace flowpart
