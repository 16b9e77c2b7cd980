#pragma once

#include "agentex/model.hpp"

#include <json.hpp>

#include <string>

namespace agentex::io {

using Json = nlohmann::json;

/// Integers are written as JSON numbers, everything else as "p/q" strings.
Json to_json(const Rational& value);
/// Accepts JSON integers, "p/q" / "p" / decimal strings. Floating-point JSON numbers are rejected.
Rational rational_from(const Json& value);

/// Parses and validates an instance document. Throws InvalidInstance.
Instance parse_instance(const std::string& text);
Instance instance_from_json(const Json& doc);
Json to_json(const Instance& inst);

Json line_instance_json(const LineInstance& inst);
Json network_json(const Network& net, InstanceKind kind);

Json point_json(const Network& net, const NetPoint& p);
NetPoint point_from(const Network& net, const Json& value);

Json to_json(const LineSchedule& schedule);
Json to_json(const Network& net, const NetSchedule& schedule);
LineSchedule line_schedule_from(const Json& doc);
NetSchedule net_schedule_from(const Network& net, const Json& doc);

Json task_json(const LineTask& task);
Json task_json(const Network& net, const NetTask& task);

}  // namespace agentex::io
