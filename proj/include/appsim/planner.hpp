#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "appsim/episode.hpp"
#include "appsim/manual.hpp"
#include "appsim/spec.hpp"
#include "appsim/state_graph.hpp"
#include "json.hpp"

namespace appsim {

struct PlannerEndpoint {
  enum class Transport { Builtin, Subprocess, Http };
  Transport transport = Transport::Builtin;
  std::string address;  // builtin spec, shell command, or http://host:port
  double timeout_seconds = 30.0;
  int max_retries = 0;
};

// Side channel the runner hands to builtin planners. Never serialized, never
// visible to external transports; external planners see only the wire fields.
struct OracleContext {
  const ApplianceSpec* spec = nullptr;
  const Episode* episode = nullptr;
  const ManualDocument* manual = nullptr;
  const SessionState* state = nullptr;  // live state at query time
  EnumerationLimits limits;
};

struct PlannerRequest {
  std::string kind;  // retrieve_pages | plan | ground | next_action
  std::string instruction;
  std::vector<ManualPage> manual_pages;
  std::string observation;
  std::vector<std::string> history;  // executed action lines
  std::string initial_plan;          // plan text, next_action only
  std::string query;                 // page category or part name
  std::string schematic;             // SVG, ground only
  int64_t panel_width = 0;
  int64_t panel_height = 0;
  OracleContext oracle;
};

// Wire form; carries protocol_version 1 and every schema key.
nlohmann::ordered_json planner_request_to_json(const PlannerRequest& r);

struct PlannerResponse {
  // Timeout and Malformed score zero but are tallied apart from planning
  // mistakes; Transport means the endpoint itself failed.
  enum class Status { Ok, Timeout, Malformed, Transport };
  Status status = Status::Ok;
  std::string error;

  std::vector<int> pages;   // retrieve_pages
  std::string plan_text;    // plan
  BoundingBox bbox;         // ground
  std::string action_text;  // next_action
};

const char* to_string(PlannerResponse::Status s);

// Validates the payload against the request kind; unparseable or mismatched
// payloads come back Malformed rather than throwing.
PlannerResponse planner_response_from_json(const nlohmann::json& j, const std::string& kind);
nlohmann::ordered_json planner_response_to_json(const PlannerResponse& r, const std::string& kind);

class Planner {
 public:
  virtual ~Planner() = default;
  virtual std::string name() const = 0;
  virtual PlannerResponse respond(const PlannerRequest& request) = 0;
};

// Address forms: builtin:oracle, builtin:random, builtin:corrupt:<k>,
// predictions:<dir>, http://host:port, or cmd:<shell command>.
PlannerEndpoint endpoint_from_address(const std::string& address, double timeout_seconds = 30.0);

// Spawns/connects nothing until the first request except for subprocess
// planners, which start their child eagerly. Throws PlannerError when the
// endpoint cannot be created at all.
std::unique_ptr<Planner> make_planner(const PlannerEndpoint& endpoint, uint64_t seed);

}  // namespace appsim
