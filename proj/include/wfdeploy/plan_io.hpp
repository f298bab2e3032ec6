#pragma once

#include "wfdeploy/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wfdeploy {

/// A single-quoted token is a literal passed by value; an unquoted token
/// names a datum stored in the engine.
struct Term {
  std::string text;
  bool literal = false;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Input {
  Term name;
  Term value;

  friend bool operator==(const Input&, const Input&) = default;
};

struct InvocationStep {
  std::string service;
  std::vector<Input> inputs;
  std::string output;

  friend bool operator==(const InvocationStep&, const InvocationStep&) = default;
};

struct InvocationDescription {
  std::vector<InvocationStep> steps;

  friend bool operator==(const InvocationDescription&, const InvocationDescription&) = default;
};

/// Every unquoted token of a step's inputs, names first, in order.
std::vector<std::string> consumed_references(const std::vector<Input>& inputs);

/// `SERVICE (PAIR)+ OUTPUT` per line. Throws ParseError with the line number
/// on malformed pairs, unterminated quotes, duplicate outputs or too few fields.
InvocationDescription parse_invocation_description(std::string_view text);
std::string serialize_invocation_description(const InvocationDescription& description);

/// Semantic checks beyond syntax: a reference produced by some step may only
/// be consumed by later steps. References nobody produces are external inputs.
std::vector<std::string> validate_invocation_description(const InvocationDescription& description);

/// Service -> region, in file order.
class DeploymentMapping {
 public:
  DeploymentMapping() = default;
  /// Throws ValidationError on a duplicate service.
  void add(ServiceId service, LocationId region);

  const std::vector<std::pair<ServiceId, LocationId>>& entries() const noexcept {
    return entries_;
  }
  std::optional<LocationId> region_of(std::string_view service) const;
  std::size_t size() const noexcept { return entries_.size(); }

  friend bool operator==(const DeploymentMapping&, const DeploymentMapping&) = default;

 private:
  std::vector<std::pair<ServiceId, LocationId>> entries_;
};

/// `SERVICE --> REGION` per line.
DeploymentMapping parse_deployment_plan(std::string_view text);
std::string serialize_deployment_plan(const DeploymentMapping& mapping);

struct HostRecord {
  std::string provider = "aws";
  std::string user = "ubuntu";
  std::optional<std::string> address;  // nullopt is written as `_`

  friend bool operator==(const HostRecord&, const HostRecord&) = default;
};

struct Host {
  std::string alias;
  HostRecord record;

  friend bool operator==(const Host&, const Host&) = default;
};

struct EngineDecl {
  std::string alias;
  std::string application;

  friend bool operator==(const EngineDecl&, const EngineDecl&) = default;
};

struct Deployment {
  std::string engine;
  std::string host;

  friend bool operator==(const Deployment&, const Deployment&) = default;
};

struct Invocation {
  std::string engine;
  std::string service;
  std::vector<Input> inputs;
  std::string output;

  friend bool operator==(const Invocation&, const Invocation&) = default;
};

/// `FROM TO.Setter 'KEY':REF ACK`: pushes datum REF held by FROM into TO's
/// store under KEY. Generated plans always have KEY == REF.
struct Transfer {
  std::string from;
  std::string to;
  std::string key;
  std::string ref;
  std::string ack;

  friend bool operator==(const Transfer&, const Transfer&) = default;
};

using PlanStep = std::variant<Invocation, Transfer>;

struct ExecutionPlan {
  std::vector<Host> hosts;
  std::vector<EngineDecl> engines;
  std::vector<Deployment> deployments;
  std::vector<PlanStep> steps;

  friend bool operator==(const ExecutionPlan&, const ExecutionPlan&) = default;

  /// Host alias an engine is deployed on, if any.
  std::optional<std::string> host_of(std::string_view engine) const;
};

/// Throws ParseError on unknown directives, undeclared aliases, Setter steps
/// whose target is not an engine, and engines that run steps but are never deployed.
ExecutionPlan parse_execution_plan(std::string_view text);
/// Canonical form: section comments, then hosts, engines, deployments and
/// steps, with a `# invocations for <engine>` comment whenever the engine changes.
std::string serialize_execution_plan(const ExecutionPlan& plan);

/// Builds the execution plan for `description` under `mapping`.
///
/// Engines `eng_1, eng_2, ...` are created per region in first-use order and
/// deployed on a host named after the region. Steps keep the description's
/// order. Right after the step producing a reference, one Transfer is emitted
/// for each other engine consuming it, in order of first consumption; acks are
/// numbered in emission order.
/// Throws ValidationError for unmapped services, missing host records or
/// references consumed before they are produced.
ExecutionPlan generate_execution_plan(const InvocationDescription& description,
                                      const DeploymentMapping& mapping,
                                      const std::map<LocationId, HostRecord>& hosts);

}  // namespace wfdeploy
