#pragma once

#include "wfdeploy/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wfdeploy {

/// Relative frequency of the three DAG building blocks.
struct PatternWeights {
  double linear = 1.0;
  double fan_in = 1.0;
  double fan_out = 1.0;
};

struct WorkflowSpec {
  std::size_t n_services = 10;
  std::vector<LocationId> regions;
  PatternWeights weights;
  int min_size = 1;
  int max_size = 10;
};

/// Grows a connected DAG `s1..sn` from one source by repeatedly appending a
/// linear step, a fan-in (joining current sinks, plus fresh sources if needed)
/// or a fan-out. Locations are uniform over `spec.regions`. Output sizes and
/// source input sizes are integers in [min_size, max_size]; every other
/// service's input is the sum of its predecessors' outputs.
/// Throws std::invalid_argument for empty regions, zero services, all-zero
/// or negative weights, or a bad size range.
Workflow generate_workflow(std::uint64_t seed, const WorkflowSpec& spec);

struct GeoMatrixSpec {
  /// Regions are scattered around `clusters` continent centers in a
  /// `plane_size` x `plane_size` square.
  std::size_t clusters = 3;
  double plane_size = 100.0;
  double cluster_spread = 6.0;
  /// Each pair's path is longer than the straight line by a uniform factor in
  /// [1, 1 + route_inflation]; this is what breaks the triangle inequality.
  double route_inflation = 0.6;
  /// Distance units per unit of cost.
  double distance_per_cost = 10.0;
  /// Fixed cost of reaching any other region.
  double base_cost = 0.2;
  /// Engine <-> service cost inside one region.
  Rational local_cost{1, 20};
  /// Multiplies every entry; scaling the plane by k scales the matrix by k.
  Rational scale{1};
};

/// Symmetric matrix of rounded (1/100) inflated plane distances. The
/// diagonal holds `local_cost`, which is only used for engine <-> service
/// movement; engine-to-engine movement within a region is free.
CostMatrix synthetic_cost_matrix(std::uint64_t seed, const std::vector<LocationId>& regions,
                                 const GeoMatrixSpec& spec = {});

/// Fraction of ordered triples (i, j, k) of distinct locations with
/// c(i,k) > c(i,j) + c(j,k). Zero for fewer than three locations.
double triangle_violation_rate(const CostMatrix& matrix);

/// Reads and parses a file, then validates it. Throws IoError, ParseError
/// or ValidationError.
CostMatrix load_cost_matrix(const std::string& path);
Workflow load_workflow(const std::string& path);

/// `r1 .. rn`.
std::vector<LocationId> numbered_regions(std::size_t n);

}  // namespace wfdeploy
