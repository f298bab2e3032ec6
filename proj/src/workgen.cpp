#include "wfdeploy/workgen.hpp"

#include "text_util.hpp"
#include "wfdeploy/errors.hpp"
#include "wfdeploy/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wfdeploy {

namespace {

enum class Pattern { Linear, FanIn, FanOut };

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

Workflow generate_workflow(std::uint64_t seed, const WorkflowSpec& spec) {
  const auto& w = spec.weights;
  if (spec.n_services == 0) {
    throw std::invalid_argument("need at least one service");
  }
  if (spec.regions.empty()) {
    throw std::invalid_argument("need at least one region");
  }
  if (w.linear < 0 || w.fan_in < 0 || w.fan_out < 0 || w.linear + w.fan_in + w.fan_out <= 0) {
    throw std::invalid_argument("pattern weights must be non-negative with a positive sum");
  }
  if (spec.min_size < 1 || spec.max_size < spec.min_size) {
    throw std::invalid_argument("size range must satisfy 1 <= min_size <= max_size");
  }

  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick_pattern({w.linear, w.fan_in, w.fan_out});
  std::uniform_int_distribution<int> pick_size(spec.min_size, spec.max_size);

  const std::size_t n = spec.n_services;
  std::vector<std::vector<std::size_t>> preds(1);
  std::vector<std::size_t> frontier{0};

  auto add_node = [&](std::vector<std::size_t> from) {
    preds.push_back(std::move(from));
    return preds.size() - 1;
  };

  while (preds.size() < n) {
    const std::size_t remaining = n - preds.size();
    auto pattern = static_cast<Pattern>(pick_pattern(rng));
    if (pattern == Pattern::FanIn && frontier.size() < 2 && remaining < 2) {
      pattern = Pattern::Linear;
    }

    switch (pattern) {
      case Pattern::Linear: {
        std::size_t slot = uniform_index(rng, frontier.size());
        frontier[slot] = add_node({frontier[slot]});
        break;
      }
      case Pattern::FanIn: {
        std::vector<std::size_t> joined;
        if (frontier.size() >= 2) {
          std::size_t k = std::min<std::size_t>(frontier.size(), 2 + uniform_index(rng, 2));
          std::shuffle(frontier.begin(), frontier.end(), rng);
          joined.assign(frontier.end() - static_cast<std::ptrdiff_t>(k), frontier.end());
          frontier.resize(frontier.size() - k);
          std::sort(joined.begin(), joined.end());
        } else {
          joined.push_back(frontier.front());
          frontier.clear();
          std::size_t fresh = std::min<std::size_t>(1 + uniform_index(rng, 2), remaining - 1);
          for (std::size_t i = 0; i < fresh; ++i) {
            joined.push_back(add_node({}));
          }
        }
        frontier.push_back(add_node(std::move(joined)));
        break;
      }
      case Pattern::FanOut: {
        std::size_t slot = uniform_index(rng, frontier.size());
        std::size_t root = frontier[slot];
        frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(slot));
        std::size_t k = std::min<std::size_t>(2 + uniform_index(rng, 2), remaining);
        for (std::size_t i = 0; i < k; ++i) {
          frontier.push_back(add_node({root}));
        }
        break;
      }
    }
  }

  std::vector<Service> services(n);
  for (std::size_t i = 0; i < n; ++i) {
    services[i].id = "s" + std::to_string(i + 1);
    services[i].location = spec.regions[uniform_index(rng, spec.regions.size())];
    services[i].out_size = pick_size(rng);
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    if (preds[i].empty()) {
      services[i].in_size = pick_size(rng);
    }
    for (std::size_t p : preds[i]) {
      services[i].in_size += services[p].out_size;
      edges.push_back({services[p].id, services[i].id});
    }
  }
  return Workflow(std::move(services), std::move(edges));
}

CostMatrix synthetic_cost_matrix(std::uint64_t seed, const std::vector<LocationId>& regions,
                                 const GeoMatrixSpec& spec) {
  if (regions.empty()) {
    throw std::invalid_argument("need at least one region");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, spec.plane_size);
  std::normal_distribution<double> offset(0.0, spec.cluster_spread);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t clusters = std::max<std::size_t>(1, spec.clusters);
  std::vector<std::pair<double, double>> centers(clusters);
  for (auto& c : centers) {
    c = {coord(rng), coord(rng)};
  }
  const std::size_t n = regions.size();
  std::vector<std::pair<double, double>> pos(n);
  for (auto& p : pos) {
    const auto& c = centers[uniform_index(rng, clusters)];
    p = {c.first + offset(rng), c.second + offset(rng)};
  }

  std::vector<Rational> costs(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    costs[i * n + i] = spec.local_cost * spec.scale;
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist = std::hypot(pos[i].first - pos[j].first, pos[i].second - pos[j].second);
      double inflation = 1.0 + spec.route_inflation * unit(rng);
      double raw = dist * inflation / spec.distance_per_cost + spec.base_cost;
      Rational cost = Rational(static_cast<long long>(std::llround(raw * 100.0)), 100) * spec.scale;
      costs[i * n + j] = cost;
      costs[j * n + i] = cost;
    }
  }
  return CostMatrix(regions, std::move(costs));
}

double triangle_violation_rate(const CostMatrix& m) {
  const std::size_t n = m.size();
  if (n < 3) {
    return 0.0;
  }
  std::size_t violations = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) {
          continue;
        }
        ++total;
        if (m.entry(i, k) > m.entry(i, j) + m.entry(j, k)) {
          ++violations;
        }
      }
    }
  }
  return static_cast<double>(violations) / static_cast<double>(total);
}

CostMatrix load_cost_matrix(const std::string& path) {
  return parse_cost_matrix(detail::read_file(path));
}

Workflow load_workflow(const std::string& path) {
  Workflow w = parse_workflow(detail::read_file(path));
  if (w.size() == 0) {
    throw ParseError(0, "workflow '" + path + "' declares no services");
  }
  std::vector<std::string> problems;
  for (const Violation& v : validate_workflow(w)) {
    problems.push_back(v.message);
  }
  if (!problems.empty()) {
    throw ValidationError("invalid workflow '" + path + "'", std::move(problems));
  }
  return w;
}

std::vector<LocationId> numbered_regions(std::size_t n) {
  std::vector<LocationId> out;
  for (std::size_t i = 1; i <= n; ++i) {
    out.push_back("r" + std::to_string(i));
  }
  return out;
}

}  // namespace wfdeploy
