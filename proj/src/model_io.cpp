#include "wfdeploy/model_io.hpp"

#include "text_util.hpp"
#include "wfdeploy/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace wfdeploy {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed reading '" + path + "'");
  }
  return buffer.str();
}

}  // namespace detail

namespace {

Rational parse_size(std::size_t line, std::string_view field) {
  try {
    return parse_rational(field);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

void require_token(std::size_t line, std::string_view token, std::string_view what) {
  if (!is_valid_token(token)) {
    throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(token) + "'");
  }
}

}  // namespace

Workflow parse_workflow(std::string_view text) {
  std::vector<Service> services;
  std::vector<Edge> edges;
  detail::for_each_record(text, [&](std::size_t line, std::string_view body) {
    auto f = detail::split_fields(body);
    if (f[0] == "service") {
      if (f.size() != 5) {
        throw ParseError(line, "expected 'service <id> <location> <in_size> <out_size>'");
      }
      require_token(line, f[1], "service name");
      require_token(line, f[2], "location name");
      services.push_back(
          {std::string(f[1]), std::string(f[2]), parse_size(line, f[3]), parse_size(line, f[4])});
    } else if (f[0] == "edge") {
      if (f.size() != 3) {
        throw ParseError(line, "expected 'edge <producer> <consumer>'");
      }
      require_token(line, f[1], "service name");
      require_token(line, f[2], "service name");
      edges.push_back({std::string(f[1]), std::string(f[2])});
    } else {
      throw ParseError(line, "unknown directive '" + std::string(f[0]) + "'");
    }
  });
  return Workflow(std::move(services), std::move(edges));
}

std::string serialize_workflow(const Workflow& w) {
  std::string out;
  for (const Service& s : w.services()) {
    out += "service " + s.id + " " + s.location + " " + format_rational(s.in_size) + " " +
           format_rational(s.out_size) + "\n";
  }
  for (const Edge& e : w.edges()) {
    out += "edge " + e.producer + " " + e.consumer + "\n";
  }
  return out;
}

CostMatrix parse_cost_matrix(std::string_view text) {
  std::optional<std::vector<LocationId>> header;
  std::map<std::string, std::vector<Rational>, std::less<>> rows;
  std::size_t last_line = 0;
  detail::for_each_record(text, [&](std::size_t line, std::string_view body) {
    last_line = line;
    auto f = detail::split_fields(body);
    if (!header) {
      if (f[0] != "locations" || f.size() < 2) {
        throw ParseError(line, "expected 'locations <id> ...' header");
      }
      header.emplace();
      for (std::size_t i = 1; i < f.size(); ++i) {
        require_token(line, f[i], "location name");
        header->emplace_back(f[i]);
      }
      return;
    }
    const auto& locs = *header;
    std::string from(f[0]);
    if (std::find(locs.begin(), locs.end(), from) == locs.end()) {
      throw ParseError(line, "row for undeclared location '" + from + "'");
    }
    if (rows.count(from) != 0) {
      throw ParseError(line, "duplicate row for '" + from + "'");
    }
    if (f.size() != locs.size() + 1) {
      throw ParseError(line, "row '" + from + "' has " + std::to_string(f.size() - 1) +
                                 " entries, expected " + std::to_string(locs.size()));
    }
    std::vector<Rational> row;
    for (std::size_t i = 1; i < f.size(); ++i) {
      row.push_back(parse_size(line, f[i]));
    }
    rows.emplace(std::move(from), std::move(row));
  });
  if (!header) {
    throw ParseError(0, "cost matrix is empty");
  }
  std::vector<Rational> costs;
  for (const auto& loc : *header) {
    auto it = rows.find(loc);
    if (it == rows.end()) {
      throw ParseError(last_line, "missing row for '" + loc + "'");
    }
    costs.insert(costs.end(), it->second.begin(), it->second.end());
  }
  try {
    return CostMatrix(*header, std::move(costs));
  } catch (const ValidationError& e) {
    throw ParseError(0, e.what());
  }
}

std::string serialize_cost_matrix(const CostMatrix& m) {
  std::string out = "locations";
  for (const auto& loc : m.locations()) {
    out += " " + loc;
  }
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.locations()[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += " " + format_rational(m.entry(i, j));
    }
    out += "\n";
  }
  return out;
}

}  // namespace wfdeploy
