#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "vspace/explicit.hpp"
#include "vspace/grid_uso.hpp"
#include "vspace/instances.hpp"
#include "vspace/lp_type.hpp"

namespace vs::io {

/// Largest grid (in vertices) read or written as a USO file.
inline constexpr std::uint64_t kMaxUsoFileVertices = std::uint64_t{1} << 16;

/// A grid USO together with the names of its elements.
struct NamedUso {
  std::shared_ptr<const GridUso> uso;
  std::vector<std::string> names;
};

using Instance = std::variant<ExplicitViolatorSpace, AbstractLpTable, ConcreteLpProblem, NamedUso, PointSet,
                              HalfplaneLp>;

/// "explicit", "abstract", "concrete", "uso", "points" or "halfplanes".
std::string kind_name(const Instance& instance);

/// Parses JSON or CSV text; the kind is sniffed from the top-level JSON keys
/// or the CSV header. Throws ParseError (with line and column where the text
/// itself is malformed) or InvalidInstance.
Instance parse(const std::string& text);
Instance load(const std::string& path);

/// Subset key: member names joined by commas in index order; "" for the empty set.
std::string subset_key(const std::vector<std::string>& names, Mask G);
std::string subset_key(const std::vector<std::string>& names, const ConstraintSet& G);

/// Pretty-printed JSON (two-space indent, keys sorted), newline-terminated.
std::string to_json(const ExplicitViolatorSpace& space);
std::string to_json(const AbstractLpTable& t);
std::string to_json(const ConcreteLpProblem& p);
std::string to_json(const NamedUso& u);

/// CSV with a header row, exact rationals written as p/q.
std::string to_csv(const PointSet& ps);
std::string to_csv(const HalfplaneLp& lp);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace vs::io
