#pragma once

#include "blindcd/analysis.hpp"
#include "blindcd/boosting.hpp"
#include "blindcd/excitation.hpp"
#include "blindcd/filters.hpp"
#include "blindcd/graph.hpp"

#include <nlohmann/json.hpp>
#include <iosfwd>
#include <string>

namespace blindcd {

using json = nlohmann::json;

// Graph <-> {"n": int, "edges": [[i, j, w], ...]}
json graph_to_json(const Graph& g);
Graph graph_from_json(const json& j);

// FilterSpec <-> {"variant": ..., parameters...}
json filter_to_json(const FilterSpec& f);
FilterSpec filter_from_json(const json& j);

// SketchMode <-> {"mode": ..., parameters...}
json sketch_mode_to_json(const SketchMode& m);
SketchMode sketch_mode_from_json(const json& j);

json theory_report_to_json(const TheoryReport& rep);

// Binary matrix container: 16-byte header {magic "BMC1", uint32 rows,
// uint32 cols, uint32 dtype} followed by column-major float64 payload.
// Round-trips bit-exactly.
void save_matrix_binary(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix_binary(const std::string& path);

// Plain CSV dump of a matrix, one column per sample, '.' decimal point,
// 17 significant digits.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// One value per line with an "iteration,objective" header; used for solver
// convergence traces.
void save_trace_csv(const std::string& path, const std::vector<double>& trace);

// Formats a double with 17 significant digits, locale-independent.
std::string format_double(double v);

// Fails with the offending field path when `j` holds keys outside `allowed`.
void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context);

} // namespace blindcd
