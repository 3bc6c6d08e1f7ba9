#include "blindcd/serialization.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace blindcd {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context) {
    if (!j.is_object()) {
        throw std::invalid_argument("config: " + context + " must be an object");
    }
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw std::invalid_argument("config: unknown key '" + context + "." + item.key() + "'");
        }
    }
}

json graph_to_json(const Graph& g) {
    json edges = json::array();
    const Eigen::MatrixXd& a = g.adjacency();
    for (int i = 0; i < g.n(); ++i) {
        for (int j = i + 1; j < g.n(); ++j) {
            if (a(i, j) != 0.0) edges.push_back(json::array({i, j, a(i, j)}));
        }
    }
    return json{{"n", g.n()}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const json& j) {
    reject_unknown_keys(j, {"n", "edges"}, "graph");
    const int n = j.at("n").get<int>();
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) {
            throw std::invalid_argument("graph: each edge must be [i, j, w]");
        }
        edges.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    }
    return Graph::from_edges(n, edges);
}

json filter_to_json(const FilterSpec& f) {
    if (const auto* poly = std::get_if<PolynomialFilter>(&f)) {
        return json{{"variant", "polynomial"}, {"coeffs", poly->coeffs}};
    }
    if (const auto* diff = std::get_if<DiffusionFilter>(&f)) {
        json j{{"variant", "diffusion"}, {"t_d", diff->t_d}};
        if (diff->alpha > 0.0) j["alpha"] = diff->alpha;
        return j;
    }
    if (const auto* iir = std::get_if<SinglePoleIirFilter>(&f)) {
        return json{{"variant", "single_pole_iir"}, {"c", iir->c}};
    }
    if (const auto* ideal = std::get_if<IdealLowPassFilter>(&f)) {
        return json{{"variant", "ideal_low_pass"}, {"k", ideal->k}};
    }
    const auto& boosted = std::get<BoostedIirFilter>(f);
    return json{{"variant", "boosted_iir"}, {"c", boosted.c}, {"lambda_n", boosted.lambda_n}};
}

FilterSpec filter_from_json(const json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "polynomial") {
        reject_unknown_keys(j, {"variant", "coeffs"}, "filter");
        return PolynomialFilter{j.at("coeffs").get<std::vector<double>>()};
    }
    if (variant == "diffusion") {
        reject_unknown_keys(j, {"variant", "alpha", "t_d"}, "filter");
        DiffusionFilter f;
        f.t_d = j.at("t_d").get<int>();
        if (j.contains("alpha") && !j.at("alpha").is_null()) f.alpha = j.at("alpha").get<double>();
        return f;
    }
    if (variant == "single_pole_iir") {
        reject_unknown_keys(j, {"variant", "c"}, "filter");
        return SinglePoleIirFilter{j.at("c").get<double>()};
    }
    if (variant == "ideal_low_pass") {
        reject_unknown_keys(j, {"variant", "k"}, "filter");
        return IdealLowPassFilter{j.at("k").get<int>()};
    }
    if (variant == "boosted_iir") {
        reject_unknown_keys(j, {"variant", "c", "lambda_n"}, "filter");
        return BoostedIirFilter{j.at("c").get<double>(), j.at("lambda_n").get<double>()};
    }
    throw std::invalid_argument("filter: unknown variant '" + variant + "'");
}

json sketch_mode_to_json(const SketchMode& m) {
    if (const auto* rb = std::get_if<RowBernoulliMode>(&m)) {
        return json{{"mode", "row_bernoulli"}, {"p_b", rb->p_b}};
    }
    if (std::get_if<IdentitySubsetMode>(&m)) {
        return json{{"mode", "identity_subset"}};
    }
    const auto& bp = std::get<BipartiteMode>(m);
    return json{{"mode", "bipartite"}, {"connectivity", bp.connectivity}};
}

SketchMode sketch_mode_from_json(const json& j) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "row_bernoulli") {
        RowBernoulliMode m;
        if (j.contains("p_b")) m.p_b = j.at("p_b").get<double>();
        return m;
    }
    if (mode == "identity_subset") return IdentitySubsetMode{};
    if (mode == "bipartite") {
        BipartiteMode m;
        m.connectivity = j.at("connectivity").get<double>();
        return m;
    }
    throw std::invalid_argument("excitation: unknown mode '" + mode + "'");
}

json theory_report_to_json(const TheoryReport& rep) {
    return json{{"eta", rep.eta},
                {"gamma_exact", rep.gamma_exact},
                {"gamma_bound", rep.gamma_bound},
                {"delta", rep.delta},
                {"rhs_bound", rep.rhs_bound},
                {"lhs_value", rep.lhs_value},
                {"epsilon_used", rep.epsilon_used},
                {"f_detected", rep.f_detected},
                {"f_star", rep.f_star},
                {"cov_error_norm", rep.cov_error_norm},
                {"conditions_met", rep.conditions_met}};
}

namespace {

constexpr char kMagic[4] = {'B', 'M', 'C', '1'};
constexpr std::uint32_t kDtypeF64 = 1;

} // namespace

void save_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_matrix_binary: cannot open " + path);
    const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    out.write(reinterpret_cast<const char*>(&kDtypeF64), 4);
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!out) throw std::runtime_error("save_matrix_binary: write failed for " + path);
}

Eigen::MatrixXd load_matrix_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_matrix_binary: cannot open " + path);
    char magic[4];
    std::uint32_t rows = 0, cols = 0, dtype = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    in.read(reinterpret_cast<char*>(&dtype), 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("load_matrix_binary: bad header in " + path);
    }
    if (dtype != kDtypeF64) {
        throw std::runtime_error("load_matrix_binary: unsupported dtype in " + path);
    }
    Eigen::MatrixXd m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in) throw std::runtime_error("load_matrix_binary: truncated payload in " + path);
    return m;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void save_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_matrix_csv: cannot open " + path);
    write_matrix_csv(out, m);
}

void save_trace_csv(const std::string& path, const std::vector<double>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_trace_csv: cannot open " + path);
    out << "iteration,objective\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << i << ',' << format_double(trace[i]) << '\n';
    }
}

} // namespace blindcd
