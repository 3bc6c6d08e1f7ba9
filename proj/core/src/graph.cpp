#include "blindcd/graph.hpp"

#include "blindcd/rng.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace blindcd {

Graph::Graph(Eigen::MatrixXd adjacency) : adj_(std::move(adjacency)) {
    if (adj_.rows() != adj_.cols()) {
        throw std::invalid_argument("Graph: adjacency must be square");
    }
    const Eigen::Index n = adj_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (adj_(i, i) != 0.0) {
            throw std::invalid_argument("Graph: nonzero diagonal entry at node " + std::to_string(i));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (adj_(i, j) != adj_(j, i)) {
                throw std::invalid_argument("Graph: adjacency not symmetric at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            }
            if (!(adj_(i, j) >= 0.0)) {
                throw std::invalid_argument("Graph: negative or NaN weight at (" + std::to_string(i) +
                                            "," + std::to_string(j) + ")");
            }
        }
    }
}

Graph Graph::from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges) {
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j, w] : edges) {
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw std::invalid_argument("from_edges: node index out of range");
        }
        if (i == j) {
            throw std::invalid_argument("from_edges: self-loop at node " + std::to_string(i));
        }
        adj(i, j) = w;
        adj(j, i) = w;
    }
    return Graph(std::move(adj));
}

void validate_partition(const Partition& p, int n) {
    if (static_cast<int>(p.assignment.size()) != n) {
        throw std::invalid_argument("Partition: assignment length " + std::to_string(p.assignment.size()) +
                                    " does not cover " + std::to_string(n) + " nodes");
    }
    if (p.k < 1) {
        throw std::invalid_argument("Partition: k must be >= 1");
    }
    for (int c : p.assignment) {
        if (c < 0 || c >= p.k) {
            throw std::invalid_argument("Partition: label " + std::to_string(c) + " outside [0," +
                                        std::to_string(p.k) + ")");
        }
    }
}

Eigen::MatrixXd laplacian(const Graph& g) {
    const Eigen::MatrixXd& a = g.adjacency();
    Eigen::VectorXd deg = a.rowwise().sum();
    Eigen::MatrixXd l = -a;
    l.diagonal() += deg;
    return l;
}

void fix_column_signs(Eigen::MatrixXd& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (std::abs(m(r, c)) > 1e-12) {
                if (m(r, c) < 0.0) m.col(c) = -m.col(c);
                break;
            }
        }
    }
}

LaplacianEig eig_laplacian(const Graph& g) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(g));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eig_laplacian: eigensolver failed to converge");
    }
    LaplacianEig out{solver.eigenvalues(), solver.eigenvectors()};
    fix_column_signs(out.eigenvectors);
    return out;
}

std::pair<Graph, Partition> sbm_generate(const SbmParams& p) {
    if (p.n <= 0 || p.k <= 0 || p.n % p.k != 0) {
        throw std::invalid_argument("sbm_generate: n must be positive and divisible by k");
    }
    if (!(0.0 <= p.b && p.b <= p.a && p.a <= 1.0)) {
        throw std::invalid_argument("sbm_generate: need 0 <= b <= a <= 1");
    }
    const int block = p.n / p.k;
    Partition truth;
    truth.k = p.k;
    truth.assignment.resize(p.n);
    for (int i = 0; i < p.n; ++i) truth.assignment[i] = i / block;

    auto rng = make_rng(p.seed, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(p.n, p.n);
    for (int i = 0; i < p.n; ++i) {
        for (int j = i + 1; j < p.n; ++j) {
            const double prob = (truth.assignment[i] == truth.assignment[j]) ? p.a : p.b;
            if (unif(rng) < prob) {
                adj(i, j) = 1.0;
                adj(j, i) = 1.0;
            }
        }
    }
    return {Graph(std::move(adj)), std::move(truth)};
}

double ratio_cut(const Graph& g, const Partition& p) {
    validate_partition(p, g.n());
    const int n = g.n();
    std::vector<int> sizes(p.k, 0);
    for (int c : p.assignment) ++sizes[c];
    for (int c = 0; c < p.k; ++c) {
        if (sizes[c] == 0) {
            throw std::invalid_argument("ratio_cut: community " + std::to_string(c) + " is empty");
        }
    }
    const Eigen::MatrixXd& a = g.adjacency();
    std::vector<double> cut(p.k, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (p.assignment[i] != p.assignment[j]) cut[p.assignment[i]] += a(i, j);
        }
    }
    double total = 0.0;
    for (int c = 0; c < p.k; ++c) total += cut[c] / sizes[c];
    return total;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

} // namespace

Graph load_edge_list(const std::string& path, Indexing indexing, bool weighted) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_edge_list: cannot open " + path);
    }
    struct Edge {
        int i, j;
        double w;
    };
    std::vector<Edge> edges;
    int max_node = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::istringstream ls(line);
        long long i = 0, j = 0;
        double w = 1.0;
        if (!(ls >> i) || !(ls >> j)) {
            parse_fail(path, line_no, "malformed line: expected two node indices");
        }
        if (weighted) {
            if (!(ls >> w)) parse_fail(path, line_no, "malformed line: expected edge weight");
        } else {
            double ignored;
            ls >> ignored; // a weight column is tolerated but unused
        }
        std::string trailing;
        if (ls >> trailing) parse_fail(path, line_no, "malformed line: unexpected trailing token '" + trailing + "'");
        if (indexing == Indexing::one) {
            --i;
            --j;
        }
        if (i < 0 || j < 0) parse_fail(path, line_no, "node index out of range");
        if (i == j) parse_fail(path, line_no, "self-loop on node " + std::to_string(i));
        if (w < 0.0) parse_fail(path, line_no, "negative edge weight");
        edges.push_back({static_cast<int>(i), static_cast<int>(j), w});
        max_node = std::max(max_node, static_cast<int>(std::max(i, j)));
    }
    const int n = max_node + 1;
    Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : edges) {
        adj(e.i, e.j) = e.w; // duplicates keep the last weight
        adj(e.j, e.i) = e.w;
    }
    return Graph(std::move(adj));
}

Partition load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_labels: cannot open " + path);
    }
    std::vector<int> raw;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long long v;
        while (ls >> v) raw.push_back(static_cast<int>(v));
    }
    if (raw.empty()) {
        throw std::runtime_error("load_labels: no labels in " + path);
    }
    std::unordered_map<int, int> remap;
    Partition p;
    for (int v : raw) {
        auto [it, inserted] = remap.try_emplace(v, static_cast<int>(remap.size()));
        p.assignment.push_back(it->second);
    }
    p.k = static_cast<int>(remap.size());
    return p;
}

double spectral_gap(const LaplacianEig& eig, int k) {
    const int n = static_cast<int>(eig.eigenvalues.size());
    if (k < 1 || k >= n) {
        throw std::invalid_argument("spectral_gap: k must satisfy 1 <= k < n");
    }
    return eig.eigenvalues(k) - eig.eigenvalues(k - 1);
}

} // namespace blindcd
