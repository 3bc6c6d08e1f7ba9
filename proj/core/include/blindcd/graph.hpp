#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace blindcd {

/// Undirected weighted graph held as a dense symmetric adjacency matrix.
/// Invariants enforced at construction: square, bitwise symmetric, zero
/// diagonal, nonnegative entries.
class Graph {
  public:
    explicit Graph(Eigen::MatrixXd adjacency);

    int n() const { return static_cast<int>(adj_.rows()); }
    const Eigen::MatrixXd& adjacency() const { return adj_; }

    // Builds the symmetric adjacency from an (i, j, w) edge list; both
    // triangle entries are assigned so symmetry is bitwise.
    static Graph from_edges(int n, const std::vector<std::tuple<int, int, double>>& edges);

  private:
    Eigen::MatrixXd adj_;
};

/// Full eigendecomposition of the graph Laplacian, eigenvalues ascending.
/// Column i of eigenvectors pairs with eigenvalues[i]. Column signs follow the
/// convention that the first entry with |v_i| > 1e-12 is positive.
struct LaplacianEig {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

/// Disjoint assignment of n nodes into k communities; labels are 0..k-1.
struct Partition {
    std::vector<int> assignment;
    int k = 0;
};

// Throws std::invalid_argument when p is not a valid partition of n nodes.
void validate_partition(const Partition& p, int n);

struct SbmParams {
    int n = 0;
    int k = 1;
    double a = 0.0; // intra-community edge probability
    double b = 0.0; // inter-community edge probability
    std::uint64_t seed = 0;
};

enum class Indexing { zero, one };

Eigen::MatrixXd laplacian(const Graph& g);

LaplacianEig eig_laplacian(const Graph& g);

// Equal-sized contiguous blocks, unit edge weights, deterministic given seed.
// Returns the graph together with its ground-truth partition.
std::pair<Graph, Partition> sbm_generate(const SbmParams& p);

// Sum over communities of (cut weight out of the community) / (community
// size). Throws when a community is empty.
double ratio_cut(const Graph& g, const Partition& p);

// Text edge list: one "i j" or "i j w" per line, '#' starts a comment.
// Duplicate edges keep the last weight; self-loops are rejected.
Graph load_edge_list(const std::string& path, Indexing indexing, bool weighted);

// Ground-truth label file: one integer label per line, '#' comments allowed.
// Labels are compacted to 0..k-1 preserving order of first appearance.
Partition load_labels(const std::string& path);

// eigenvalues[k] - eigenvalues[k-1] (0-based), i.e. the gap between the
// (k+1)-th and k-th smallest Laplacian eigenvalues.
double spectral_gap(const LaplacianEig& eig, int k);

// Applies the deterministic sign convention to each column in place.
void fix_column_signs(Eigen::MatrixXd& m);

} // namespace blindcd
