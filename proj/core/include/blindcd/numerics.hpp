#pragma once

#include "blindcd/graph.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace blindcd {

enum class EigOrder { ascending, descending };

/// K leading eigen-/singular vectors with their values, in the order the
/// caller asked for. Columns are orthonormal.
struct TopKBasis {
    Eigen::MatrixXd vectors; // N x K
    Eigen::VectorXd values;  // length K
};

// Symmetrizes the input as (M + M^T)/2, decomposes, and returns the k
// eigenpairs with the largest (descending) or smallest (ascending)
// eigenvalues. Column signs follow the library-wide convention.
TopKBasis top_k_eigvecs_sym(const Eigen::MatrixXd& m, int k, EigOrder order);

struct SvdThin {
    Eigen::MatrixXd u; // N x r
    Eigen::VectorXd s; // length r, nonincreasing
    Eigen::MatrixXd v; // R x r
};

SvdThin svd_thin(const Eigen::MatrixXd& m);

struct KMeansParams {
    int restarts = 10;
    std::uint64_t seed = 0;
    int max_iter = 100;
    // Optional extra candidate: Lloyd is additionally started from this
    // partition's centroids, and the best run overall is returned.
    const Partition* warm_start = nullptr;
};

struct KMeansResult {
    Partition partition;
    double objective = 0.0;     // within-cluster sum of squared distances
    Eigen::MatrixXd centroids;  // k x dim
    int iterations = 0;
    int restart_index = 0;      // -1 when the warm start won
};

// Lloyd's algorithm with k-means++ seeding per restart; ties in assignment
// break toward the lowest cluster index, empty clusters are repaired by
// moving the point farthest from its centroid. Deterministic given seed.
KMeansResult kmeans_rows(const Eigen::MatrixXd& rows, int k, const KMeansParams& params);

// Spectral norm of u u^T - v v^T for column-orthonormal u, v, computed as
// sqrt(1 - sigma_min(u^T v)^2). Equals the sine of the largest principal
// angle between the two subspaces.
double projector_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

// Sum over communities of squared row distances to the community mean of
// `basis` rows.
double kmeans_objective_against_basis(const Eigen::MatrixXd& basis, const Partition& p);

// Largest singular value of an arbitrary dense matrix.
double spectral_norm(const Eigen::MatrixXd& m);

// Full singular-value spectrum, nonincreasing.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& m);

namespace detail {

// Single seeded k-means run; exposed so tests can inspect the per-iteration
// objective trace. `init` overrides k-means++ seeding when provided.
KMeansResult kmeans_single(const Eigen::MatrixXd& rows, int k, std::mt19937_64& rng, int max_iter,
                           std::vector<double>* objective_trace = nullptr,
                           const Partition* init = nullptr);

} // namespace detail

} // namespace blindcd
