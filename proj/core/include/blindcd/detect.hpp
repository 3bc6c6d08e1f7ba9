#pragma once

#include "blindcd/excitation.hpp"
#include "blindcd/graph.hpp"
#include "blindcd/numerics.hpp"

#include <Eigen/Dense>

namespace blindcd {

enum class Method { blind, boosted, oracle, blind_truecov };

const char* method_name(Method m);

struct DetectionResult {
    Partition partition;
    TopKBasis basis_used;
    Method method = Method::blind;
    KMeansResult kmeans;
};

// Covariance spectral pipeline: sample covariance, its top-k eigenvectors
// (descending), then k-means on the eigenvector rows.
DetectionResult blind_cd(const SignalBatch& batch, int k, const KMeansParams& kmeans_params);

// Same pipeline with an injected covariance; lets callers run the method on
// the exact noiseless covariance instead of a sampled one.
DetectionResult blind_cd_from_cov(const Eigen::MatrixXd& cov, int k, const KMeansParams& kmeans_params);

// Spectral clustering on the true Laplacian: k-means on the rows of the k
// smallest-eigenvalue eigenvectors.
DetectionResult oracle_spectral(const Graph& g, int k, const KMeansParams& kmeans_params);
DetectionResult oracle_spectral(const LaplacianEig& eig, int k, const KMeansParams& kmeans_params);

} // namespace blindcd
