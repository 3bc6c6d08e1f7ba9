#include "blindcd/detect.hpp"

#include <stdexcept>

namespace blindcd {

const char* method_name(Method m) {
    switch (m) {
        case Method::blind: return "blind";
        case Method::boosted: return "boosted";
        case Method::oracle: return "oracle";
        case Method::blind_truecov: return "blind_truecov";
    }
    return "unknown";
}

DetectionResult blind_cd_from_cov(const Eigen::MatrixXd& cov, int k, const KMeansParams& kmeans_params) {
    if (k < 1 || k > cov.rows()) {
        throw std::invalid_argument("blind_cd: k must satisfy 1 <= k <= n");
    }
    DetectionResult res;
    res.method = Method::blind;
    res.basis_used = top_k_eigvecs_sym(cov, k, EigOrder::descending);
    res.kmeans = kmeans_rows(res.basis_used.vectors, k, kmeans_params);
    res.partition = res.kmeans.partition;
    return res;
}

DetectionResult blind_cd(const SignalBatch& batch, int k, const KMeansParams& kmeans_params) {
    return blind_cd_from_cov(sample_covariance(batch), k, kmeans_params);
}

DetectionResult oracle_spectral(const LaplacianEig& eig, int k, const KMeansParams& kmeans_params) {
    const int n = static_cast<int>(eig.eigenvalues.size());
    if (k < 1 || k > n) {
        throw std::invalid_argument("oracle_spectral: k must satisfy 1 <= k <= n");
    }
    DetectionResult res;
    res.method = Method::oracle;
    res.basis_used.vectors = eig.eigenvectors.leftCols(k);
    res.basis_used.values = eig.eigenvalues.head(k);
    res.kmeans = kmeans_rows(res.basis_used.vectors, k, kmeans_params);
    res.partition = res.kmeans.partition;
    return res;
}

DetectionResult oracle_spectral(const Graph& g, int k, const KMeansParams& kmeans_params) {
    return oracle_spectral(eig_laplacian(g), k, kmeans_params);
}

} // namespace blindcd
