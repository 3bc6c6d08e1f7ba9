#include "blindcd/numerics.hpp"

#include "blindcd/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace blindcd {

TopKBasis top_k_eigvecs_sym(const Eigen::MatrixXd& m, int k, EigOrder order) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("top_k_eigvecs_sym: matrix must be square");
    }
    const int n = static_cast<int>(m.rows());
    if (k < 1 || k > n) {
        throw std::invalid_argument("top_k_eigvecs_sym: k must satisfy 1 <= k <= n");
    }
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("top_k_eigvecs_sym: eigensolver failed to converge");
    }
    TopKBasis out;
    out.vectors.resize(n, k);
    out.values.resize(k);
    if (order == EigOrder::ascending) {
        out.vectors = solver.eigenvectors().leftCols(k);
        out.values = solver.eigenvalues().head(k);
    } else {
        for (int c = 0; c < k; ++c) {
            out.vectors.col(c) = solver.eigenvectors().col(n - 1 - c);
            out.values(c) = solver.eigenvalues()(n - 1 - c);
        }
    }
    fix_column_signs(out.vectors);
    return out;
}

SvdThin svd_thin(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) {
        throw std::invalid_argument("svd_thin: input has non-finite entries");
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdThin out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    if (!out.s.allFinite() || !out.u.allFinite() || !out.v.allFinite()) {
        // BDCSVD can emit NaNs on some nearly rank-deficient inputs
        // (Eigen 3.4 deflation bug); Jacobi is slower but dependable.
        Eigen::JacobiSVD<Eigen::MatrixXd> jsvd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out = SvdThin{jsvd.matrixU(), jsvd.singularValues(), jsvd.matrixV()};
    }
    // Shared sign convention on U, mirrored on V so U diag(s) V^T is unchanged.
    for (Eigen::Index c = 0; c < out.u.cols(); ++c) {
        for (Eigen::Index r = 0; r < out.u.rows(); ++r) {
            if (std::abs(out.u(r, c)) > 1e-12) {
                if (out.u(r, c) < 0.0) {
                    out.u.col(c) = -out.u.col(c);
                    out.v.col(c) = -out.v.col(c);
                }
                break;
            }
        }
    }
    return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    if (svd.singularValues().allFinite()) return svd.singularValues();
    Eigen::JacobiSVD<Eigen::MatrixXd> jsvd(m);
    return jsvd.singularValues();
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return singular_values(m)(0);
}

namespace detail {
namespace {

// Canonical point order: lexicographic over row values. Seeding draws walk
// this order, so the chosen points do not depend on how rows are permuted.
std::vector<int> canonical_order(const Eigen::MatrixXd& rows) {
    std::vector<int> order(rows.rows());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&rows](int a, int b) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) {
            if (rows(a, c) != rows(b, c)) return rows(a, c) < rows(b, c);
        }
        return false;
    });
    return order;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& rows, int k, std::mt19937_64& rng) {
    const int n = static_cast<int>(rows.rows());
    const std::vector<int> order = canonical_order(rows);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Eigen::MatrixXd centroids(k, rows.cols());
    const int first = order[std::min<int>(n - 1, static_cast<int>(unif(rng) * n))];
    centroids.row(0) = rows.row(first);

    Eigen::VectorXd dist2 = (rows.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        int chosen = order[0];
        if (total > 0.0) {
            const double target = unif(rng) * total;
            double acc = 0.0;
            for (int idx : order) {
                acc += dist2(idx);
                if (acc >= target) {
                    chosen = idx;
                    break;
                }
            }
        } else {
            // all points coincide with existing centroids
            chosen = order[std::min<int>(n - 1, static_cast<int>(unif(rng) * n))];
        }
        centroids.row(c) = rows.row(chosen);
        dist2 = dist2.cwiseMin((rows.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

Eigen::MatrixXd centroids_from_partition(const Eigen::MatrixXd& rows, const Partition& p, int k) {
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, rows.cols());
    std::vector<int> counts(k, 0);
    for (int i = 0; i < static_cast<int>(rows.rows()); ++i) {
        centroids.row(p.assignment[i]) += rows.row(i);
        ++counts[p.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) centroids.row(c) /= counts[c];
    }
    return centroids;
}

} // namespace

KMeansResult kmeans_single(const Eigen::MatrixXd& rows, int k, std::mt19937_64& rng, int max_iter,
                           std::vector<double>* objective_trace, const Partition* init) {
    const int n = static_cast<int>(rows.rows());
    Eigen::MatrixXd centroids =
        init ? centroids_from_partition(rows, *init, k) : kmeanspp_seed(rows, k, rng);

    std::vector<int> assign(n, -1);
    std::vector<int> counts(k, 0);
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        bool changed = false;
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (rows.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const double d = (rows.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) { // ties keep the lowest cluster index
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
            ++counts[best];
        }
        // Repair empty clusters: move the point farthest from its centroid.
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            int far_i = -1;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (counts[assign[i]] <= 1) continue;
                const double d = (rows.row(i) - centroids.row(assign[i])).squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            if (far_i >= 0) {
                --counts[assign[far_i]];
                assign[far_i] = c;
                ++counts[c];
                centroids.row(c) = rows.row(far_i);
                changed = true;
            }
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            centroids.row(c).setZero();
        }
        for (int i = 0; i < n; ++i) centroids.row(assign[i]) += rows.row(i);
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) centroids.row(c) /= counts[c];
        }
        if (objective_trace) {
            double obj = 0.0;
            for (int i = 0; i < n; ++i) obj += (rows.row(i) - centroids.row(assign[i])).squaredNorm();
            objective_trace->push_back(obj);
        }
        if (!changed && iter > 0) break;
    }

    KMeansResult res;
    res.partition.assignment = assign;
    res.partition.k = k;
    res.centroids = centroids;
    res.iterations = std::min(iter + 1, max_iter);
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += (rows.row(i) - centroids.row(assign[i])).squaredNorm();
    res.objective = obj;
    return res;
}

} // namespace detail

KMeansResult kmeans_rows(const Eigen::MatrixXd& rows, int k, const KMeansParams& params) {
    const int n = static_cast<int>(rows.rows());
    if (k < 1 || k > n) {
        throw std::invalid_argument("kmeans_rows: k must satisfy 1 <= k <= n");
    }
    if (params.restarts < 1) {
        throw std::invalid_argument("kmeans_rows: restarts must be >= 1");
    }
    KMeansResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < params.restarts; ++r) {
        auto rng = make_rng(params.seed, static_cast<std::uint64_t>(r));
        KMeansResult cur = detail::kmeans_single(rows, k, rng, params.max_iter);
        if (cur.objective < best.objective) {
            best = std::move(cur);
            best.restart_index = r;
        }
    }
    if (params.warm_start) {
        validate_partition(*params.warm_start, n);
        if (params.warm_start->k != k) {
            throw std::invalid_argument("kmeans_rows: warm start has wrong number of communities");
        }
        auto rng = make_rng(params.seed, 0x57a57ULL);
        KMeansResult cur = detail::kmeans_single(rows, k, rng, params.max_iter, nullptr, params.warm_start);
        if (cur.objective < best.objective) {
            best = std::move(cur);
            best.restart_index = -1;
        }
    }
    return best;
}

double projector_distance(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols()) {
        throw std::invalid_argument("projector_distance: dimension mismatch");
    }
    const int k = static_cast<int>(u.cols());
    const double ortho_u = (u.transpose() * u - Eigen::MatrixXd::Identity(k, k)).norm();
    const double ortho_v = (v.transpose() * v - Eigen::MatrixXd::Identity(k, k)).norm();
    if (ortho_u > 1e-8 * std::sqrt(static_cast<double>(k)) + 1e-8 ||
        ortho_v > 1e-8 * std::sqrt(static_cast<double>(k)) + 1e-8) {
        throw std::invalid_argument("projector_distance: inputs are not column-orthonormal");
    }
    // sqrt(1 - sigma_min(u^T v)^2) evaluated through the residual
    // u - v (v^T u), whose top singular value is the same sine but does not
    // lose precision when the subspaces nearly coincide
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(u - v * (v.transpose() * u));
    return std::min(1.0, svd.singularValues()(0));
}

double kmeans_objective_against_basis(const Eigen::MatrixXd& basis, const Partition& p) {
    validate_partition(p, static_cast<int>(basis.rows()));
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(p.k, basis.cols());
    std::vector<int> counts(p.k, 0);
    for (int i = 0; i < static_cast<int>(basis.rows()); ++i) {
        means.row(p.assignment[i]) += basis.row(i);
        ++counts[p.assignment[i]];
    }
    for (int c = 0; c < p.k; ++c) {
        if (counts[c] == 0) {
            throw std::invalid_argument("kmeans_objective_against_basis: community " + std::to_string(c) +
                                        " is empty");
        }
        means.row(c) /= counts[c];
    }
    double obj = 0.0;
    for (int i = 0; i < static_cast<int>(basis.rows()); ++i) {
        obj += (basis.row(i) - means.row(p.assignment[i])).squaredNorm();
    }
    return obj;
}

} // namespace blindcd
