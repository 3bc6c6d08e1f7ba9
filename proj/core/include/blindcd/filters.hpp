#pragma once

#include "blindcd/graph.hpp"

#include <Eigen/Dense>
#include <variant>
#include <vector>

namespace blindcd {

/// Explicit polynomial in the Laplacian: sum_t coeffs[t] L^t.
struct PolynomialFilter {
    std::vector<double> coeffs;
};

/// Discrete diffusion over t_d - 1 steps: (I - alpha L)^(t_d - 1).
/// alpha <= 0 requests the per-graph default 1 / (1.4 * lambda_max).
struct DiffusionFilter {
    double alpha = 0.0;
    int t_d = 2;
};

/// Single-pole IIR filter (I + L/c)^-1.
struct SinglePoleIirFilter {
    double c = 1.0;
};

/// Projector onto the k smallest-eigenvalue eigenvectors.
struct IdealLowPassFilter {
    int k = 1;
};

/// IIR filter with its response shifted to vanish at lambda_n:
/// (1 + lambda/c)^-1 - (1 + lambda_n/c)^-1.
struct BoostedIirFilter {
    double c = 1.0;
    double lambda_n = 0.0;
};

using FilterSpec =
    std::variant<PolynomialFilter, DiffusionFilter, SinglePoleIirFilter, IdealLowPassFilter, BoostedIirFilter>;

/// Filter response sampled at the Laplacian eigenvalues, ascending order.
struct FrequencyResponse {
    Eigen::VectorXd values;
};

// Resolves DiffusionFilter's automatic alpha against the realized spectrum.
double effective_diffusion_alpha(const DiffusionFilter& f, const LaplacianEig& eig);

FrequencyResponse freq_response(const FilterSpec& f, const LaplacianEig& eig);

// Spectral application V diag(h) V^T x; x may be a vector or an N x M matrix.
Eigen::MatrixXd apply_filter(const FilterSpec& f, const LaplacianEig& eig, const Eigen::MatrixXd& x);

// Horner evaluation of a polynomial filter through repeated L-multiplies;
// agrees with the spectral path up to roundoff and never forms the
// eigendecomposition.
Eigen::MatrixXd apply_filter_horner(const PolynomialFilter& f, const Eigen::MatrixXd& lap,
                                    const Eigen::MatrixXd& x);

// max |response| over the tail (indices k..N-1) divided by min |response|
// over the head (indices 0..k-1). Throws when the head minimum is zero
// ("not low-pass at k").
double lowpass_coefficient(const FrequencyResponse& h, int k);

// Closed forms for the supported families:
//   diffusion:  ((1 - alpha l_{K+1}) / (1 - alpha l_K))^(t_d - 1)
//   IIR:        (1 + l_K / c) / (1 + l_{K+1} / c)
//   boosted IIR: (l_N - l_{K+1}) / (l_N - l_K) times the IIR value
double eta_closed_form(const FilterSpec& f, const LaplacianEig& eig, int k);

struct EtaBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Curvature-based enclosure of the low-pass coefficient for a convex,
// nonincreasing generating function: mu_h and l_h bound the second
// derivative on [l_K, l_{K+1}], h_prime_at_kp1 is h'(l_{K+1}).
EtaBounds observation1_bounds(double h_k, double gap, double mu_h, double l_h, double h_prime_at_kp1);

// Returns a spec whose response is the input's response minus its value at
// the largest eigenvalue. Requires the response to be nonnegative and
// nonincreasing on the realized spectrum.
FilterSpec boost_filter(const FilterSpec& f, const LaplacianEig& eig);

} // namespace blindcd
