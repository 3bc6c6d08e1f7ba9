#include "blindcd/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace blindcd {

namespace {

double horner_eval(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

} // namespace

double effective_diffusion_alpha(const DiffusionFilter& f, const LaplacianEig& eig) {
    const double lmax = eig.eigenvalues(eig.eigenvalues.size() - 1);
    double alpha = f.alpha;
    if (alpha <= 0.0) {
        // Default keeps a margin below the 1/lambda_max admissibility edge.
        // The 1.4 factor balances the covariance pipeline (which wants fast
        // tail decay) against the sketch-decomposition pipeline (which needs
        // the community singular values to survive the trace-norm shrink).
        alpha = (lmax > 0.0) ? 1.0 / (1.4 * lmax) : 1.0;
    }
    if (lmax > 0.0 && !(alpha > 0.0 && alpha < 1.0 / lmax)) {
        throw std::invalid_argument("diffusion filter: alpha out of admissible range (0, 1/lambda_max)");
    }
    if (alpha <= 0.0) {
        throw std::invalid_argument("diffusion filter: alpha must be positive");
    }
    if (f.t_d < 1) {
        throw std::invalid_argument("diffusion filter: order t_d must be >= 1");
    }
    return alpha;
}

FrequencyResponse freq_response(const FilterSpec& f, const LaplacianEig& eig) {
    const Eigen::VectorXd& lam = eig.eigenvalues;
    const int n = static_cast<int>(lam.size());
    FrequencyResponse out;
    out.values.resize(n);

    if (const auto* poly = std::get_if<PolynomialFilter>(&f)) {
        for (int i = 0; i < n; ++i) out.values(i) = horner_eval(poly->coeffs, lam(i));
    } else if (const auto* diff = std::get_if<DiffusionFilter>(&f)) {
        const double alpha = effective_diffusion_alpha(*diff, eig);
        for (int i = 0; i < n; ++i) out.values(i) = std::pow(1.0 - alpha * lam(i), diff->t_d - 1);
    } else if (const auto* iir = std::get_if<SinglePoleIirFilter>(&f)) {
        if (!(iir->c > 0.0)) throw std::invalid_argument("IIR filter: c must be positive");
        for (int i = 0; i < n; ++i) out.values(i) = 1.0 / (1.0 + lam(i) / iir->c);
    } else if (const auto* ideal = std::get_if<IdealLowPassFilter>(&f)) {
        if (ideal->k < 1 || ideal->k > n) {
            throw std::invalid_argument("ideal low-pass filter: k out of range");
        }
        for (int i = 0; i < n; ++i) out.values(i) = (i < ideal->k) ? 1.0 : 0.0;
    } else if (const auto* boosted = std::get_if<BoostedIirFilter>(&f)) {
        if (!(boosted->c > 0.0)) throw std::invalid_argument("boosted IIR filter: c must be positive");
        const double floor_level = 1.0 / (1.0 + boosted->lambda_n / boosted->c);
        for (int i = 0; i < n; ++i) out.values(i) = 1.0 / (1.0 + lam(i) / boosted->c) - floor_level;
    }
    if (!out.values.allFinite()) {
        throw std::runtime_error("freq_response: non-finite response values");
    }
    return out;
}

Eigen::MatrixXd apply_filter(const FilterSpec& f, const LaplacianEig& eig, const Eigen::MatrixXd& x) {
    if (x.rows() != eig.eigenvectors.rows()) {
        throw std::invalid_argument("apply_filter: input has wrong number of rows");
    }
    const FrequencyResponse h = freq_response(f, eig);
    return eig.eigenvectors * (h.values.asDiagonal() * (eig.eigenvectors.transpose() * x));
}

Eigen::MatrixXd apply_filter_horner(const PolynomialFilter& f, const Eigen::MatrixXd& lap,
                                    const Eigen::MatrixXd& x) {
    if (lap.rows() != lap.cols() || lap.rows() != x.rows()) {
        throw std::invalid_argument("apply_filter_horner: dimension mismatch");
    }
    if (f.coeffs.empty()) return Eigen::MatrixXd::Zero(x.rows(), x.cols());
    Eigen::MatrixXd acc = f.coeffs.back() * x;
    for (int t = static_cast<int>(f.coeffs.size()) - 2; t >= 0; --t) {
        acc = lap * acc + f.coeffs[t] * x;
    }
    return acc;
}

double lowpass_coefficient(const FrequencyResponse& h, int k) {
    const int n = static_cast<int>(h.values.size());
    if (k < 1 || k >= n) {
        throw std::invalid_argument("lowpass_coefficient: k must satisfy 1 <= k < n");
    }
    const double head_min = h.values.head(k).cwiseAbs().minCoeff();
    if (head_min == 0.0) {
        throw std::domain_error("lowpass_coefficient: head response vanishes; not low-pass at k=" +
                                std::to_string(k));
    }
    const double tail_max = h.values.tail(n - k).cwiseAbs().maxCoeff();
    return tail_max / head_min;
}

double eta_closed_form(const FilterSpec& f, const LaplacianEig& eig, int k) {
    const int n = static_cast<int>(eig.eigenvalues.size());
    if (k < 1 || k >= n) {
        throw std::invalid_argument("eta_closed_form: k must satisfy 1 <= k < n");
    }
    const double lk = eig.eigenvalues(k - 1);
    const double lk1 = eig.eigenvalues(k);

    if (const auto* diff = std::get_if<DiffusionFilter>(&f)) {
        const double alpha = effective_diffusion_alpha(*diff, eig);
        return std::pow((1.0 - alpha * lk1) / (1.0 - alpha * lk), diff->t_d - 1);
    }
    if (const auto* iir = std::get_if<SinglePoleIirFilter>(&f)) {
        return (1.0 + lk / iir->c) / (1.0 + lk1 / iir->c);
    }
    if (const auto* boosted = std::get_if<BoostedIirFilter>(&f)) {
        const double ln = boosted->lambda_n;
        if (ln - lk <= 0.0) {
            throw std::domain_error("eta_closed_form: head response vanishes; not low-pass at k=" +
                                    std::to_string(k));
        }
        const double iir_eta = (1.0 + lk / boosted->c) / (1.0 + lk1 / boosted->c);
        return (ln - lk1) / (ln - lk) * iir_eta;
    }
    throw std::invalid_argument("eta_closed_form: unsupported filter variant");
}

EtaBounds observation1_bounds(double h_k, double gap, double mu_h, double l_h, double h_prime_at_kp1) {
    if (!(0.0 <= mu_h && mu_h <= l_h)) {
        throw std::invalid_argument("observation1_bounds: need 0 <= mu_h <= l_h");
    }
    if (!(h_k > 0.0)) throw std::invalid_argument("observation1_bounds: h_k must be positive");
    if (!(gap >= 0.0)) throw std::invalid_argument("observation1_bounds: gap must be nonnegative");
    EtaBounds b;
    b.upper = 1.0 - (0.5 * mu_h * gap * gap - h_prime_at_kp1 * gap) / h_k;
    b.lower = 1.0 - (0.5 * l_h * gap * gap - h_prime_at_kp1 * gap) / h_k;
    return b;
}

namespace {

// (1 - alpha x)^(t_d - 1) expanded into monomial coefficients. Alternating
// terms can be large for high orders, so the expanded form loses absolute
// precision near the spectrum's upper end; fine for the moderate orders the
// boosting path works with.
std::vector<double> diffusion_poly_coeffs(double alpha, int t_d) {
    const int deg = t_d - 1;
    std::vector<double> coeffs(deg + 1);
    double term = 1.0;
    for (int t = 0; t <= deg; ++t) {
        coeffs[t] = term;
        term *= -alpha * static_cast<double>(deg - t) / static_cast<double>(t + 1);
    }
    return coeffs;
}

} // namespace

FilterSpec boost_filter(const FilterSpec& f, const LaplacianEig& eig) {
    const FrequencyResponse h = freq_response(f, eig);
    const int n = static_cast<int>(h.values.size());
    const double scale = std::max(1.0, h.values.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * scale;
    for (int i = 0; i < n; ++i) {
        if (h.values(i) < -tol) {
            throw std::invalid_argument("boost_filter: response is negative on the spectrum");
        }
        if (i + 1 < n && h.values(i + 1) > h.values(i) + tol) {
            throw std::invalid_argument("boost_filter: response is not nonincreasing on the spectrum");
        }
    }
    const double floor_level = h.values(n - 1);
    if (std::abs(floor_level) <= 1e-15 * scale) {
        return f; // nothing to subtract
    }
    const double lmax = eig.eigenvalues(n - 1);

    if (const auto* iir = std::get_if<SinglePoleIirFilter>(&f)) {
        return BoostedIirFilter{iir->c, lmax};
    }
    if (const auto* boosted = std::get_if<BoostedIirFilter>(&f)) {
        return BoostedIirFilter{boosted->c, lmax};
    }
    if (const auto* poly = std::get_if<PolynomialFilter>(&f)) {
        PolynomialFilter out = *poly;
        if (out.coeffs.empty()) out.coeffs.push_back(0.0);
        out.coeffs[0] -= floor_level;
        return out;
    }
    if (const auto* diff = std::get_if<DiffusionFilter>(&f)) {
        PolynomialFilter out{diffusion_poly_coeffs(effective_diffusion_alpha(*diff, eig), diff->t_d)};
        out.coeffs[0] -= floor_level;
        return out;
    }
    // Ideal low-pass with k == n is the identity; shifting it yields the zero filter.
    return PolynomialFilter{{1.0 - floor_level}};
}

} // namespace blindcd
