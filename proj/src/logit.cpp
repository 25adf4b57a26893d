#include "crashsev/logit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "crashsev/csv.hpp"
#include "crashsev/kernels.hpp"
#include "crashsev/linalg.hpp"
#include "crashsev/stats.hpp"

namespace crashsev {

namespace {

constexpr double kRidge = 1e-8;
constexpr double kCoefCap = 20.0;

// Design with intercept prepended as column 0.
Matrix with_intercept(const Matrix& x) {
    Matrix out(x.rows(), x.cols() + 1);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        out.at(r, 0) = 1.0;
        const auto src = x.row(r);
        std::copy(src.begin(), src.end(), out.row(r).begin() + 1);
    }
    return out;
}

// Column-major copy so the information matrix reduces to weighted dots over
// contiguous spans.
Matrix transpose(const Matrix& x) {
    Matrix out(x.cols(), x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out.at(c, r) = x.at(r, c);
    }
    return out;
}

double log_likelihood(const Matrix& xd, std::span<const int> y,
                      std::span<const double> beta) {
    double ll = 0.0;
    for (std::size_t r = 0; r < xd.rows(); ++r) {
        const double eta = kernels::dot(xd.row(r), beta);
        ll += y[r] == 1 ? -log1pexp(-eta) : -log1pexp(eta);
    }
    return ll;
}

}  // namespace

LogitFit fit_logit_wald(const DesignMatrix& x, int max_iter, double tol) {
    const std::size_t n = x.n_rows();
    const std::size_t p = x.n_cols();
    if (n <= p + 1) {
        throw DataError("fit_logit_wald: need n > p (+ intercept); got n=" +
                        std::to_string(n) + ", p=" + std::to_string(p));
    }
    std::int64_t positives = 0;
    for (int label : x.labels) positives += label;
    if (positives == 0 || positives == static_cast<std::int64_t>(n)) {
        throw DataError("fit_logit_wald: labels contain a single class");
    }
    for (std::size_t c = 0; c < p; ++c) {
        const double first = x.values.at(0, c);
        bool constant = true;
        for (std::size_t r = 1; r < n && constant; ++r) {
            constant = x.values.at(r, c) == first;
        }
        if (constant) {
            throw DataError("fit_logit_wald: constant column '" + x.column_names[c] +
                            "'");
        }
    }

    const Matrix xd = with_intercept(x.values);
    const Matrix xt = transpose(xd);
    const std::size_t d = p + 1;
    std::vector<double> beta(d, 0.0);
    std::vector<double> grad(d), mu(n), w(n);
    Matrix info(d, d);

    const auto fill_information = [&] {
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = a; b < d; ++b) {
                const double s = kernels::weighted_dot(xt.row(a), xt.row(b), w);
                info.at(a, b) = info.at(b, a) = s;
            }
            info.at(a, a) += kRidge;
        }
    };

    LogitFit fit;
    fit.column_names = x.column_names;
    double ll = log_likelihood(xd, x.labels, beta);

    int iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        for (std::size_t r = 0; r < n; ++r) {
            mu[r] = sigmoid(kernels::dot(xd.row(r), beta));
            w[r] = mu[r] * (1.0 - mu[r]);
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const double resid = static_cast<double>(x.labels[r]) - mu[r];
            kernels::axpy(resid, xd.row(r), grad);
        }
        double grad_norm = 0.0;
        for (double g : grad) grad_norm = std::max(grad_norm, std::fabs(g));
        fit.grad_inf_norm = grad_norm;
        if (grad_norm < tol) {
            converged = true;
            break;
        }

        // Observed information X'WX, ridge-stabilized.
        fill_information();
        const auto chol = cholesky(info);
        if (!chol) {
            std::string cols;
            for (const auto& name : x.column_names) {
                if (!cols.empty()) cols += ", ";
                cols += name;
            }
            throw ModelError("fit_logit_wald: singular information matrix; "
                             "collinear candidates among: " + cols);
        }
        const auto step = cholesky_solve(*chol, grad);

        // Step halving keeps the likelihood non-decreasing, up to rounding
        // noise in the n-term sum.
        const double slack = 1e-12 * std::max(1.0, std::fabs(ll));
        double scale = 1.0;
        std::vector<double> candidate(d);
        double new_ll = -std::numeric_limits<double>::infinity();
        for (int half = 0; half < 30; ++half) {
            for (std::size_t a = 0; a < d; ++a) candidate[a] = beta[a] + scale * step[a];
            new_ll = log_likelihood(xd, x.labels, candidate);
            if (new_ll >= ll - slack) break;
            scale *= 0.5;
        }
        beta = candidate;
        ll = new_ll;

        double max_coef = 0.0;
        for (double b : beta) max_coef = std::max(max_coef, std::fabs(b));
        if (max_coef > kCoefCap) break;  // quasi-separation: flag, don't report
    }

    fit.iterations = iter;
    fit.converged = converged;
    double max_coef = 0.0;
    for (double b : beta) max_coef = std::max(max_coef, std::fabs(b));
    if (max_coef > kCoefCap) fit.converged = false;

    // Wald statistics from the inverse observed information at the solution.
    for (std::size_t r = 0; r < n; ++r) {
        mu[r] = sigmoid(kernels::dot(xd.row(r), beta));
        w[r] = mu[r] * (1.0 - mu[r]);
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += xd.at(r, a) * xd.at(r, b) * w[r];
            info.at(a, b) = info.at(b, a) = s;
        }
        info.at(a, a) += kRidge;
    }
    const auto chol = cholesky(info);
    if (!chol) {
        throw ModelError("fit_logit_wald: singular information matrix at solution");
    }
    const Matrix cov = cholesky_inverse(*chol);

    const double z95 = norm_quantile(0.975);
    const double z90 = norm_quantile(0.95);
    fit.intercept = beta[0];
    fit.intercept_se = std::sqrt(std::max(cov.at(0, 0), 0.0));
    fit.coef.resize(p);
    fit.se.resize(p);
    fit.z.resize(p);
    fit.p.resize(p);
    fit.ci95_low.resize(p);
    fit.ci95_high.resize(p);
    fit.ci90_low.resize(p);
    fit.ci90_high.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        const double c = beta[j + 1];
        const double s = std::sqrt(std::max(cov.at(j + 1, j + 1), 0.0));
        fit.coef[j] = c;
        fit.se[j] = s;
        fit.z[j] = s > 0.0 ? c / s : 0.0;
        fit.p[j] = two_sided_p(fit.z[j]);
        fit.ci95_low[j] = c - z95 * s;
        fit.ci95_high[j] = c + z95 * s;
        fit.ci90_low[j] = c - z90 * s;
        fit.ci90_high[j] = c + z90 * s;
    }
    return fit;
}

SelectionReport select_significant(const LogitFit& fit, double alpha) {
    if (!fit.converged) {
        throw ModelError("select_significant: fit did not converge");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ConfigError("select_significant: alpha must lie in (0,1]");
    }
    SelectionReport report;
    report.alpha = alpha;
    for (std::size_t j = 0; j < fit.column_names.size(); ++j) {
        if (fit.p[j] < alpha) {
            report.kept.push_back(fit.column_names[j]);
        } else {
            report.dropped.emplace_back(fit.column_names[j], fit.p[j]);
        }
    }
    return report;
}

void write_selection_csv(const std::string& path, const LogitFit& fit,
                         const SelectionReport& report) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "feature,coef,std_err,z,p_value,ci_0.025,ci_0.975,ci_0.05,ci_0.95,kept\n";
    for (std::size_t j = 0; j < fit.column_names.size(); ++j) {
        const bool kept = std::find(report.kept.begin(), report.kept.end(),
                                    fit.column_names[j]) != report.kept.end();
        out << csv::escape(fit.column_names[j]) << ','
            << csv::format_double(fit.coef[j]) << ',' << csv::format_double(fit.se[j])
            << ',' << csv::format_double(fit.z[j]) << ','
            << csv::format_double(fit.p[j]) << ','
            << csv::format_double(fit.ci95_low[j]) << ','
            << csv::format_double(fit.ci95_high[j]) << ','
            << csv::format_double(fit.ci90_low[j]) << ','
            << csv::format_double(fit.ci90_high[j]) << ',' << (kept ? 1 : 0) << '\n';
    }
}

}  // namespace crashsev
