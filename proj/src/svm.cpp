#include "crashsev/svm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "crashsev/kernels.hpp"
#include "crashsev/stats.hpp"

namespace crashsev {

namespace {

constexpr double kTau = 1e-12;

// FIFO cache of RBF kernel rows; values are label-free K(x_i, ·).
class KernelCache {
public:
    KernelCache(const Matrix& x, double gamma, std::size_t budget_bytes)
        : x_(x), gamma_(gamma) {
        const std::size_t row_bytes = x.rows() * sizeof(double);
        cap_ = std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(row_bytes, 1));
    }

    const std::vector<double>& row(int i) {
        auto it = rows_.find(i);
        if (it != rows_.end()) return it->second;
        if (rows_.size() >= cap_) {
            rows_.erase(order_.front());
            order_.pop_front();
        }
        std::vector<double> k(x_.rows());
        const auto xi = x_.row(i);
        for (std::size_t j = 0; j < x_.rows(); ++j) {
            k[j] = std::exp(-gamma_ * kernels::squared_distance(xi, x_.row(j)));
        }
        order_.push_back(i);
        return rows_.emplace(i, std::move(k)).first->second;
    }

private:
    const Matrix& x_;
    double gamma_;
    std::size_t cap_;
    std::unordered_map<int, std::vector<double>> rows_;
    std::deque<int> order_;
};

// Platt's sigmoid fit (Newton with backtracking) on decision values.
std::pair<double, double> fit_platt(std::span<const double> decision,
                                    std::span<const int> labels) {
    const std::size_t n = decision.size();
    double prior1 = 0.0, prior0 = 0.0;
    for (int label : labels) (label == 1 ? prior1 : prior0) += 1.0;

    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] == 1 ? hi : lo;

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    const double sigma = 1e-12;
    const double eps = 1e-5;

    auto objective = [&](double pa, double pb) {
        double fval = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f_ab = decision[i] * pa + pb;
            if (f_ab >= 0.0) fval += t[i] * f_ab + log1pexp(-f_ab);
            else fval += (t[i] - 1.0) * f_ab + log1pexp(f_ab);
        }
        return fval;
    };

    double fval = objective(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f_ab = decision[i] * a + b;
            const double p = f_ab >= 0.0 ? std::exp(-f_ab) / (1.0 + std::exp(-f_ab))
                                         : 1.0 / (1.0 + std::exp(f_ab));
            const double q = 1.0 - p;
            const double d2 = p * q;
            h11 += decision[i] * decision[i] * d2;
            h22 += d2;
            h21 += decision[i] * d2;
            const double d1 = t[i] - p;
            g1 += decision[i] * d1;
            g2 += d1;
        }
        if (std::fabs(g1) < eps && std::fabs(g2) < eps) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        while (step >= 1e-10) {
            const double new_a = a + step * da;
            const double new_b = b + step * db;
            const double new_f = objective(new_a, new_b);
            if (new_f < fval + 1e-4 * step * gd) {
                a = new_a;
                b = new_b;
                fval = new_f;
                break;
            }
            step *= 0.5;
        }
        if (step < 1e-10) break;
    }
    return {a, b};
}

}  // namespace

double SvmModel::decision_value(std::span<const double> row) const {
    double f = 0.0;
    for (std::size_t i = 0; i < support_vectors.rows(); ++i) {
        f += sv_coef[i] *
             std::exp(-gamma * kernels::squared_distance(support_vectors.row(i), row));
    }
    return f - rho;
}

double SvmModel::probability(std::span<const double> row) const {
    return sigmoid(-(platt_a * decision_value(row) + platt_b));
}

SvmModel train_svm_rbf(const Matrix& x, std::span<const int> y, const SvmConfig& config,
                       const SvmObserver& observer) {
    const std::size_t n = x.rows();
    if (n == 0) throw DataError("train_svm_rbf: empty input");
    if (!(config.c > 0.0)) throw ConfigError("train_svm_rbf: C must be positive");
    if (!(config.gamma > 0.0)) throw ConfigError("train_svm_rbf: gamma must be positive");

    std::vector<double> sign(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        sign[i] = y[i] == 1 ? 1.0 : -1.0;
        (y[i] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw ModelError("train_svm_rbf: both classes must be present");
    }

    const double c = config.c;
    const int max_iter =
        config.max_iter > 0
            ? config.max_iter
            : std::max(100000, static_cast<int>(20 * n));

    KernelCache cache(x, config.gamma, 256ull << 20);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of ½αᵀQα − eᵀα at α = 0
    // K(x,x) = 1 for the RBF kernel.
    double gap = std::numeric_limits<double>::infinity();
    int iter = 0;

    for (; iter < max_iter; ++iter) {
        // Working-set selection: maximal violating i, second-order j.
        double g_max = -std::numeric_limits<double>::infinity();
        int i = -1;
        for (std::size_t t = 0; t < n; ++t) {
            if ((sign[t] > 0.0 && alpha[t] < c) || (sign[t] < 0.0 && alpha[t] > 0.0)) {
                const double v = -sign[t] * grad[t];
                if (v >= g_max) {
                    g_max = v;
                    i = static_cast<int>(t);
                }
            }
        }
        if (i < 0) break;

        const auto& k_i = cache.row(i);
        double g_max2 = -std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        int j = -1;
        for (std::size_t t = 0; t < n; ++t) {
            const bool in_low =
                (sign[t] > 0.0 && alpha[t] > 0.0) || (sign[t] < 0.0 && alpha[t] < c);
            if (!in_low) continue;
            const double v = sign[t] * grad[t];
            g_max2 = std::max(g_max2, v);
            const double grad_diff = g_max + v;
            if (grad_diff > 0.0) {
                double quad = 2.0 - 2.0 * k_i[t];  // K_ii + K_tt − 2K_it
                if (quad <= 0.0) quad = kTau;
                const double obj = -(grad_diff * grad_diff) / quad;
                if (obj <= best_obj) {
                    best_obj = obj;
                    j = static_cast<int>(t);
                }
            }
        }
        gap = g_max + g_max2;
        if (gap < config.tol || j < 0) break;

        const auto& k_j = cache.row(j);
        const double old_ai = alpha[i], old_aj = alpha[j];

        if (sign[i] != sign[j]) {
            double quad = 2.0 + 2.0 * k_i[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0 && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if (diff <= 0.0 && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0 && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = c - diff;
            } else if (diff <= 0.0 && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = 2.0 - 2.0 * k_i[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c && alpha[i] > c) {
                alpha[i] = c;
                alpha[j] = sum - c;
            } else if (sum <= c && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c && alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = sum - c;
            } else if (sum <= c && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        const double delta_i = (alpha[i] - old_ai) * sign[i];
        const double delta_j = (alpha[j] - old_aj) * sign[j];
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += sign[t] * (k_i[t] * delta_i + k_j[t] * delta_j);
        }

        if (observer) {
            double dual = 0.0;
            for (std::size_t t = 0; t < n; ++t) dual += alpha[t] * (grad[t] - 1.0);
            observer(iter, 0.5 * dual);
        }
    }
    if (iter >= max_iter) {
        throw ModelError("train_svm_rbf: SMO failed to converge within " +
                         std::to_string(max_iter) + " iterations (gap " +
                         std::to_string(gap) + ")");
    }

    // rho from free support vectors, else the bound midpoint.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = sign[t] * grad[t];
        if (alpha[t] >= c) {
            if (sign[t] < 0.0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (sign[t] > 0.0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);

    SvmModel model;
    model.gamma = config.gamma;
    model.rho = rho;
    model.iterations = iter;
    model.final_gap = gap;

    std::vector<std::size_t> sv_rows;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            sv_rows.push_back(t);
            model.sv_coef.push_back(alpha[t] * sign[t]);
        }
    }
    model.support_vectors = x.select_rows(sv_rows);

    // Platt calibration on the training decision values.
    std::vector<double> decision(n);
    for (std::size_t t = 0; t < n; ++t) {
        decision[t] = model.decision_value(x.row(t));
    }
    std::vector<int> labels(y.begin(), y.end());
    const auto [pa, pb] = fit_platt(decision, labels);
    model.platt_a = pa;
    model.platt_b = pb;
    return model;
}

}  // namespace crashsev
