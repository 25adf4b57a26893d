#include "crashsev/kernels.hpp"

#include <cassert>
#include <cstdlib>

namespace crashsev::kernels {

namespace scalar {

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
    assert(a.size() == b.size() && a.size() == w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i] * w[i];
    return acc;
}

double sum(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += v;
    return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace scalar

#if defined(CRASHSEV_WITH_AVX2)
namespace avx2 {
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w);
double sum(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool supported();
}  // namespace avx2
#endif

namespace {

struct Backend {
    double (*dot)(std::span<const double>, std::span<const double>);
    double (*squared_distance)(std::span<const double>, std::span<const double>);
    double (*weighted_dot)(std::span<const double>, std::span<const double>,
                           std::span<const double>);
    double (*sum)(std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
    std::string name;
};

Backend resolve() {
    // CRASHSEV_KERNELS=scalar forces the reference path (debugging, benchmarks).
    const char* force = std::getenv("CRASHSEV_KERNELS");
    const bool want_scalar = force != nullptr && std::string(force) == "scalar";
#if defined(CRASHSEV_WITH_AVX2)
    if (!want_scalar && avx2::supported()) {
        return {avx2::dot, avx2::squared_distance, avx2::weighted_dot, avx2::sum,
                avx2::axpy, "avx2"};
    }
#else
    (void)want_scalar;
#endif
    return {scalar::dot, scalar::squared_distance, scalar::weighted_dot, scalar::sum,
            scalar::axpy, "scalar"};
}

const Backend& backend() {
    static const Backend b = resolve();
    return b;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    return backend().dot(a, b);
}
double squared_distance(std::span<const double> a, std::span<const double> b) {
    return backend().squared_distance(a, b);
}
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
    return backend().weighted_dot(a, b, w);
}
double sum(std::span<const double> a) { return backend().sum(a); }
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    backend().axpy(alpha, x, y);
}

const std::string& active_backend() { return backend().name; }

}  // namespace crashsev::kernels
