#pragma once

#include <cstddef>
#include <span>

// Vector arithmetic kernels backing the embedding / diversity / gradient
// math. Scalar reference implementations are always available; on x86-64
// an AVX2+FMA variant and on aarch64 a NEON variant are selected at
// runtime. The two paths are equivalence-tested against each other
// (tolerance-based: lane-parallel accumulation reorders the sums).
namespace fcarena::kernels {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double*, const double*, double, std::size_t);
using ScaleFn = void (*)(double*, double, std::size_t);
using SumFn = double (*)(const double*, std::size_t);

struct Backend {
    const char* name;
    DotFn dot;
    AxpyFn axpy;
    ScaleFn scale;
    SumFn sum;
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double* y, const double* x, double a, std::size_t n);  // y += a*x
void scale(double* a, double s, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace scalar

const Backend& scalar_backend();
// Best backend supported by the running CPU, resolved once.
const Backend& active_backend();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active_backend().dot(a.data(), b.data(), a.size());
}
inline void axpy(std::span<double> y, std::span<const double> x, double a) {
    active_backend().axpy(y.data(), x.data(), a, y.size());
}
inline void scale(std::span<double> a, double s) {
    active_backend().scale(a.data(), s, a.size());
}
inline double sum(std::span<const double> a) {
    return active_backend().sum(a.data(), a.size());
}

}  // namespace fcarena::kernels
