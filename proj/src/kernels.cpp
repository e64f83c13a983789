#include "fcarena/kernels.hpp"

namespace fcarena::kernels {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double*, const double*, std::size_t);
void axpy(double*, const double*, double, std::size_t);
void scale(double*, double, std::size_t);
double sum(const double*, std::size_t);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double*, const double*, std::size_t);
void axpy(double*, const double*, double, std::size_t);
void scale(double*, double, std::size_t);
double sum(const double*, std::size_t);
}  // namespace neon
#endif

const Backend& scalar_backend() {
    static const Backend backend{"scalar", scalar::dot, scalar::axpy, scalar::scale,
                                 scalar::sum};
    return backend;
}

namespace {

const Backend& resolve() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        static const Backend backend{"avx2", avx2::dot, avx2::axpy, avx2::scale,
                                     avx2::sum};
        return backend;
    }
#endif
#if defined(__aarch64__)
    static const Backend backend{"neon", neon::dot, neon::axpy, neon::scale,
                                 neon::sum};
    return backend;
#else
    return scalar_backend();
#endif
}

}  // namespace

const Backend& active_backend() {
    static const Backend& backend = resolve();
    return backend;
}

}  // namespace fcarena::kernels
