#pragma once

#include <cmath>
#include <cstddef>

// Row-major dense kernels shared by the tape and the inference path. Each
// output element is accumulated in a fixed order that does not depend on the
// number of rows, so a sample gives bitwise the same result alone or in a
// batch.
namespace irfad::kernels {

// out[n x m] = a[n x k] * b[k x m]
inline void matmul(const double* a, const double* b, double* out, std::size_t n, std::size_t k,
                   std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        double* row = out + i * m;
        for (std::size_t j = 0; j < m; ++j) row[j] = 0.0;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            const double* brow = b + p * m;
            for (std::size_t j = 0; j < m; ++j) row[j] += av * brow[j];
        }
    }
}

// da[n x k] += dout[n x m] * b^T   (b is k x m)
inline void matmul_grad_a(const double* dout, const double* b, double* da, std::size_t n,
                          std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* grow = dout + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double* brow = b + p * m;
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += grow[j] * brow[j];
            da[i * k + p] += acc;
        }
    }
}

// db[k x m] += a^T * dout   (a is n x k)
inline void matmul_grad_b(const double* a, const double* dout, double* db, std::size_t n,
                          std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* grow = dout + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            double* drow = db + p * m;
            for (std::size_t j = 0; j < m; ++j) drow[j] += av * grow[j];
        }
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double silu(double x) { return x * sigmoid(x); }

inline double silu_grad(double x) {
    const double s = sigmoid(x);
    return s * (1.0 + x * (1.0 - s));
}

} // namespace irfad::kernels
