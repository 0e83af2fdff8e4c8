#include "morphcloud/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace morphcloud {

void jacobi_eigen_symmetric(std::vector<double> a, size_t n,
                            std::vector<double>& eigvals, std::vector<double>& eigvecs) {
    std::vector<double> v(n * n, 0.0);
    for (size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    auto off_diag = [&] {
        double s = 0.0;
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) s += a[p * n + q] * a[p * n + q];
        return s;
    };

    double scale = 0.0;
    for (size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::fabs(a[i]));
    const double stop = scale > 0.0 ? scale * scale * 1e-30 : 0.0;

    for (int sweep = 0; sweep < 100 && off_diag() > stop; ++sweep) {
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (std::fabs(apq) <= scale * 1e-300) continue;
                double app = a[p * n + p];
                double aqq = a[q * n + q];
                double theta = (aqq - app) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (size_t k = 0; k < n; ++k) {
                    double akp = a[k * n + p];
                    double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    double apk = a[p * n + k];
                    double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (size_t k = 0; k < n; ++k) {
                    double vkp = v[k * n + p];
                    double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return a[i * n + i] > a[j * n + j]; });

    eigvals.assign(n, 0.0);
    eigvecs.assign(n * n, 0.0);
    for (size_t c = 0; c < n; ++c) {
        eigvals[c] = a[order[c] * n + order[c]];
        for (size_t r = 0; r < n; ++r) eigvecs[r * n + c] = v[r * n + order[c]];
    }
}

bool solve_linear(std::vector<double> a, std::vector<double> b, size_t n,
                  std::vector<double>& x, double tol) {
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (std::fabs(a[piv * n + col]) < tol) return false;
        if (piv != col) {
            for (size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (size_t c = ri + 1; c < n; ++c) s -= a[ri * n + c] * x[c];
        x[ri] = s / a[ri * n + ri];
    }
    return true;
}

} // namespace morphcloud
