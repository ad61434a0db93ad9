#ifndef SWARMBO_TEST_GP_ORACLE_HPP
#define SWARMBO_TEST_GP_ORACLE_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace swarmbo::test {

using Real = long double;
using Point = std::vector<Real>;

/// Matern 5/2 written out directly, independent of the production template.
inline Real oracle_kernel(const Point& a, const Point& b, Real rho)
{
    Real s = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += (a[k] - b[k]) * (a[k] - b[k]);
    const Real r = std::sqrt(5.0L * s) / rho;
    return (1.0L + r + r * r / 3.0L) * std::exp(-r);
}

/// Explicit inverse by Gauss-Jordan elimination with partial pivoting.
inline std::vector<std::vector<Real>> oracle_inverse(std::vector<std::vector<Real>> a)
{
    const std::size_t n = a.size();
    std::vector<std::vector<Real>> inv(n, std::vector<Real>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        inv[i][i] = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col]))
                pivot = r;
        if (a[pivot][col] == 0)
            throw std::runtime_error("singular");
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        const Real p = a[col][col];
        for (std::size_t k = 0; k < n; ++k) {
            a[col][k] /= p;
            inv[col][k] /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0)
                continue;
            const Real f = a[r][col];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[col][k];
                inv[r][k] -= f * inv[col][k];
            }
        }
    }
    return inv;
}

struct OraclePosterior {
    Real mean;
    Real variance;
};

/// mean = P(x) + k^T K^-1 (f - P), variance = 1 - k^T K^-1 k, K with noise on
/// the diagonal; t = 0 gives (P(x), 1 + noise_var).
inline OraclePosterior oracle_posterior(const std::vector<Point>& xs, const std::vector<Real>& f,
                                        const std::vector<Real>& priors, const std::vector<Real>& noise, Real rho,
                                        const Point& x, Real prior_x, Real noise_var)
{
    const std::size_t t = xs.size();
    if (t == 0)
        return {prior_x, 1.0L + noise_var};
    std::vector<std::vector<Real>> k(t, std::vector<Real>(t));
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j)
            k[i][j] = oracle_kernel(xs[i], xs[j], rho) + (i == j ? noise[i] : 0.0L);
    const auto inv = oracle_inverse(k);
    std::vector<Real> kx(t);
    for (std::size_t i = 0; i < t; ++i)
        kx[i] = oracle_kernel(xs[i], x, rho);
    Real mean = prior_x, quad = 0;
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < t; ++j) {
            mean += kx[i] * inv[i][j] * (f[j] - priors[j]);
            quad += kx[i] * inv[i][j] * kx[j];
        }
    return {mean, 1.0L - quad};
}

} // namespace swarmbo::test

#endif
