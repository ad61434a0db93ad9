#ifndef SWARMBO_GP_HPP
#define SWARMBO_GP_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace swarmbo {

/// Raised when the kernel matrix stays indefinite after jitter escalation.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct KernelConfig {
    Scalar rho = Scalar(0.1);       // length-scale, descriptor units
    Scalar noise_var = Scalar(0.01); // observation noise, fitness^2
    Scalar alpha = Scalar(0.9);     // UCB exploration weight

    void validate() const
    {
        if (!(rho > 0) || !(noise_var >= 0) || !(alpha >= 0))
            throw std::invalid_argument("kernel config needs rho > 0, noise_var >= 0, alpha >= 0");
    }
};

/// Matern nu=5/2 as a function of the Euclidean distance, unit signal variance.
template <typename Scalar>
Scalar matern52_distance(Scalar d, Scalar rho)
{
    using std::exp;
    using std::sqrt;
    const Scalar r = sqrt(Scalar(5)) * d / rho;
    return (Scalar(1) + r + r * r / Scalar(3)) * exp(-r);
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar matern52(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                   typename DerivedA::Scalar rho)
{
    return matern52_distance((a - b).norm(), rho);
}

/// Gram matrix of the rows of `x`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> matern52_gram(const Eigen::MatrixBase<Derived>& x,
                                                                                     typename Derived::Scalar rho)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index t = x.rows();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> k(t, t);
    for (Eigen::Index i = 0; i < t; ++i) {
        k(i, i) = Scalar(1);
        for (Eigen::Index j = i + 1; j < t; ++j)
            k(i, j) = k(j, i) = matern52(x.row(i), x.row(j), rho);
    }
    return k;
}

template <typename Scalar>
struct Posterior {
    Scalar mean;
    Scalar variance;

    Scalar stddev() const
    {
        using std::sqrt;
        return sqrt(variance);
    }
};

/// GP over descriptors whose prior mean is an arbitrary function (the map
/// fitness, or a constant). Observations carry individual noise variances,
/// added to the diagonal of the kernel matrix.
///
///   mean(x)     = prior(x) + k^T K^{-1} (f - P)
///   variance(x) = k(x,x) - k^T K^{-1} k
///
/// With no observations the variance is k(x,x) + noise_var.
template <typename Scalar>
class GaussianProcess {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using PriorFn = std::function<Scalar(const Vector&)>;

    GaussianProcess(KernelConfig<Scalar> kernel, PriorFn prior) : kernel_(kernel), prior_(std::move(prior))
    {
        kernel_.validate();
    }

    const KernelConfig<Scalar>& kernel() const { return kernel_; }
    std::size_t size() const { return static_cast<std::size_t>(observations_.size()); }
    Scalar prior(const Vector& x) const { return prior_(x); }
    Scalar jitter() const { return jitter_; }

    const Matrix& samples() const { return samples_; }
    const Vector& observations() const { return observations_; }
    const Vector& priors() const { return priors_; }
    const Vector& noise() const { return noise_; }

    /// Adds an observation with the model's fixed noise variance.
    void add_sample(const Vector& x, Scalar f) { add_sample(x, f, kernel_.noise_var); }

    void add_sample(const Vector& x, Scalar f, Scalar noise)
    {
        if (size() > 0 && x.size() != samples_.cols())
            throw std::invalid_argument("sample dimension mismatch");
        const Eigen::Index t = samples_.rows();
        samples_.conservativeResize(t + 1, x.size());
        samples_.row(t) = x.transpose();
        observations_.conservativeResize(t + 1);
        observations_[t] = f;
        priors_.conservativeResize(t + 1);
        priors_[t] = prior_(x);
        noise_.conservativeResize(t + 1);
        noise_[t] = noise;
        refresh();
    }

    /// Replaces the observation and noise of sample `i`.
    void update_sample(std::size_t i, Scalar f, Scalar noise)
    {
        observations_[static_cast<Eigen::Index>(i)] = f;
        noise_[static_cast<Eigen::Index>(i)] = noise;
        refresh();
    }

    /// Rebuilds the model from parallel arrays (rows of `x`).
    void set_samples(const Matrix& x, const Vector& f, const Vector& noise)
    {
        samples_ = x;
        observations_ = f;
        noise_ = noise;
        priors_.resize(x.rows());
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            priors_[i] = prior_(x.row(i).transpose());
        refresh();
    }

    Posterior<Scalar> posterior(const Vector& x) const
    {
        const Scalar prior = prior_(x);
        if (size() == 0)
            return {prior, Scalar(1) + kernel_.noise_var};
        Vector k(samples_.rows());
        for (Eigen::Index i = 0; i < samples_.rows(); ++i)
            k[i] = matern52(samples_.row(i).transpose(), x, kernel_.rho);
        const Scalar mean = prior + k.dot(alpha_);
        const Vector v = llt_.matrixL().solve(k);
        Scalar var = Scalar(1) - v.squaredNorm();
        if (var < Scalar(0))
            var = Scalar(0);
        return {mean, var};
    }

    void dump(std::ostream& out) const
    {
        out << "# gp rho=" << kernel_.rho << " noise_var=" << kernel_.noise_var << " alpha=" << kernel_.alpha
            << " jitter=" << jitter_ << "\n";
        out << "# x... observation prior noise\n";
        for (Eigen::Index i = 0; i < samples_.rows(); ++i) {
            for (Eigen::Index k = 0; k < samples_.cols(); ++k)
                out << samples_(i, k) << ' ';
            out << observations_[i] << ' ' << priors_[i] << ' ' << noise_[i] << "\n";
        }
    }

private:
    void refresh()
    {
        if (size() == 0)
            return;
        Matrix k = matern52_gram(samples_, kernel_.rho);
        k.diagonal() += noise_;
        jitter_ = Scalar(0);
        llt_.compute(k);
        Scalar jitter = Scalar(1e-10);
        while (llt_.info() != Eigen::Success && jitter <= Scalar(1.0000001e-6)) {
            jitter_ = jitter;
            llt_.compute(k + Matrix::Identity(k.rows(), k.cols()) * jitter);
            jitter *= Scalar(10);
        }
        if (llt_.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Matrix> eig(k, Eigen::EigenvaluesOnly);
            std::ostringstream msg;
            msg << "kernel matrix not positive definite after jitter 1e-6: t=" << k.rows()
                << " min eigenvalue=" << eig.eigenvalues().minCoeff() << " max eigenvalue=" << eig.eigenvalues().maxCoeff();
            throw NumericalFailure(msg.str());
        }
        alpha_ = llt_.solve(Vector(observations_ - priors_));
    }

    KernelConfig<Scalar> kernel_;
    PriorFn prior_;
    Matrix samples_;
    Vector observations_;
    Vector priors_;
    Vector noise_;
    Eigen::LLT<Matrix> llt_;
    Vector alpha_;
    Scalar jitter_ = Scalar(0);
};

template <typename Scalar>
Scalar ucb(const Posterior<Scalar>& p, Scalar alpha)
{
    return p.mean + alpha * p.stddev();
}

/// Index of the highest score; ties go to the lowest id. Empty input means
/// the candidate pool is exhausted.
template <typename Scalar>
std::optional<std::size_t> argmax_lowest_id(const std::vector<std::size_t>& ids, const std::vector<Scalar>& scores)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (!best || scores[i] > scores[*best] || (scores[i] == scores[*best] && ids[i] < ids[*best]))
            best = i;
    return best;
}

/// UCB argmax over candidate points (one per id); returns the position in
/// `ids` of the winner.
template <typename Scalar>
std::optional<std::size_t> ucb_select(const GaussianProcess<Scalar>& gp, const std::vector<std::size_t>& ids,
                                      const std::vector<typename GaussianProcess<Scalar>::Vector>& points, Scalar alpha)
{
    std::vector<Scalar> scores(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        scores[i] = ucb(gp.posterior(points[i]), alpha);
    return argmax_lowest_id(ids, scores);
}

template <typename Scalar>
struct PenalisationState {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Scalar lipschitz = Scalar(1); // L
    Scalar max_value = Scalar(0); // M
    std::vector<Vector> busy;     // descriptors under evaluation
};

/// phi(x, busy) = erfc(-z) / 2 with
///   z = (L |x - busy| - M + mean(x)) / (sqrt(2) sd(x)),
/// the probability that x lies outside the ball around the busy point.
/// Floored at the smallest normal double so the multiplier stays positive.
template <typename Scalar>
Scalar penalty_factor(Scalar distance, const Posterior<Scalar>& at_x, Scalar lipschitz, Scalar max_value)
{
    using std::erfc;
    using std::sqrt;
    const Scalar floor = std::numeric_limits<Scalar>::min();
    const Scalar numerator = lipschitz * distance - max_value + at_x.mean;
    const Scalar sd = at_x.stddev();
    Scalar phi;
    if (sd > Scalar(0))
        phi = Scalar(0.5) * erfc(-numerator / (sqrt(Scalar(2)) * sd));
    else
        phi = numerator > 0 ? Scalar(1) : (numerator < 0 ? Scalar(0) : Scalar(0.5));
    return phi < floor ? floor : (phi > Scalar(1) ? Scalar(1) : phi);
}

/// Product of penalty factors over all busy samples; 1 when none are busy.
template <typename Scalar>
Scalar local_penalty(const PenalisationState<Scalar>& state, const Posterior<Scalar>& at_x,
                     const typename PenalisationState<Scalar>::Vector& x)
{
    Scalar m = Scalar(1);
    for (const auto& b : state.busy)
        m *= penalty_factor((x - b).norm(), at_x, state.lipschitz, state.max_value);
    const Scalar floor = std::numeric_limits<Scalar>::min();
    return m < floor ? floor : m;
}

template <typename Scalar>
Scalar local_penalty(const PenalisationState<Scalar>& state, const GaussianProcess<Scalar>& gp,
                     const typename PenalisationState<Scalar>::Vector& x)
{
    return local_penalty(state, gp.posterior(x), x);
}

} // namespace swarmbo

#endif
