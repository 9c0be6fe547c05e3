#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qdstat {

/// Evaluates the model at every abscissa in one call, so models that need the
/// whole grid (IRF convolution) fit the same interface as pointwise ones.
using VectorModel = std::function<std::vector<double>(std::span<const double> params, std::span<const double> x)>;

/// Wraps a pointwise model y = f(params, x).
VectorModel pointwise(std::function<double(std::span<const double> params, double x)> f);

struct Bound {
    double lo;
    double hi;
};

struct FitProblem {
    VectorModel model;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma_y;  ///< empty means unit weights
    std::vector<double> initial;
    std::vector<std::optional<Bound>> bounds;  ///< empty or one entry per parameter
    std::vector<bool> fixed_mask;              ///< empty or one entry per parameter
    std::vector<std::string> names;            ///< optional, used in reports

    /// Throws DomainError when sizes disagree, a sigma is not positive, no
    /// parameter is free, the data do not outnumber free parameters, or an
    /// initial value violates its bound.
    void validate() const;
};

struct FitOptions {
    std::size_t max_iterations = 500;
    double relative_chi2_tolerance = 1e-10;
    double gradient_tolerance = 1e-8;
    double initial_lambda = 1e-3;
    double jacobian_relative_step = 1e-6;
    double jacobian_absolute_step = 1e-12;
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> uncertainties;  ///< zero for fixed parameters
    Eigen::MatrixXd covariance;         ///< free parameters only, scaled by reduced chi2
    std::vector<std::size_t> free_indices;
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::string message;
};

/// Weighted nonlinear least squares with Levenberg-Marquardt damping.
///
/// Minimizes sum(((y - model) / sigma)^2) over the free parameters. The
/// Jacobian comes from central differences, bounds are enforced by projecting
/// each trial step, and fixed parameters never leave their initial value.
/// Data are processed sorted by x, so vector models see an ascending grid and
/// the result does not depend on the input order.
/// Singular normal equations or hitting the iteration cap yield
/// converged = false with an explanatory message; nothing is thrown for those.
FitResult fit(const FitProblem& problem, const FitOptions& options = {});

}  // namespace qdstat
