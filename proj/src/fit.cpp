#include "qdstat/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "qdstat/error.hpp"

namespace qdstat {
namespace {

constexpr double kMaxLambda = 1e16;

struct Evaluation {
    Eigen::VectorXd residual;  // (y - model) / sigma
    double chi2;
};

class Objective {
public:
    explicit Objective(const FitProblem& problem) : problem_(problem) {
        const std::size_t n = problem.x.size();
        inv_sigma_.resize(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            inv_sigma_[static_cast<Eigen::Index>(i)] = problem.sigma_y.empty() ? 1.0 : 1.0 / problem.sigma_y[i];
        }
    }

    std::vector<double> model(const std::vector<double>& params) const {
        std::vector<double> out = problem_.model(params, problem_.x);
        if (out.size() != problem_.x.size()) {
            throw DomainError("fit: model returned " + std::to_string(out.size()) + " values for " +
                              std::to_string(problem_.x.size()) + " points");
        }
        return out;
    }

    Evaluation evaluate(const std::vector<double>& params) const {
        const std::vector<double> f = model(params);
        const auto n = static_cast<Eigen::Index>(f.size());
        Evaluation e{Eigen::VectorXd(n), 0.0};
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            e.residual[i] = (problem_.y[k] - f[k]) * inv_sigma_[i];
        }
        e.chi2 = e.residual.squaredNorm();
        if (!std::isfinite(e.chi2)) e.chi2 = std::numeric_limits<double>::infinity();
        return e;
    }

    // chi2 = inf when the model cannot be evaluated at these parameters.
    Evaluation try_evaluate(const std::vector<double>& params) const {
        try {
            return evaluate(params);
        } catch (const Error&) {
            return Evaluation{Eigen::VectorXd(), std::numeric_limits<double>::infinity()};
        }
    }

    // Weighted Jacobian d(model)/d(param) / sigma for the free parameters.
    Eigen::MatrixXd jacobian(const std::vector<double>& params, const std::vector<std::size_t>& free,
                             const FitOptions& opt) const {
        const auto n = static_cast<Eigen::Index>(problem_.x.size());
        Eigen::MatrixXd j(n, static_cast<Eigen::Index>(free.size()));
        for (std::size_t c = 0; c < free.size(); ++c) {
            const std::size_t k = free[c];
            const double h = std::max(opt.jacobian_relative_step * std::abs(params[k]), opt.jacobian_absolute_step);
            double up = params[k] + h;
            double down = params[k] - h;
            if (!problem_.bounds.empty() && problem_.bounds[k]) {
                up = std::min(up, problem_.bounds[k]->hi);
                down = std::max(down, problem_.bounds[k]->lo);
            }
            std::vector<double> p_up = params;
            std::vector<double> p_down = params;
            p_up[k] = up;
            p_down[k] = down;
            const std::vector<double> f_up = model(p_up);
            const std::vector<double> f_down = model(p_down);
            const double width = up - down;
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto r = static_cast<std::size_t>(i);
                j(i, static_cast<Eigen::Index>(c)) = (f_up[r] - f_down[r]) / width * inv_sigma_[i];
            }
        }
        return j;
    }

    void project(std::vector<double>& params) const {
        if (problem_.bounds.empty()) return;
        for (std::size_t k = 0; k < params.size(); ++k) {
            if (problem_.bounds[k]) params[k] = std::clamp(params[k], problem_.bounds[k]->lo, problem_.bounds[k]->hi);
        }
    }

private:
    const FitProblem& problem_;
    Eigen::VectorXd inv_sigma_;
};

}  // namespace

VectorModel pointwise(std::function<double(std::span<const double> params, double x)> f) {
    return [f = std::move(f)](std::span<const double> params, std::span<const double> x) {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(params, x[i]);
        return out;
    };
}

void FitProblem::validate() const {
    const std::size_t m = initial.size();
    if (!model) throw DomainError("fit: no model");
    if (m == 0) throw DomainError("fit: no parameters");
    if (y.size() != x.size()) throw DomainError("fit: x and y lengths differ");
    if (!sigma_y.empty() && sigma_y.size() != x.size()) throw DomainError("fit: sigma_y length differs from data");
    for (double s : sigma_y) {
        if (!(s > 0.0)) throw DomainError("fit: sigma_y must be positive");
    }
    if (!bounds.empty() && bounds.size() != m) throw DomainError("fit: one bound entry per parameter");
    if (!fixed_mask.empty() && fixed_mask.size() != m) throw DomainError("fit: one fixed flag per parameter");
    if (!names.empty() && names.size() != m) throw DomainError("fit: one name per parameter");
    std::size_t n_free = 0;
    for (std::size_t k = 0; k < m; ++k) {
        if (fixed_mask.empty() || !fixed_mask[k]) ++n_free;
        if (!bounds.empty() && bounds[k]) {
            const Bound& b = *bounds[k];
            if (!(b.lo <= b.hi)) throw DomainError("fit: bound with lo > hi");
            if (initial[k] < b.lo || initial[k] > b.hi) throw DomainError("fit: initial value outside its bound");
        }
    }
    if (n_free == 0) throw DomainError("fit: every parameter is fixed");
    if (x.size() <= n_free) throw DomainError("fit: need more data points than free parameters");
}

namespace {

// Data sorted by (x, y, sigma): the fit then does not depend on the order in
// which points were supplied, down to the last bit.
FitProblem canonical_order(const FitProblem& problem) {
    const std::size_t n = problem.x.size();
    auto sigma = [&](std::size_t i) { return problem.sigma_y.empty() ? 1.0 : problem.sigma_y[i]; };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tuple(problem.x[a], problem.y[a], sigma(a)) < std::tuple(problem.x[b], problem.y[b], sigma(b));
    });
    FitProblem out = problem;
    for (std::size_t i = 0; i < n; ++i) {
        out.x[i] = problem.x[order[i]];
        out.y[i] = problem.y[order[i]];
        if (!problem.sigma_y.empty()) out.sigma_y[i] = problem.sigma_y[order[i]];
    }
    return out;
}

}  // namespace

FitResult fit(const FitProblem& input, const FitOptions& options) {
    input.validate();
    const FitProblem problem = canonical_order(input);
    const Objective objective(problem);

    FitResult result;
    result.params = problem.initial;
    for (std::size_t k = 0; k < problem.initial.size(); ++k) {
        if (problem.fixed_mask.empty() || !problem.fixed_mask[k]) result.free_indices.push_back(k);
    }
    const std::vector<std::size_t>& free = result.free_indices;
    const auto m = static_cast<Eigen::Index>(free.size());
    const double dof = static_cast<double>(problem.x.size() - free.size());

    Evaluation current = objective.evaluate(result.params);
    if (!std::isfinite(current.chi2)) throw NumericalError("fit: model is not finite at the initial parameters");

    double lambda = options.initial_lambda;
    bool need_jacobian = true;
    Eigen::MatrixXd j;
    Eigen::MatrixXd normal;
    Eigen::VectorXd gradient;
    std::string message = "maximum iterations reached";

    std::size_t iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (current.chi2 == 0.0) {
            result.converged = true;
            message = "exact fit";
            break;
        }
        if (need_jacobian) {
            j = objective.jacobian(result.params, free, options);
            normal = j.transpose() * j;
            gradient = j.transpose() * current.residual;
            need_jacobian = false;
        }
        if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            result.converged = true;
            message = "gradient below tolerance";
            break;
        }

        Eigen::MatrixXd damped = normal;
        for (Eigen::Index d = 0; d < m; ++d) damped(d, d) += lambda * std::max(normal(d, d), 1e-300);
        const Eigen::VectorXd step = damped.ldlt().solve(gradient);
        if (!step.allFinite()) {
            result.converged = false;
            message = "singular normal equations";
            break;
        }

        std::vector<double> trial = result.params;
        for (Eigen::Index d = 0; d < m; ++d) trial[free[static_cast<std::size_t>(d)]] += step[d];
        objective.project(trial);
        Evaluation next = objective.try_evaluate(trial);

        if (next.chi2 < current.chi2) {
            const double decrease = (current.chi2 - next.chi2) / current.chi2;
            result.params = std::move(trial);
            current = std::move(next);
            need_jacobian = true;
            lambda = std::max(lambda / 10.0, 1e-300);
            if (decrease < options.relative_chi2_tolerance) {
                result.converged = true;
                message = "relative chi2 decrease below tolerance";
                ++iter;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > kMaxLambda) {
                // No downhill step exists at any damping: a (projected) minimum.
                result.converged = true;
                message = "no further decrease at maximal damping";
                break;
            }
        }
    }
    result.iterations = iter;
    result.chi2 = current.chi2;
    result.reduced_chi2 = current.chi2 / dof;

    // Curvature at the final point.
    j = objective.jacobian(result.params, free, options);
    normal = j.transpose() * j;
    // Work in correlation form so parameters of very different scale do not
    // fool the rank test.
    const Eigen::VectorXd diag = normal.diagonal();
    result.uncertainties.assign(result.params.size(), 0.0);
    bool singular = (diag.array() <= 0.0).any() || !normal.allFinite();
    Eigen::MatrixXd inverse;
    if (!singular) {
        const Eigen::VectorXd inv_sqrt = diag.array().sqrt().inverse();
        const Eigen::MatrixXd corr = inv_sqrt.asDiagonal() * normal * inv_sqrt.asDiagonal();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(corr);
        lu.setThreshold(1e-12);
        singular = lu.rank() < m;
        if (!singular) inverse = inv_sqrt.asDiagonal() * lu.inverse() * inv_sqrt.asDiagonal();
    }
    if (singular) {
        result.converged = false;
        message = "singular normal equations (parameters not identifiable)";
        result.covariance = Eigen::MatrixXd::Constant(m, m, std::numeric_limits<double>::quiet_NaN());
    } else {
        Eigen::MatrixXd cov = inverse * result.reduced_chi2;
        cov = 0.5 * (cov + cov.transpose());
        result.covariance = cov;
        for (Eigen::Index d = 0; d < m; ++d) {
            result.uncertainties[free[static_cast<std::size_t>(d)]] = std::sqrt(std::max(0.0, cov(d, d)));
        }
    }
    result.message = message;
    return result;
}

}  // namespace qdstat
