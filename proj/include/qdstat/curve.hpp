#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qdstat {

enum class CurveKind {
    G1Raw,
    G1Normalized,
    G2,
    G2Cross,
    G2Parallel,
    Visibility,
    IntensityDecay,
};

std::string_view to_string(CurveKind kind);
/// Throws DomainError for an unknown tag.
CurveKind curve_kind_from_string(std::string_view tag);

/// Uniform delay grid tau_i = start + i * step, in seconds.
struct TauGrid {
    double start = 0.0;
    double step = 1.0;
    std::size_t size = 0;

    /// Throws GridError unless step > 0 and size > 0.
    static TauGrid from_start(double start, double step, std::size_t size);
    /// Grid [0, tau_max] with the given step; tau_max is rounded down to a whole step.
    static TauGrid non_negative(double tau_max, double step);
    /// Grid [-tau_max, tau_max] with an odd number of points and tau = 0 at the centre.
    static TauGrid symmetric(double tau_max, double step);

    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
    std::vector<double> taus() const;
    /// True when the grid is symmetric about zero to within 1e-9 of a step.
    bool is_symmetric() const;
    /// Index of the point closest to tau = 0.
    std::size_t index_of_zero() const;
    bool same_as(const TauGrid& other) const;
};

/// Sampled correlation curve on a uniform delay grid.
///
/// Construction validates the invariants of the kind: values non-empty,
/// g2-family values >= 0, normalized g1 magnitudes in [0, 1].
class CorrelationCurve {
public:
    CorrelationCurve(double tau_start, double tau_step, std::vector<double> values, CurveKind kind);
    CorrelationCurve(const TauGrid& grid, std::vector<double> values, CurveKind kind);

    /// Samples `fn` on the grid.
    static CorrelationCurve sample(const TauGrid& grid, const std::function<double(double)>& fn,
                                   CurveKind kind);

    double tau_start() const { return tau_start_; }
    double tau_step() const { return tau_step_; }
    std::size_t size() const { return values_.size(); }
    CurveKind kind() const { return kind_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double tau(std::size_t i) const { return tau_start_ + static_cast<double>(i) * tau_step_; }
    TauGrid grid() const { return TauGrid{tau_start_, tau_step_, values_.size()}; }

    /// Value at tau = 0; throws GridError if the grid does not contain zero.
    double at_zero() const;

    /// Same grid and values, different tag (re-validated).
    CorrelationCurve relabel(CurveKind kind) const;

private:
    double tau_start_;
    double tau_step_;
    std::vector<double> values_;
    CurveKind kind_;
};

/// Throws GridError unless both curves share the same grid.
void require_same_grid(const CorrelationCurve& a, const CorrelationCurve& b, std::string_view what);

/// Even part (c(tau) + c(-tau)) / 2 of a curve on a symmetric grid.
CorrelationCurve symmetrize(const CorrelationCurve& curve);

/// CSV with header `tau_s,value`. Extra columns are appended after `value`
/// and must have the same length as the curve.
struct ExtraColumn {
    std::string name;
    std::vector<double> values;
};
void write_csv(std::ostream& out, const CorrelationCurve& curve,
               const std::vector<ExtraColumn>& extra = {});
CorrelationCurve read_csv(std::istream& in, CurveKind kind);

/// JSON object {tau_start, tau_step, kind, values}.
nlohmann::json to_json(const CorrelationCurve& curve);
CorrelationCurve curve_from_json(const nlohmann::json& j);

}  // namespace qdstat
