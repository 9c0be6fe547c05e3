#include "qdstat/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "qdstat/error.hpp"

namespace qdstat {
namespace {

constexpr std::array<std::pair<CurveKind, std::string_view>, 7> kKindNames{{
    {CurveKind::G1Raw, "G1_raw"},
    {CurveKind::G1Normalized, "g1_normalized"},
    {CurveKind::G2, "g2"},
    {CurveKind::G2Cross, "g2_cross"},
    {CurveKind::G2Parallel, "g2_parallel"},
    {CurveKind::Visibility, "visibility"},
    {CurveKind::IntensityDecay, "intensity_decay"},
}};

bool is_g2_family(CurveKind kind) {
    return kind == CurveKind::G2 || kind == CurveKind::G2Cross || kind == CurveKind::G2Parallel;
}

void validate_values(const std::vector<double>& values, CurveKind kind) {
    if (values.empty()) {
        throw GridError("curve: no samples");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v)) {
            throw NumericalError("curve: non-finite sample at index " + std::to_string(i));
        }
        if (is_g2_family(kind) && v < 0.0) {
            throw DomainError("curve: negative " + std::string(to_string(kind)) + " sample at index " +
                              std::to_string(i));
        }
        // Tolerate rounding at the normalization point.
        if (kind == CurveKind::G1Normalized && (v < 0.0 || v > 1.0 + 1e-12)) {
            throw DomainError("curve: |g1| sample outside [0, 1] at index " + std::to_string(i));
        }
    }
}

// Shortest representation that round-trips a double.
std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::string_view to_string(CurveKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

CurveKind curve_kind_from_string(std::string_view tag) {
    for (const auto& [k, name] : kKindNames) {
        if (name == tag) return k;
    }
    throw DomainError("curve: unknown kind '" + std::string(tag) + "'");
}

TauGrid TauGrid::from_start(double start, double step, std::size_t size) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw GridError("grid: step must be positive");
    }
    if (size == 0) {
        throw GridError("grid: empty");
    }
    return TauGrid{start, step, size};
}

TauGrid TauGrid::non_negative(double tau_max, double step) {
    if (!(tau_max >= 0.0)) throw GridError("grid: tau_max must be non-negative");
    if (!(step > 0.0)) throw GridError("grid: step must be positive");
    const auto n = static_cast<std::size_t>(std::floor(tau_max / step + 1e-9));
    return from_start(0.0, step, n + 1);
}

TauGrid TauGrid::symmetric(double tau_max, double step) {
    if (!(tau_max >= 0.0)) throw GridError("grid: tau_max must be non-negative");
    if (!(step > 0.0)) throw GridError("grid: step must be positive");
    const auto half = static_cast<std::size_t>(std::floor(tau_max / step + 1e-9));
    return from_start(-static_cast<double>(half) * step, step, 2 * half + 1);
}

std::vector<double> TauGrid::taus() const {
    std::vector<double> out(size);
    for (std::size_t i = 0; i < size; ++i) out[i] = at(i);
    // Mirror the upper half so that tau(-k) == -tau(k) holds bitwise.
    if (size > 1 && is_symmetric()) {
        for (std::size_t i = 0; i < size / 2; ++i) out[i] = -out[size - 1 - i];
        if (size % 2 == 1) out[size / 2] = 0.0;
    }
    return out;
}

bool TauGrid::is_symmetric() const {
    const double end = at(size - 1);
    return std::abs(start + end) <= 1e-9 * step;
}

std::size_t TauGrid::index_of_zero() const {
    const double idx = std::round(-start / step);
    if (idx < 0.0) return 0;
    return std::min(static_cast<std::size_t>(idx), size - 1);
}

bool TauGrid::same_as(const TauGrid& other) const {
    return size == other.size && std::abs(step - other.step) <= 1e-12 * step &&
           std::abs(start - other.start) <= 1e-9 * step;
}

CorrelationCurve::CorrelationCurve(double tau_start, double tau_step, std::vector<double> values,
                                   CurveKind kind)
    : tau_start_(tau_start), tau_step_(tau_step), values_(std::move(values)), kind_(kind) {
    if (!(tau_step_ > 0.0) || !std::isfinite(tau_step_)) {
        throw GridError("curve: tau_step must be positive");
    }
    if (!std::isfinite(tau_start_)) {
        throw GridError("curve: tau_start must be finite");
    }
    validate_values(values_, kind_);
}

CorrelationCurve::CorrelationCurve(const TauGrid& grid, std::vector<double> values, CurveKind kind)
    : CorrelationCurve(grid.start, grid.step, std::move(values), kind) {
    if (values_.size() != grid.size) {
        throw GridError("curve: " + std::to_string(values_.size()) + " values for a grid of " +
                        std::to_string(grid.size));
    }
}

CorrelationCurve CorrelationCurve::sample(const TauGrid& grid, const std::function<double(double)>& fn,
                                          CurveKind kind) {
    const std::vector<double> taus = grid.taus();
    std::vector<double> values(grid.size);
    for (std::size_t i = 0; i < grid.size; ++i) values[i] = fn(taus[i]);
    return CorrelationCurve(grid, std::move(values), kind);
}

double CorrelationCurve::at_zero() const {
    const TauGrid g = grid();
    const std::size_t i = g.index_of_zero();
    if (std::abs(g.at(i)) > 1e-9 * tau_step_) {
        throw GridError("curve: grid does not contain tau = 0");
    }
    return values_[i];
}

CorrelationCurve CorrelationCurve::relabel(CurveKind kind) const {
    return CorrelationCurve(tau_start_, tau_step_, values_, kind);
}

void require_same_grid(const CorrelationCurve& a, const CorrelationCurve& b, std::string_view what) {
    if (!a.grid().same_as(b.grid())) {
        throw GridError(std::string(what) + ": curves are sampled on different grids");
    }
}

CorrelationCurve symmetrize(const CorrelationCurve& curve) {
    if (!curve.grid().is_symmetric()) {
        throw GridError("symmetrize: grid is not symmetric about zero");
    }
    const std::size_t n = curve.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (curve[i] + curve[n - 1 - i]);
    return CorrelationCurve(curve.tau_start(), curve.tau_step(), std::move(out), curve.kind());
}

void write_csv(std::ostream& out, const CorrelationCurve& curve, const std::vector<ExtraColumn>& extra) {
    for (const auto& col : extra) {
        if (col.values.size() != curve.size()) {
            throw GridError("csv: column '" + col.name + "' has the wrong length");
        }
    }
    out << "tau_s,value";
    for (const auto& col : extra) out << ',' << col.name;
    out << '\n';
    const std::vector<double> taus = curve.grid().taus();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << format_double(taus[i]) << ',' << format_double(curve[i]);
        for (const auto& col : extra) out << ',' << format_double(col.values[i]);
        out << '\n';
    }
}

CorrelationCurve read_csv(std::istream& in, CurveKind kind) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("tau_s,value", 0) != 0) {
        throw GridError("csv: missing 'tau_s,value' header");
    }
    std::vector<double> taus;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a;
        std::string b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',')) {
            throw GridError("csv: malformed row '" + line + "'");
        }
        taus.push_back(std::stod(a));
        values.push_back(std::stod(b));
    }
    if (taus.size() < 2) {
        throw GridError("csv: need at least two rows to infer the grid");
    }
    const double step = (taus.back() - taus.front()) / static_cast<double>(taus.size() - 1);
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (std::abs(taus[i] - (taus.front() + step * static_cast<double>(i))) > 1e-6 * step) {
            throw GridError("csv: delays are not uniformly spaced");
        }
    }
    return CorrelationCurve(taus.front(), step, std::move(values), kind);
}

nlohmann::json to_json(const CorrelationCurve& curve) {
    return nlohmann::json{{"tau_start", curve.tau_start()},
                          {"tau_step", curve.tau_step()},
                          {"kind", std::string(to_string(curve.kind()))},
                          {"values", curve.values()}};
}

CorrelationCurve curve_from_json(const nlohmann::json& j) {
    try {
        return CorrelationCurve(j.at("tau_start").get<double>(), j.at("tau_step").get<double>(),
                                j.at("values").get<std::vector<double>>(),
                                curve_kind_from_string(j.at("kind").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw GridError(std::string("curve json: ") + e.what());
    }
}

}  // namespace qdstat
