#pragma once

#include <array>
#include <complex>
#include <optional>

#include "qdstat/curve.hpp"
#include "qdstat/emitter.hpp"

namespace qdstat {

/// 2x2 density-matrix-shaped operator in the {|e>, |g>} basis, row-major:
/// {ee, eg, ge, gg}.
using Operator2 = std::array<std::complex<double>, 4>;

struct BlochOptions {
    /// Integration step; defaults to the largest stable choice
    /// (1/200) * min(1/gamma, 1/Omega). A larger value is rejected.
    std::optional<double> step;
    /// Steady state is declared once max |d rho / dt| * (1/gamma) drops below this.
    double settle_tolerance = 1e-13;
    /// Give up after this many decay times.
    double max_settle_time_in_lifetimes = 400.0;
};

struct BlochSteadyState {
    Operator2 rho;
    double excited_population;
    double settle_time;  ///< seconds of integration needed
    std::size_t steps;
};

/// Integrates the resonant optical Bloch equations from the ground state
/// until the residual drift vanishes. Fixed-step RK4.
/// Throws NumericalError when the requested step is too large or the state
/// does not settle.
BlochSteadyState bloch_steady_state(const EmitterParams& params, const BlochOptions& options = {});

struct BlochCorrelations {
    BlochSteadyState steady;
    CorrelationCurve g1;  ///< normalized, magnitudes
    CorrelationCurve g2;  ///< normalized by population^2
};

/// Quantum-regression evaluation of g1 and g2 on a grid of non-negative
/// delays. Independent of the closed forms in tls.hpp; used to verify them.
/// Throws DomainError when the grid has negative delays or the drive is zero
/// (the normalized correlations are undefined without emission).
BlochCorrelations bloch_oracle(const EmitterParams& params, const TauGrid& grid,
                               const BlochOptions& options = {});

/// Right-hand side of the Lindblad equation for the driven two-level system
/// applied to an arbitrary operator (the regression theorem propagates
/// non-Hermitian operators with the same generator).
Operator2 lindblad_rhs(const EmitterParams& params, const Operator2& x);

}  // namespace qdstat
