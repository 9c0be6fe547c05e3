#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdstat/fit.hpp"

namespace qdstat {

/// A named model ready for fit(): parameter names, default bounds and a
/// data-driven starting point where one is cheap to compute.
struct ModelSpec {
    std::string name;
    std::vector<std::string> params;
    VectorModel model;
    std::vector<std::optional<Bound>> bounds;
    /// Initial guess from (x, y); empty when the model has no heuristic.
    std::function<std::vector<double>(std::span<const double> x, std::span<const double> y)> guess;

    std::size_t index_of(const std::string& param) const;
};

/// x: frequency (MHz). Params: center, fwhm, amplitude, offset.
ModelSpec lorentzian_model();
/// x: frequency (MHz). Params: center, sigma, amplitude, offset.
ModelSpec gaussian_model();
/// x: frequency (MHz). Params: center, lorentz_fwhm, gauss_sigma, amplitude, offset.
ModelSpec voigt_model();
/// x: power. Params: i_inf, p_sat.
ModelSpec saturation_model();
/// x: Rabi frequency Omega/2pi (MHz), y: linewidth (MHz). Params: gamma_mhz_over_2pi, b_mhz.
ModelSpec power_broadening_model();
/// x: time (ns, uniform). Params: amp_fast, gamma_fast, amp_slow, gamma_slow,
/// fss_ghz, beat_visibility, beat_phase, t0_ns. The IRF is a fixed setting.
ModelSpec decay_model(double irf_fwhm_ns);
/// x: delay (ns, uniform and symmetric). Params: gamma_per_ns,
/// omega_over_gamma, impurity, bunching_amplitude, bunching_timescale_ns.
ModelSpec g2_model(double irf_fwhm_ps);

/// Looks a model up by CLI name. `irf_setting` is the IRF FWHM, in ns for
/// decay and in ps for g2; other models ignore it. Throws DomainError for an
/// unknown name.
ModelSpec model_by_name(const std::string& name, double irf_setting);

std::vector<std::string> model_names();

}  // namespace qdstat
