#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "qdstat/emitter.hpp"

namespace qdstat::testing {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline EmitterParams emitter(double gamma_mhz, double ratio, double sigma_mhz = 0.0, double xi = 0.0) {
    return EmitterParams::with_rabi_ratio(AngularFrequency::mhz_over_2pi(gamma_mhz), ratio,
                                          AngularFrequency::mhz_over_2pi(sigma_mhz), xi);
}

inline EmitterParams emitter_a() { return emitter(233.0, 0.48); }
inline EmitterParams emitter_b() { return emitter(167.0, 0.34); }

/// Random emitter inside the physically interesting window.
inline EmitterParams random_emitter(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> gamma(50.0, 1000.0);
    std::uniform_real_distribution<double> ratio(0.02, 4.0);
    return emitter(gamma(rng), ratio(rng));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("qdstat_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace qdstat::testing
