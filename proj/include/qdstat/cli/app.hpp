#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdstat::cli {

enum ExitCode : int {
    kSuccess = 0,
    kConfigError = 2,
    kNumericalFailure = 3,
};

/// Entry point of the `qdstat` command line. Subcommands: g1, g2, hom,
/// fit <model>, yield-map, irf-sweep. Global flags: --config, --out, --seed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qdstat::cli
