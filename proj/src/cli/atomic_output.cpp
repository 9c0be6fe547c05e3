#include "qdstat/cli/atomic_output.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace qdstat::cli {

void AtomicOutput::add(std::string filename, std::string contents) {
    files_.emplace_back(std::move(filename), std::move(contents));
}

std::vector<std::filesystem::path> AtomicOutput::commit() const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + directory_.string() + "': " + ec.message());

    const std::string suffix = ".tmp" + std::to_string(::getpid());
    std::vector<fs::path> temps;
    std::vector<fs::path> finals;
    auto cleanup = [&] {
        for (const auto& t : temps) fs::remove(t, ec);
    };
    for (const auto& [name, contents] : files_) {
        const fs::path final_path = directory_ / name;
        const fs::path temp_path = directory_ / (name + suffix);
        temps.push_back(temp_path);
        std::ofstream out(temp_path, std::ios::binary | std::ios::trunc);
        out << contents;
        out.close();
        if (!out) {
            cleanup();
            throw std::runtime_error("cannot write '" + temp_path.string() + "'");
        }
        finals.push_back(final_path);
    }
    for (std::size_t i = 0; i < temps.size(); ++i) {
        fs::rename(temps[i], finals[i], ec);
        if (ec) {
            cleanup();
            throw std::runtime_error("cannot publish '" + finals[i].string() + "': " + ec.message());
        }
    }
    return finals;
}

}  // namespace qdstat::cli
