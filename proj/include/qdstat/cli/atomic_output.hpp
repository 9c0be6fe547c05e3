#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qdstat::cli {

/// Collects output files in memory and publishes them together.
///
/// commit() writes every file to a temporary sibling and renames it into
/// place only after all writes succeeded, so a failing command leaves the
/// output directory untouched.
class AtomicOutput {
public:
    explicit AtomicOutput(std::filesystem::path directory) : directory_(std::move(directory)) {}

    void add(std::string filename, std::string contents);
    const std::vector<std::pair<std::string, std::string>>& pending() const { return files_; }

    /// Returns the final paths. Throws std::runtime_error on I/O failure after
    /// removing any temporary files it created.
    std::vector<std::filesystem::path> commit() const;

private:
    std::filesystem::path directory_;
    std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace qdstat::cli
