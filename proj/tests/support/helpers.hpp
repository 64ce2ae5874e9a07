#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "hwdse/design_space.hpp"

namespace testutil {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(HWDSE_FIXTURE_DIR) / name;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("hwdse_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Grid with `levels` evenly spaced values 0..levels-1 in each of `dims` parameters.
inline hwdse::DesignSpace grid_space(std::size_t dims, std::size_t levels,
                                     std::vector<hwdse::ObjectiveDecl> objectives = {}) {
    std::vector<hwdse::Parameter> ps;
    for (std::size_t d = 0; d < dims; ++d) {
        hwdse::Parameter p{"x" + std::to_string(d + 1), {}};
        for (std::size_t l = 0; l < levels; ++l) p.levels.push_back(static_cast<double>(l));
        ps.push_back(p);
    }
    return hwdse::DesignSpace(ps, std::move(objectives));
}

}  // namespace testutil
