#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cslrot/errors.hpp"
#include "cslrot/geometry.hpp"
#include "cslrot/spectrum.hpp"

namespace cslrot {

// Malformed configuration; the message carries source:line:column.
class ConfigError : public InputError {
public:
    using InputError::InputError;
};

struct CslGrid {
    double lambda = 1.0;
    std::optional<double> rc;
    std::vector<double> rc_list;
    std::optional<double> rc_min;
    std::optional<double> rc_max;
    int points_per_decade = 25;
    std::optional<double> omega_c;

    bool operator==(const CslGrid&) const = default;
};

struct NoiseOverrides {
    std::optional<double> temperature;
    std::optional<double> gamma;
    std::optional<double> inertia;
    std::optional<double> omega0;
    std::optional<double> s_th;

    bool operator==(const NoiseOverrides&) const = default;
};

struct RunConfig {
    std::optional<std::string> preset;
    std::optional<MassModel> geometry;
    CslGrid csl;
    NoiseOverrides noise;
    PhysicalConstants constants;
    std::string method = "series";
    double rel_tol = 1e-6;
    double abs_floor = 1e-40;
    std::string output_dir = ".";
    std::vector<std::string> formats{"csv", "json"};
    int threads = 1;
    std::uint64_t seed = 1;

    bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
std::string serialize_config(const RunConfig& cfg);

// rc values requested by the grid: explicit list, single value, or range.
std::vector<double> rc_values(const CslGrid& grid);

RadialOptions radial_options(const RunConfig& cfg);

}  // namespace cslrot
