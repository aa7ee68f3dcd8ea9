#pragma once

#include <string>
#include <vector>

#include "cslrot/geometry.hpp"
#include "cslrot/spectrum.hpp"

namespace cslrot {

// Reference experiment: room-temperature torsion balance.
inline constexpr double kExperimentInertia = 9e-6;       // kg m^2
inline constexpr double kExperimentTemperature = 300.0;  // K
inline constexpr double kExperimentThermalFloor = 1e-30; // N^2 m^2 s
inline constexpr double kExperimentResonanceHz = 1.8e-2; // stored as a cyclic frequency
inline constexpr double kBandLowHz = 2e-3;
inline constexpr double kBandHighHz = 1e-1;
inline constexpr double kRhoLight = 1.2e3;
inline constexpr double kDeltaRhoHeavy = 19.3e3;

struct Preset {
    std::string name;
    std::string description;
    std::string provenance;
    MassModel model;
    NoiseBudget budget;
    double reference_rc = 0.0;
    std::vector<std::string> assumptions;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);  // throws InputError

// Experimental floor scaled to a different inertia and temperature.
NoiseBudget rescaled_budget(const Preset& preset, double temperature);

}  // namespace cslrot
