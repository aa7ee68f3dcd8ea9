#pragma once

#include <string>
#include <variant>
#include <vector>

namespace cslrot {

struct PhysicalConstants {
    double hbar = 1.054571817e-34;
    double k_boltzmann = 1.380649e-23;
    double m0 = 1.66053906660e-27;

    bool operator==(const PhysicalConstants&) const = default;
};

struct HomogeneousDisk {
    double rho = 0.0;
    double radius = 0.0;
    double height = 0.0;

    bool operator==(const HomogeneousDisk&) const = default;
};

// Ring [r_inner, r_outer] with n heavy sectors of angle alpha starting at
// theta = 2 pi j / n; density rho everywhere inside r_outer.
struct PeriodicAnnulus {
    double rho = 0.0;
    double delta_rho = 0.0;
    double r_inner = 0.0;
    double r_outer = 0.0;
    int n_sectors = 1;
    double alpha = 0.0;
    double height = 0.0;

    bool operator==(const PeriodicAnnulus&) const = default;
};

// One ring of a TwoAnnuli model; the heavy sectors fill half of each period.
struct SectorRing {
    double r_inner = 0.0;
    double r_outer = 0.0;
    int n_sectors = 1;

    bool operator==(const SectorRing&) const = default;
};

// Base material of density rho fills [r_core, r_outer_total]; two rings of
// extra density delta_rho sit inside it.
struct TwoAnnuli {
    double rho = 0.0;
    double delta_rho = 0.0;
    double r_core = 0.0;
    double r_outer_total = 0.0;
    SectorRing inner;
    SectorRing outer;
    double height = 0.0;

    bool operator==(const TwoAnnuli&) const = default;
};

// Disk of density rho with the half theta in [0, pi) carrying rho + delta_rho.
struct HalfCylinder {
    double rho = 0.0;
    double delta_rho = 0.0;
    double radius = 0.0;
    double height = 0.0;

    bool operator==(const HalfCylinder&) const = default;
};

using MassModel = std::variant<HomogeneousDisk, PeriodicAnnulus, TwoAnnuli, HalfCylinder>;

// A radial band whose excess density delta_rho repeats n times per turn,
// occupying the fraction `duty` of each period starting at the period origin.
struct AngularRing {
    double r_inner = 0.0;
    double r_outer = 0.0;
    int n_sectors = 1;
    double duty = 0.0;

    bool operator==(const AngularRing&) const = default;
};

void validate(const MassModel& model);  // throws InvalidGeometry
std::string kind_name(const MassModel& model);

double moment_of_inertia(const MassModel& model);
double total_mass(const MassModel& model);
double height_of(const MassModel& model);
double outer_radius(const MassModel& model);
double excess_density(const MassModel& model);
double max_density(const MassModel& model);
MassModel with_delta_rho(MassModel model, double delta_rho);

// Structured (angle-dependent) part of the model. Homogeneous parts do not
// contribute to the rotational kernel.
std::vector<AngularRing> angular_rings(const MassModel& model);

// Planar density; theta is reduced modulo 2 pi.
double density_at(const MassModel& model, double r_perp, double theta);

// Angles in [0, 2 pi) where density_at jumps at radius r_perp.
std::vector<double> angular_breakpoints(const MassModel& model, double r_perp);

// Smallest period of the density in theta (2 pi / k for some integer k).
int angular_symmetry(const MassModel& model);

// Radii where the density is discontinuous in r.
std::vector<double> radial_breakpoints(const MassModel& model);

double solve_inner_radius(double inertia_target, double rho, double delta_rho, int n,
                          double alpha, double epsilon, double h);

}  // namespace cslrot
