#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fracsol/field.hpp"

namespace fracsol {

struct ReportOptions {
    double eps = 0.01;
    int radii = 64;
    /// Distances wrap around the cell (torus grids always wrap).
    bool periodic = false;
    /// Restrict the density to marked nodes (fundamental-domain copy).
    const std::vector<char>* mask = nullptr;
};

struct LocationInfo {
    std::string location_class = "interior";  // vertex | edge | interior
    std::vector<std::pair<std::string, double>> vertex_distances;
    std::vector<std::pair<std::string, double>> edge_distances;
};

struct ConcentrationReport {
    Vec2 x_star;
    std::size_t node = 0;
    std::vector<double> radii;
    std::vector<double> mass_profile;  // m(radii[k])
    double rho_eps = 0.0;     // smallest radius with m >= 1 - eps
    double rho_bubble = 0.0;  // first plateau radius of the profile (<= rho_eps)
    double weight = 0.0;      // m(rho_bubble)
    bool multi_bubble = false;
    bool diffuse = false;     // rho_eps comparable to the cell diameter
    double epsilon = 0.01;
    double cell_diameter = 0.0;
    bool periodic = false;
    LocationInfo location;

    /// Ball mass fraction at radius rho, linear in rho between profile radii.
    double mass_at(double rho) const;
};

ConcentrationReport concentration_report(const Field& u, double q, const ReportOptions& opt = {});

/// Distances from x_star to the polygon's vertices and edges; also stored in report.location.
LocationInfo vertex_distance(ConcentrationReport& report, const DomainSpec& domain);

struct DichotomyVerdict {
    std::string verdict;  // concentration | vanishing
    std::vector<double> R;
    std::vector<double> evidence;  // ball mass at rho_fixed around x_star, per R
    double slope = 0.0;            // least-squares slope of log evidence against log R
};

DichotomyVerdict classify_dichotomy(const std::vector<ConcentrationReport>& reports, const std::vector<double>& R,
                                    double rho_fixed = 2.0, double threshold = 0.05);

/// (r, max |u| over nodes in the shell [r - h/2, r + h/2)) with h one grid spacing.
std::vector<std::pair<double, double>> decay_profile(const Field& u, Vec2 center, bool periodic = false);

/// |x*_1 - x*_2| <= max(rho_eps_1, rho_eps_2)
bool equivalent(const ConcentrationReport& a, const ConcentrationReport& b);

/// Distance between points, wrapped when the grid is a torus or `periodic` is set.
double grid_distance(const Grid& grid, Vec2 a, Vec2 b, bool periodic);

}  // namespace fracsol
