#pragma once

#include "tracegrowth/chart.hpp"

#include <functional>

namespace tracegrowth::geometry::charts {

// Built-in parametrizations. All are 2-dimensional except where noted.

/// (u1, u2, 0) in R^3 on [-half_width, half_width]^2, base at the origin.
ImmersionChart plane(double half_width = 12.0, ChartOptions options = {});

/// (R cos u1, R sin u1, u2); u1 periodic on [0, 2 pi), |u2| <= half_height.
ImmersionChart cylinder(double radius = 1.0, double half_height = 16.0, ChartOptions options = {});

/// R (sin t cos p, sin t sin p, cos t); p periodic, t kept away from the poles.
/// Base point (pi/2, 0).
ImmersionChart sphere(double radius = 1.0, ChartOptions options = {});

/// (cosh v cos t, cosh v sin t, v); t periodic, |v| <= v_max. Parameters (t, v).
ImmersionChart catenoid(double v_max = 3.0, ChartOptions options = {});

/// (sinh v cos t, sinh v sin t, t); |t| <= t_max, |v| <= v_max. Parameters (t, v).
ImmersionChart helicoid(double v_max = 3.0, double t_max = 10.0, ChartOptions options = {});

/// (u1, u2, height(u1, u2)) on [-half_width, half_width]^2.
ImmersionChart graph(std::string name, std::function<double(double, double)> height,
                     double half_width = 3.0, ChartOptions options = {});

/// Totally geodesic H^2(-c^2) inside H^3(-c^2), in geodesic normal
/// coordinates about the base point: distance to the base equals |u|.
ImmersionChart hyperbolic_plane(double c = 1.0, double half_width = 5.0, ChartOptions options = {});

/// Unit sphere of dimension m in R^{m+1}, angles (t_1, ..., t_m); used for
/// higher-dimensional shape-operator tests.
ImmersionChart round_sphere(int m, double radius = 1.0, ChartOptions options = {});

} // namespace tracegrowth::geometry::charts
