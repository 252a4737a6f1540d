#pragma once

#include "tracegrowth/chart.hpp"

#include <Eigen/Dense>

#include <array>
#include <limits>
#include <span>
#include <vector>

namespace tracegrowth::ballgrowth {

struct MeshOptions {
    /// Cells per axis; non-periodic axes get resolution + 1 nodes.
    int resolution = 128;
    /// Triangle-unfolding sweeps after Dijkstra. Off gives the plain
    /// 8-neighbor graph distance.
    bool relax = true;
    int max_sweeps = 200;
};

struct MeshNode {
    Eigen::Vector2d u;
    Eigen::Matrix2d metric;
    double weight = 0.0; // sqrt(det g) * cell area, halved on non-periodic faces
    double rho = std::numeric_limits<double>::infinity();
    double r = 0.0;
};

/// Regular lattice over a 2-dimensional chart with intrinsic distance rho
/// from the base point and ambient distance r.
class MeshedBall {
public:
    const geometry::ImmersionChart& chart() const { return chart_; }
    const std::vector<MeshNode>& nodes() const { return nodes_; }
    int nodes_along(int axis) const { return count_[static_cast<std::size_t>(axis)]; }
    std::size_t index(int i, int j) const;
    std::size_t base_node() const { return base_; }
    const MeshNode& node(std::size_t k) const { return nodes_[k]; }
    const MeshNode& node(int i, int j) const { return nodes_[index(i, j)]; }

    /// Metric length of the longer axis edge at the base node.
    double spacing() const { return spacing_; }
    /// Smallest rho over nodes on non-periodic faces: balls below it do not touch the edge.
    double max_radius() const { return max_radius_; }
    int sweeps() const { return sweeps_; }

    /// Smoothed indicator of B_mu at distance rho (linear ramp of width spacing()).
    double indicator(double rho, double mu) const;
    /// sum_k weight_k * indicator(rho_k, mu) * values[k].
    double ball_integral(std::span<const double> values, double mu) const;
    double ball_area(double mu) const;

    /// Lattice central differences of rho: coordinate partials at node k.
    Eigen::Vector2d rho_partials(std::size_t k) const;

    /// Up to 8 neighbor indices (fewer on non-periodic faces), counterclockwise from +u1.
    std::array<long, 8> ring(int i, int j) const;

private:
    friend MeshedBall mesh_and_distance(const geometry::ImmersionChart&, const MeshOptions&);

    explicit MeshedBall(geometry::ImmersionChart chart) : chart_(std::move(chart)) {}

    int wrap(int axis, int i) const;

    geometry::ImmersionChart chart_;
    std::array<int, 2> count_{};
    std::array<double, 2> step_{};
    std::array<bool, 2> periodic_{};
    std::vector<MeshNode> nodes_;
    std::size_t base_ = 0;
    double spacing_ = 0.0;
    double max_radius_ = 0.0;
    int sweeps_ = 0;
};

/// Throws InsufficientResolution below 32 cells per axis, Unsupported unless
/// the chart is 2-dimensional, MeshDisconnected when some node is unreachable.
MeshedBall mesh_and_distance(const geometry::ImmersionChart& chart, const MeshOptions& options);

} // namespace tracegrowth::ballgrowth
