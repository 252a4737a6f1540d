#include "tracegrowth/mesh.hpp"

#include "tracegrowth/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace tracegrowth::ballgrowth {

namespace {

constexpr std::array<std::array<int, 2>, 8> kOffsets{{{1, 0}, {1, 1}, {0, 1}, {-1, 1},
                                                      {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

// Eikonal update of node A from the triangle (A, B, C) with the distance field
// taken linear on the triangle and the metric frozen at its mean over the triangle. Returns +inf when
// the characteristic does not enter A through the triangle.
double triangle_update(const Eigen::Vector2d& e1, const Eigen::Vector2d& e2, double rb, double rc,
                       const Eigen::Matrix2d& q) {
    Eigen::Matrix2d e;
    e.col(0) = e1;
    e.col(1) = e2;
    const Eigen::Matrix2d et_inv = e.transpose().inverse();
    const Eigen::Vector2d a = et_inv * Eigen::Vector2d(1.0, 1.0);
    const Eigen::Vector2d b = et_inv * Eigen::Vector2d(rb, rc);
    const double qa = a.dot(q * a);
    const double qb = a.dot(q * b);
    const double qc = b.dot(q * b) - 1.0;
    const double disc = qb * qb - qa * qc;
    if (!(qa > 0.0) || disc < 0.0) return std::numeric_limits<double>::infinity();
    const double ra = (qb + std::sqrt(disc)) / qa;
    if (ra < std::max(rb, rc)) return std::numeric_limits<double>::infinity();
    const Eigen::Vector2d p = b - ra * a;           // d rho at A, as a covector
    const Eigen::Vector2d back = e.inverse() * (-(q * p)); // upwind direction in the (e1, e2) cone
    if (back(0) < 0.0 || back(1) < 0.0) return std::numeric_limits<double>::infinity();
    return ra;
}

} // namespace

std::size_t MeshedBall::index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(count_[0]) + static_cast<std::size_t>(i);
}

int MeshedBall::wrap(int axis, int i) const {
    const int n = count_[static_cast<std::size_t>(axis)];
    if (periodic_[static_cast<std::size_t>(axis)]) return ((i % n) + n) % n;
    return (i < 0 || i >= n) ? -1 : i;
}

std::array<long, 8> MeshedBall::ring(int i, int j) const {
    std::array<long, 8> out{};
    for (std::size_t t = 0; t < 8; ++t) {
        const int a = wrap(0, i + kOffsets[t][0]);
        const int b = wrap(1, j + kOffsets[t][1]);
        out[t] = (a < 0 || b < 0) ? -1 : static_cast<long>(index(a, b));
    }
    return out;
}

double MeshedBall::indicator(double rho, double mu) const {
    if (mu <= 0.0) return 0.0;
    return std::clamp((mu - rho) / spacing_ + 0.5, 0.0, 1.0);
}

double MeshedBall::ball_integral(std::span<const double> values, double mu) const {
    double total = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const double w = indicator(nodes_[k].rho, mu);
        if (w > 0.0) total += w * nodes_[k].weight * values[k];
    }
    return total;
}

double MeshedBall::ball_area(double mu) const {
    double total = 0.0;
    for (const auto& n : nodes_) total += indicator(n.rho, mu) * n.weight;
    return total;
}

Eigen::Vector2d MeshedBall::rho_partials(std::size_t k) const {
    const int i = static_cast<int>(k % static_cast<std::size_t>(count_[0]));
    const int j = static_cast<int>(k / static_cast<std::size_t>(count_[0]));
    Eigen::Vector2d out;
    for (int axis = 0; axis < 2; ++axis) {
        const int di = axis == 0 ? 1 : 0;
        const int dj = axis == 0 ? 0 : 1;
        const int pi = wrap(0, i + di), pj = wrap(1, j + dj);
        const int mi = wrap(0, i - di), mj = wrap(1, j - dj);
        const bool has_plus = pi >= 0 && pj >= 0;
        const bool has_minus = mi >= 0 && mj >= 0;
        const double h = step_[static_cast<std::size_t>(axis)];
        const double here = nodes_[k].rho;
        if (has_plus && has_minus) {
            out(axis) = (nodes_[index(pi, pj)].rho - nodes_[index(mi, mj)].rho) / (2.0 * h);
        } else if (has_plus) {
            out(axis) = (nodes_[index(pi, pj)].rho - here) / h;
        } else {
            out(axis) = (here - nodes_[index(mi, mj)].rho) / h;
        }
    }
    return out;
}

MeshedBall mesh_and_distance(const geometry::ImmersionChart& chart, const MeshOptions& options) {
    if (chart.dim() != 2) throw Error(ErrorCode::Unsupported, "meshed balls need a 2-dimensional chart");
    if (options.resolution < 32) {
        throw Error(ErrorCode::InsufficientResolution, "resolution must be at least 32 per axis");
    }
    const auto& dom = chart.domain();
    const auto& amb = chart.ambient();
    MeshedBall ball(chart);
    for (int a = 0; a < 2; ++a) {
        const auto s = static_cast<std::size_t>(a);
        ball.periodic_[s] = dom.periodic[s];
        ball.count_[s] = options.resolution + (ball.periodic_[s] ? 0 : 1);
        ball.step_[s] = dom.period(a) / options.resolution;
    }
    const int nx = ball.count_[0];
    const int ny = ball.count_[1];
    const std::size_t total = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    ball.nodes_.resize(total);
    std::vector<Eigen::VectorXd> images(total);

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            MeshNode& n = ball.nodes_[ball.index(i, j)];
            n.u = Eigen::Vector2d(dom.lower(0) + i * ball.step_[0], dom.lower(1) + j * ball.step_[1]);
            const Eigen::VectorXd u = n.u;
            const Eigen::VectorXd x = chart(u);
            Eigen::MatrixXd t = chart.jacobian(u);
            if (amb.is_hyperbolic()) {
                for (int a = 0; a < 2; ++a) t.col(a) = amb.project_to_tangent(x, t.col(a));
            }
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) n.metric(a, b) = amb.inner(t.col(a), t.col(b));
            }
            const double det = n.metric.determinant();
            if (!(det > 1e-12)) throw Error(ErrorCode::DegenerateChart, "metric degenerates on the mesh");
            double w = std::sqrt(det) * ball.step_[0] * ball.step_[1];
            if (!ball.periodic_[0] && (i == 0 || i == nx - 1)) w *= 0.5;
            if (!ball.periodic_[1] && (j == 0 || j == ny - 1)) w *= 0.5;
            n.weight = w;
            n.r = amb.distance(x, chart.base_image());
            images[ball.index(i, j)] = x;
        }
    }

    // Seed every node within one cell of the base point with its local metric distance.
    const Eigen::Matrix2d g0 = geometry::frame_at(chart, chart.base_point()).metric;
    const Eigen::Vector2d q0 = chart.base_point();
    ball.spacing_ = std::max(std::sqrt(g0(0, 0)) * ball.step_[0], std::sqrt(g0(1, 1)) * ball.step_[1]);
    std::vector<bool> seeded(total, false);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < total; ++k) {
        Eigen::Vector2d d = ball.nodes_[k].u - q0;
        bool close = true;
        for (int a = 0; a < 2; ++a) {
            if (ball.periodic_[static_cast<std::size_t>(a)]) d(a) = std::remainder(d(a), dom.period(a));
            if (std::abs(d(a)) > ball.step_[static_cast<std::size_t>(a)] * (1.0 + 1e-9)) close = false;
        }
        if (!close) continue;
        const double rho = std::max(std::sqrt(d.dot(g0 * d)), ball.nodes_[k].r);
        ball.nodes_[k].rho = rho;
        seeded[k] = true;
        queue.emplace(rho, k);
        if (rho < nearest) {
            nearest = rho;
            ball.base_ = k;
        }
    }
    if (queue.empty()) throw Error(ErrorCode::Domain, "base point lies outside the meshed domain");

    while (!queue.empty()) {
        const auto [rho, k] = queue.top();
        queue.pop();
        if (rho > ball.nodes_[k].rho) continue;
        const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
        const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
        for (long nb : ball.ring(i, j)) {
            if (nb < 0) continue;
            const auto n = static_cast<std::size_t>(nb);
            const double cand = rho + amb.distance(images[k], images[n]);
            if (cand < ball.nodes_[n].rho) {
                ball.nodes_[n].rho = cand;
                queue.emplace(cand, n);
            }
        }
    }
    for (const auto& n : ball.nodes_) {
        if (!std::isfinite(n.rho)) throw Error(ErrorCode::MeshDisconnected, "mesh graph is disconnected");
    }

    if (options.relax) {
        std::vector<std::size_t> order(total);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return ball.nodes_[a].rho < ball.nodes_[b].rho;
            });
            double change = 0.0;
            double largest = 0.0;
            for (std::size_t k : order) {
                largest = std::max(largest, ball.nodes_[k].rho);
                if (seeded[k]) continue;
                const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
                const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
                const auto nbs = ball.ring(i, j);
                double best = ball.nodes_[k].rho;
                for (long b : nbs) {
                    if (b < 0) continue;
                    const auto n = static_cast<std::size_t>(b);
                    best = std::min(best, ball.nodes_[n].rho + amb.distance(images[k], images[n]));
                }
                for (std::size_t t = 0; t < 8; ++t) {
                    const long b = nbs[t];
                    const long c = nbs[(t + 1) % 8];
                    if (b < 0 || c < 0) continue;
                    const Eigen::Vector2d e1(kOffsets[t][0] * ball.step_[0], kOffsets[t][1] * ball.step_[1]);
                    const Eigen::Vector2d e2(kOffsets[(t + 1) % 8][0] * ball.step_[0],
                                             kOffsets[(t + 1) % 8][1] * ball.step_[1]);
                    const MeshNode& nb = ball.nodes_[static_cast<std::size_t>(b)];
                    const MeshNode& nc = ball.nodes_[static_cast<std::size_t>(c)];
                    const Eigen::Matrix2d q = ((ball.nodes_[k].metric + nb.metric + nc.metric) / 3.0).inverse();
                    best = std::min(best, triangle_update(e1, e2, nb.rho, nc.rho, q));
                }
                if (best < ball.nodes_[k].rho) {
                    change = std::max(change, ball.nodes_[k].rho - best);
                    ball.nodes_[k].rho = best;
                }
            }
            ball.sweeps_ = sweep + 1;
            if (change <= 1e-12 * (1.0 + largest)) break;
        }
    }

    ball.max_radius_ = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const bool face = (!ball.periodic_[0] && (i == 0 || i == nx - 1)) ||
                              (!ball.periodic_[1] && (j == 0 || j == ny - 1));
            if (face) ball.max_radius_ = std::min(ball.max_radius_, ball.node(i, j).rho);
        }
    }
    return ball;
}

} // namespace tracegrowth::ballgrowth
