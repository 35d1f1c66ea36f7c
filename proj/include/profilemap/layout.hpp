#pragma once

// Kamada-Kawai spring layout for MapGraph. Each connected component is laid
// out on its own and the components are packed on a grid.

#include "profilemap/error.hpp"
#include "profilemap/mapgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <vector>

namespace profilemap::mapgraph {

struct LayoutOptions {
    std::size_t max_iter = 10000; // node moves per component
    double tol = 1e-6;            // max gradient norm at convergence
    double edge_length = 1.0;     // L: ideal length of one graph-distance unit
    bool weighted_distances = false; // edge length 1 - similarity instead of hops
    std::optional<std::uint64_t> seed; // random start instead of the index circle
};

struct Layout {
    std::vector<Point> positions; // one per node
    double stress = 0.0;
    double initial_stress = 0.0;
    double max_gradient = 0.0;
    std::size_t iterations = 0; // largest per-component count
    bool converged = false;
};

// Shortest weighted length used for an edge when weighted distances are on.
inline constexpr double min_weighted_length = 1e-3;

namespace detail {

    struct Component {
        std::vector<std::size_t> nodes;   // global node indices, ascending
        std::vector<double> dist;         // graph distances, row-major
    };

    inline std::vector<Component> components(const MapGraph& g, bool weighted)
    {
        const std::size_t n = g.nodes.size();
        struct Arc {
            std::size_t to;
            double len;
        };
        std::vector<std::vector<Arc>> adj(n);
        for (const auto& e : g.edges) {
            const double len = weighted ? std::max(1.0 - e.similarity, min_weighted_length) : 1.0;
            adj[e.i].push_back({e.j, len});
            adj[e.j].push_back({e.i, len});
        }

        std::vector<std::size_t> comp_of(n, SIZE_MAX);
        std::vector<Component> comps;
        for (std::size_t s = 0; s < n; ++s) {
            if (comp_of[s] != SIZE_MAX)
                continue;
            Component c;
            std::vector<std::size_t> stack{s};
            comp_of[s] = comps.size();
            while (!stack.empty()) {
                auto v = stack.back();
                stack.pop_back();
                c.nodes.push_back(v);
                for (const auto& a : adj[v])
                    if (comp_of[a.to] == SIZE_MAX) {
                        comp_of[a.to] = comps.size();
                        stack.push_back(a.to);
                    }
            }
            std::sort(c.nodes.begin(), c.nodes.end());
            comps.push_back(std::move(c));
        }

        for (auto& c : comps) {
            const std::size_t k = c.nodes.size();
            std::vector<std::size_t> local(n, SIZE_MAX);
            for (std::size_t a = 0; a < k; ++a)
                local[c.nodes[a]] = a;
            c.dist.assign(k * k, std::numeric_limits<double>::infinity());
            // Dijkstra; with unit lengths this is BFS order.
            for (std::size_t src = 0; src < k; ++src) {
                double* row = &c.dist[src * k];
                using Item = std::pair<double, std::size_t>;
                std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
                row[src] = 0.0;
                pq.push({0.0, src});
                while (!pq.empty()) {
                    auto [d, v] = pq.top();
                    pq.pop();
                    if (d > row[v])
                        continue;
                    for (const auto& a : adj[c.nodes[v]]) {
                        const auto w = local[a.to];
                        if (d + a.len < row[w]) {
                            row[w] = d + a.len;
                            pq.push({row[w], w});
                        }
                    }
                }
            }
        }
        return comps;
    }

    struct Springs {
        std::size_t n = 0;
        std::vector<double> length;   // L * d_ij
        std::vector<double> strength; // 1 / d_ij^2
    };

    inline Springs springs(const Component& c, double edge_length)
    {
        Springs s;
        s.n = c.nodes.size();
        s.length.assign(s.n * s.n, 0.0);
        s.strength.assign(s.n * s.n, 0.0);
        for (std::size_t i = 0; i < s.n; ++i)
            for (std::size_t j = 0; j < s.n; ++j)
                if (i != j) {
                    const double d = c.dist[i * s.n + j];
                    s.length[i * s.n + j] = edge_length * d;
                    s.strength[i * s.n + j] = 1.0 / (d * d);
                }
        return s;
    }

    inline double node_energy(const Springs& s, const std::vector<Point>& p, std::size_t m, Point at)
    {
        double e = 0.0;
        for (std::size_t j = 0; j < s.n; ++j) {
            if (j == m)
                continue;
            const double dx = at.x - p[j].x;
            const double dy = at.y - p[j].y;
            const double r = std::hypot(dx, dy) - s.length[m * s.n + j];
            e += 0.5 * s.strength[m * s.n + j] * r * r;
        }
        return e;
    }

    inline double energy(const Springs& s, const std::vector<Point>& p)
    {
        double e = 0.0;
        for (std::size_t i = 0; i < s.n; ++i)
            for (std::size_t j = i + 1; j < s.n; ++j) {
                const double r = std::hypot(p[i].x - p[j].x, p[i].y - p[j].y) - s.length[i * s.n + j];
                e += 0.5 * s.strength[i * s.n + j] * r * r;
            }
        return e;
    }

    struct Derivatives {
        double gx = 0, gy = 0;           // gradient
        double hxx = 0, hxy = 0, hyy = 0; // Hessian
        double k_sum = 0;
    };

    inline Derivatives derivatives(const Springs& s, const std::vector<Point>& p, std::size_t m)
    {
        Derivatives d;
        for (std::size_t j = 0; j < s.n; ++j) {
            if (j == m)
                continue;
            const double dx = p[m].x - p[j].x;
            const double dy = p[m].y - p[j].y;
            const double dist = std::hypot(dx, dy);
            const double k = s.strength[m * s.n + j];
            const double l = s.length[m * s.n + j];
            d.k_sum += k;
            if (dist < 1e-12)
                continue; // coincident pair: no defined direction
            const double inv = 1.0 / dist;
            const double inv3 = inv * inv * inv;
            d.gx += k * (dx - l * dx * inv);
            d.gy += k * (dy - l * dy * inv);
            d.hxx += k * (1.0 - l * dy * dy * inv3);
            d.hyy += k * (1.0 - l * dx * dx * inv3);
            d.hxy += k * l * dx * dy * inv3;
        }
        return d;
    }

    inline double gradient_norm(const Springs& s, const std::vector<Point>& p, std::size_t m)
    {
        const auto d = derivatives(s, p, m);
        return std::hypot(d.gx, d.gy);
    }

    // Uniform double in [0, 1) from the top 53 bits; mt19937_64 output is
    // fixed by the standard, so this is reproducible across platforms.
    inline double unit(std::mt19937_64& rng)
    {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    inline std::vector<Point> initial_positions(const Component& c, const LayoutOptions& opt,
                                                std::mt19937_64* rng)
    {
        const std::size_t k = c.nodes.size();
        double diameter = 0.0;
        for (double d : c.dist)
            diameter = std::max(diameter, d);
        const double span = opt.edge_length * std::max(diameter, 1.0);
        std::vector<Point> p(k);
        if (k == 1)
            return p;
        for (std::size_t a = 0; a < k; ++a) {
            if (rng) {
                const double x = unit(*rng);
                const double y = unit(*rng);
                p[a] = {span * x, span * y};
            } else {
                const double theta = 2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(k);
                p[a] = {0.5 * span * std::cos(theta), 0.5 * span * std::sin(theta)};
            }
        }
        return p;
    }

    struct ComponentResult {
        std::vector<Point> positions;
        double initial_stress = 0.0;
        double stress = 0.0;
        double max_gradient = 0.0;
        std::size_t iterations = 0;
        bool converged = false;
    };

    inline ComponentResult solve(const Component& c, const LayoutOptions& opt, std::mt19937_64* rng)
    {
        const auto s = springs(c, opt.edge_length);
        ComponentResult res;
        res.positions = initial_positions(c, opt, rng);
        auto& p = res.positions;
        res.initial_stress = energy(s, p);

        constexpr std::size_t max_inner = 50;
        constexpr int max_halvings = 60;

        while (true) {
            std::size_t worst = 0;
            double worst_norm = 0.0;
            for (std::size_t m = 0; m < s.n; ++m) {
                const double g = gradient_norm(s, p, m);
                if (g > worst_norm) {
                    worst_norm = g;
                    worst = m;
                }
            }
            res.max_gradient = worst_norm;
            if (worst_norm < opt.tol) {
                res.converged = true;
                break;
            }
            if (res.iterations >= opt.max_iter)
                break;
            ++res.iterations;

            // Damped Newton steps on the selected node; each accepted step
            // strictly lowers the total energy.
            for (std::size_t inner = 0; inner < max_inner; ++inner) {
                const auto d = derivatives(s, p, worst);
                if (std::hypot(d.gx, d.gy) < opt.tol)
                    break;
                double sx, sy;
                const double det = d.hxx * d.hyy - d.hxy * d.hxy;
                if (d.hxx > 0.0 && det > 0.0) {
                    sx = -(d.hyy * d.gx - d.hxy * d.gy) / det;
                    sy = -(d.hxx * d.gy - d.hxy * d.gx) / det;
                } else {
                    sx = -d.gx / d.k_sum;
                    sy = -d.gy / d.k_sum;
                }
                const double e0 = node_energy(s, p, worst, p[worst]);
                double t = 1.0;
                bool moved = false;
                for (int h = 0; h < max_halvings; ++h, t *= 0.5) {
                    const Point cand{p[worst].x + t * sx, p[worst].y + t * sy};
                    if (node_energy(s, p, worst, cand) < e0) {
                        p[worst] = cand;
                        moved = true;
                        break;
                    }
                }
                if (!moved)
                    break;
            }
        }
        res.stress = energy(s, p);
        return res;
    }

} // namespace detail

/// Total spring energy of `positions` under the graph's distances.
inline double layout_stress(const MapGraph& g, const std::vector<Point>& positions,
                            const LayoutOptions& opt = {})
{
    double total = 0.0;
    for (const auto& c : detail::components(g, opt.weighted_distances)) {
        std::vector<Point> local;
        for (auto v : c.nodes)
            local.push_back(positions.at(v));
        total += detail::energy(detail::springs(c, opt.edge_length), local);
    }
    return total;
}

inline Layout kamada_kawai(const MapGraph& g, const LayoutOptions& opt = {})
{
    if (g.nodes.empty())
        throw ArgumentError("cannot lay out an empty graph");
    if (!(opt.edge_length > 0.0) || !(opt.tol > 0.0))
        throw ArgumentError("layout edge length and tolerance must be positive");

    const auto comps = detail::components(g, opt.weighted_distances);
    std::optional<std::mt19937_64> rng;
    if (opt.seed)
        rng.emplace(*opt.seed);

    Layout out;
    out.positions.resize(g.nodes.size());
    out.converged = true;

    std::vector<detail::ComponentResult> results;
    for (const auto& c : comps) {
        results.push_back(detail::solve(c, opt, rng ? &*rng : nullptr));
        const auto& r = results.back();
        out.stress += r.stress;
        out.initial_stress += r.initial_stress;
        out.max_gradient = std::max(out.max_gradient, r.max_gradient);
        out.iterations = std::max(out.iterations, r.iterations);
        out.converged = out.converged && r.converged;
    }

    // Pack: one grid cell per component, cells sized by the largest bounding
    // box plus one edge length of padding.
    double cell_w = 0.0, cell_h = 0.0;
    std::vector<std::pair<Point, Point>> boxes;
    for (const auto& r : results) {
        Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        Point hi{-lo.x, -lo.y};
        for (const auto& q : r.positions) {
            lo = {std::min(lo.x, q.x), std::min(lo.y, q.y)};
            hi = {std::max(hi.x, q.x), std::max(hi.y, q.y)};
        }
        boxes.push_back({lo, hi});
        cell_w = std::max(cell_w, hi.x - lo.x);
        cell_h = std::max(cell_h, hi.y - lo.y);
    }
    cell_w += opt.edge_length;
    cell_h += opt.edge_length;
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(comps.size()))));
    for (std::size_t k = 0; k < comps.size(); ++k) {
        const double ox = static_cast<double>(k % cols) * cell_w - boxes[k].first.x;
        const double oy = static_cast<double>(k / cols) * cell_h - boxes[k].first.y;
        for (std::size_t a = 0; a < comps[k].nodes.size(); ++a) {
            const auto& q = results[k].positions[a];
            out.positions[comps[k].nodes[a]] = {q.x + ox, q.y + oy};
        }
    }
    return out;
}

inline MapGraph with_layout(MapGraph g, const Layout& layout)
{
    if (layout.positions.size() != g.nodes.size())
        throw ArgumentError("layout does not match the graph's node count");
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        g.nodes[i].position = layout.positions[i];
    return g;
}

} // namespace profilemap::mapgraph
