#pragma once

// Complete-linkage agglomerative clustering and dendrogram serialization.

#include "profilemap/error.hpp"
#include "profilemap/similarity.hpp"
#include "profilemap/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace profilemap::clustering {

/// Leaves are clusters 0..N-1; the k-th merge creates cluster N+k.
struct Merge {
    std::size_t left = 0;  // child whose smallest member index is smaller
    std::size_t right = 0;
    double height = 0.0;
    std::size_t id = 0;
    friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;

    std::size_t size() const noexcept { return leaves.size(); }
    friend bool operator==(const Dendrogram&, const Dendrogram&) = default;
};

inline constexpr double symmetry_tolerance = 1e-12;

/// Lance-Williams complete linkage, O(N^3). Ties on the minimum distance are
/// broken by the lexicographically smallest pair of smallest-member indices.
inline Dendrogram complete_linkage(const std::vector<std::string>& ids,
                                   const std::vector<double>& values)
{
    const std::size_t n = ids.size();
    if (n < 2)
        throw ArgumentError("complete linkage needs at least 2 institutions, got "
                            + std::to_string(n));
    if (values.size() != n * n)
        throw ArgumentError("dissimilarity matrix has the wrong number of cells");

    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(values[i * n + i]) > symmetry_tolerance)
            throw ConsistencyError("dissimilarity diagonal is not zero at " + ids[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = values[i * n + j];
            const double b = values[j * n + i];
            if (!std::isfinite(a) || std::abs(a - b) > symmetry_tolerance)
                throw ConsistencyError("dissimilarity matrix is not symmetric at (" + ids[i]
                                       + ", " + ids[j] + ")");
            if (a < -symmetry_tolerance || a > 1.0 + symmetry_tolerance)
                throw ConsistencyError("dissimilarity (" + ids[i] + ", " + ids[j]
                                       + ") is outside [0, 1]");
        }
    }

    // Slot s holds the active cluster whose smallest member is s.
    std::vector<double> dist(values);
    std::vector<bool> active(n, true);
    std::vector<std::size_t> cluster_id(n);
    std::iota(cluster_id.begin(), cluster_id.end(), std::size_t{0});

    Dendrogram d;
    d.leaves = ids;
    d.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_a = n, best_b = n;
        double best = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a])
                continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b])
                    continue;
                const double v = dist[a * n + b];
                if (best_a == n || v < best) {
                    best = v;
                    best_a = a;
                    best_b = b;
                }
            }
        }

        const std::size_t new_id = n + step;
        d.merges.push_back({cluster_id[best_a], cluster_id[best_b], std::clamp(best, 0.0, 1.0), new_id});

        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == best_a || k == best_b)
                continue;
            const double merged = std::max(dist[best_a * n + k], dist[best_b * n + k]);
            dist[best_a * n + k] = merged;
            dist[k * n + best_a] = merged;
        }
        active[best_b] = false;
        cluster_id[best_a] = new_id;
    }
    return d;
}

inline Dendrogram complete_linkage(const similarity::DissimilarityMatrix& d)
{
    return complete_linkage(d.institutions, d.values);
}

namespace detail {
    inline std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    // Leaf members of every cluster id (leaves and merges).
    inline std::vector<std::vector<std::size_t>> members(const Dendrogram& d)
    {
        const std::size_t n = d.size();
        std::vector<std::vector<std::size_t>> m(n + d.merges.size());
        for (std::size_t i = 0; i < n; ++i)
            m[i] = {i};
        for (const auto& mg : d.merges) {
            auto& out = m[mg.id];
            out = m[mg.left];
            out.insert(out.end(), m[mg.right].begin(), m[mg.right].end());
            std::sort(out.begin(), out.end());
        }
        return m;
    }
} // namespace detail

/// Clusters formed by every merge at or below `height`, each sorted
/// ascending, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> cut(const Dendrogram& d, double height)
{
    if (height < 0.0)
        throw ArgumentError("cut height must be non-negative");
    const std::size_t n = d.size();
    std::vector<std::size_t> parent(n + d.merges.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const auto& m : d.merges) {
        if (m.height > height)
            continue;
        parent[detail::find_root(parent, m.left)] = m.id;
        parent[detail::find_root(parent, m.right)] = m.id;
    }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> slot(parent.size(), SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = detail::find_root(parent, i);
        if (slot[r] == SIZE_MAX) {
            slot[r] = groups.size();
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    return groups; // leaves visited in ascending order, so already canonical
}

/// Row-major N x N matrix of merge heights at which leaf pairs first join.
inline std::vector<double> cophenetic(const Dendrogram& d)
{
    const std::size_t n = d.size();
    std::vector<double> c(n * n, 0.0);
    const auto m = detail::members(d);
    for (const auto& mg : d.merges)
        for (auto a : m[mg.left])
            for (auto b : m[mg.right]) {
                c[a * n + b] = mg.height;
                c[b * n + a] = mg.height;
            }
    return c;
}

/// Checks the structural invariants; throws DataError on violation.
inline void validate(const Dendrogram& d)
{
    const std::size_t n = d.size();
    if (n < 2 || d.merges.size() != n - 1)
        throw DataError("dendrogram needs N >= 2 leaves and exactly N-1 merges");
    std::vector<bool> used(2 * n - 1, false);
    double prev = 0.0;
    for (std::size_t k = 0; k < d.merges.size(); ++k) {
        const auto& m = d.merges[k];
        if (m.id != n + k || m.left >= m.id || m.right >= m.id || m.left == m.right)
            throw DataError("dendrogram merge " + std::to_string(k) + " has invalid cluster ids");
        if (used[m.left] || used[m.right])
            throw DataError("dendrogram cluster used as a child twice");
        used[m.left] = used[m.right] = true;
        if (!(m.height >= 0.0 && m.height <= 1.0) || m.height < prev)
            throw DataError("dendrogram heights must be non-decreasing within [0, 1]");
        prev = m.height;
    }
}

// ---- Newick ------------------------------------------------------------------

inline constexpr int height_digits = 9;

inline std::string newick_label(std::string_view label)
{
    const bool plain = !label.empty()
        && label.find_first_of(" \t\r\n()[]':;,") == std::string_view::npos;
    if (plain)
        return std::string(label);
    std::string out = "'";
    for (char c : label) {
        if (c == '\'')
            out += "''";
        else
            out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

/// Branch length = parent height - child height, 9 significant digits. Each
/// length is taken against the child height a reader recovers by summing the
/// printed lengths down the left-most path, so rounding does not accumulate.
inline std::string export_newick(const Dendrogram& d)
{
    validate(d);
    const std::size_t n = d.size();
    std::vector<double> recovered(n + d.merges.size(), 0.0);

    auto emit = [&](auto&& self, std::size_t id, std::string& out) -> void {
        if (id < n) {
            out += newick_label(d.leaves[id]);
            return;
        }
        const auto& m = d.merges[id - n];
        std::string left, right;
        self(self, m.left, left);
        self(self, m.right, right);
        const auto bl = text::format_significant(m.height - recovered[m.left], height_digits);
        const auto br = text::format_significant(m.height - recovered[m.right], height_digits);
        recovered[id] = recovered[m.left] + *text::parse_double(bl);
        out += "(" + left + ":" + bl + "," + right + ":" + br + ")";
    };
    std::string out;
    emit(emit, d.merges.back().id, out);
    out += ";";
    return out;
}

struct NewickNode {
    std::string label;
    double branch = 0.0;
    std::vector<NewickNode> children;
};

/// Minimal reader for the subset written by export_newick: quoted or bare
/// labels and branch lengths. Internal-node labels are accepted and kept.
inline NewickNode parse_newick(std::string_view src)
{
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos])))
            ++pos;
    };
    auto fail = [&](const std::string& what) -> NewickNode {
        throw DataError("newick parse error at offset " + std::to_string(pos) + ": " + what);
    };

    auto label = [&]() {
        std::string out;
        skip_ws();
        if (pos < src.size() && src[pos] == '\'') {
            ++pos;
            while (true) {
                if (pos >= src.size())
                    fail("unterminated quoted label");
                if (src[pos] == '\'') {
                    if (pos + 1 < src.size() && src[pos + 1] == '\'') {
                        out.push_back('\'');
                        pos += 2;
                        continue;
                    }
                    ++pos;
                    break;
                }
                out.push_back(src[pos++]);
            }
        } else {
            while (pos < src.size() && std::string_view("():;,").find(src[pos]) == std::string_view::npos
                   && !std::isspace(static_cast<unsigned char>(src[pos])))
                out.push_back(src[pos++]);
        }
        return out;
    };

    auto node = [&](auto&& self) -> NewickNode {
        NewickNode nd;
        skip_ws();
        if (pos < src.size() && src[pos] == '(') {
            ++pos;
            while (true) {
                nd.children.push_back(self(self));
                skip_ws();
                if (pos >= src.size())
                    fail("unexpected end of input");
                if (src[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (src[pos] == ')') {
                    ++pos;
                    break;
                }
                fail("expected ',' or ')'");
            }
        }
        nd.label = label();
        skip_ws();
        if (pos < src.size() && src[pos] == ':') {
            ++pos;
            skip_ws();
            const auto start = pos;
            while (pos < src.size() && std::string_view("(),;").find(src[pos]) == std::string_view::npos
                   && !std::isspace(static_cast<unsigned char>(src[pos])))
                ++pos;
            auto v = text::parse_double(src.substr(start, pos - start));
            if (!v)
                fail("bad branch length");
            nd.branch = *v;
        }
        if (nd.children.empty() && nd.label.empty())
            fail("leaf without a label");
        return nd;
    };

    NewickNode root = node(node);
    skip_ws();
    if (pos >= src.size() || src[pos] != ';')
        fail("missing terminating ';'");
    ++pos;
    skip_ws();
    if (pos != src.size())
        fail("trailing characters after ';'");
    return root;
}

/// Rebuilds merges from a parsed binary tree. Leaf labels are resolved
/// against `leaves`; node heights follow the left-most path to a leaf.
inline Dendrogram to_dendrogram(const NewickNode& root, const std::vector<std::string>& leaves)
{
    const std::size_t n = leaves.size();
    struct Pending {
        std::size_t left, right;
        double height;
        double sort_key; // max height over the subtree, keeps children first
    };
    std::vector<Pending> pending;
    std::vector<bool> seen(n, false);

    // Returns (temporary id, height); temporary internal ids are n + post-order index.
    auto walk = [&](auto&& self, const NewickNode& nd) -> std::pair<std::size_t, double> {
        if (nd.children.empty()) {
            auto it = std::find(leaves.begin(), leaves.end(), nd.label);
            if (it == leaves.end())
                throw DataError("newick leaf '" + nd.label + "' is not a known institution");
            const auto idx = static_cast<std::size_t>(it - leaves.begin());
            if (seen[idx])
                throw DataError("newick leaf '" + nd.label + "' appears twice");
            seen[idx] = true;
            return {idx, 0.0};
        }
        if (nd.children.size() != 2)
            throw DataError("newick tree is not binary");
        auto [l, lh] = self(self, nd.children[0]);
        auto [r, rh] = self(self, nd.children[1]);
        const double h = lh + nd.children[0].branch;
        auto key_of = [&](std::size_t id) { return id < n ? 0.0 : pending[id - n].sort_key; };
        pending.push_back({l, r, h, std::max({h, key_of(l), key_of(r)})});
        return {n + pending.size() - 1, h};
    };
    walk(walk, root);
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw DataError("newick tree does not contain every institution");

    // Children precede parents in post-order; a stable sort on the subtree
    // maximum keeps that even when rounded branch lengths tie.
    std::vector<std::size_t> order(pending.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pending[a].sort_key < pending[b].sort_key;
    });
    std::vector<std::size_t> remap(pending.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        remap[order[k]] = n + k;
    auto resolve = [&](std::size_t id) { return id < n ? id : remap[id - n]; };

    Dendrogram d;
    d.leaves = leaves;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& p = pending[order[k]];
        d.merges.push_back({resolve(p.left), resolve(p.right), p.height, n + k});
    }
    return d;
}

// ---- JSON --------------------------------------------------------------------

/// Lossless: heights are written in shortest round-trip form.
inline std::string export_dendrogram_json(const Dendrogram& d)
{
    validate(d);
    nlohmann::ordered_json doc;
    doc["leaves"] = d.leaves;
    auto merges = nlohmann::ordered_json::array();
    for (const auto& m : d.merges) {
        nlohmann::ordered_json o;
        o["left"] = m.left;
        o["right"] = m.right;
        o["height"] = m.height;
        o["id"] = m.id;
        merges.push_back(std::move(o));
    }
    doc["merges"] = std::move(merges);
    return doc.dump(2) + "\n";
}

inline Dendrogram read_dendrogram_json(std::string_view src)
{
    Dendrogram d;
    try {
        const auto doc = nlohmann::json::parse(src);
        d.leaves = doc.at("leaves").get<std::vector<std::string>>();
        for (const auto& o : doc.at("merges"))
            d.merges.push_back({o.at("left").get<std::size_t>(), o.at("right").get<std::size_t>(),
                                o.at("height").get<double>(), o.at("id").get<std::size_t>()});
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid dendrogram json: ") + e.what());
    }
    validate(d);
    return d;
}

} // namespace profilemap::clustering
