#pragma once

// First- and second-order cosine similarity between institutions, and the
// dissimilarity transform consumed by clustering.

#include "profilemap/error.hpp"
#include "profilemap/text.hpp"
#include "profilemap/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

namespace profilemap::similarity {

enum class Order { first, second };

/// Dense symmetric N x N matrix, row-major, institution order as given.
struct SimilarityMatrix {
    Order order = Order::first;
    std::vector<std::string> institutions;
    std::vector<double> values;

    std::size_t size() const noexcept { return institutions.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

struct DissimilarityMatrix {
    Order derived_from = Order::second;
    std::vector<std::string> institutions;
    std::vector<double> values;

    std::size_t size() const noexcept { return institutions.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

namespace detail {

    // Fills the upper triangle with cell(i, j) and mirrors it. Rows are
    // dealt round-robin to threads; every cell is computed by exactly one
    // thread with a fixed summation order, so results do not depend on the
    // thread count.
    template <class Cell>
    std::vector<double> fill_symmetric(std::size_t n, unsigned threads, Cell cell)
    {
        std::vector<double> v(n * n, 0.0);
        auto work = [&](unsigned t, unsigned stride) {
            for (std::size_t i = t; i < n; i += stride) {
                v[i * n + i] = 1.0;
                for (std::size_t j = i + 1; j < n; ++j)
                    v[i * n + j] = cell(i, j);
            }
        };
        threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
        if (threads == 1) {
            work(0, 1);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back(work, t, threads);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                v[j * n + i] = v[i * n + j];
        return v;
    }

    inline double sparse_dot(const std::vector<weighting::SparseEntry<double>>& a,
                             const std::vector<weighting::SparseEntry<double>>& b)
    {
        double sum = 0.0;
        auto ia = a.begin();
        auto ib = b.begin();
        while (ia != a.end() && ib != b.end()) {
            if (ia->journal < ib->journal) {
                ++ia;
            } else if (ib->journal < ia->journal) {
                ++ib;
            } else {
                sum += ia->value * ib->value;
                ++ia;
                ++ib;
            }
        }
        return sum;
    }

} // namespace detail

/// Cosine between institution journal-weight vectors. Every column must have
/// a nonzero norm; see weighting::zero_norm_institutions.
inline SimilarityMatrix first_order(const weighting::WeightMatrix& weights, unsigned threads = 1)
{
    const auto zero = weighting::zero_norm_institutions(weights);
    if (!zero.empty()) {
        std::string names;
        for (const auto& z : zero)
            names += (names.empty() ? "" : ", ") + z;
        throw DataError("institutions with an all-zero journal weight vector: " + names);
    }

    const std::size_t n = weights.n_institutions();
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i)
        sq[i] = detail::sparse_dot(weights.columns[i], weights.columns[i]);

    SimilarityMatrix b;
    b.order = Order::first;
    b.institutions = weights.institutions;
    b.values = detail::fill_symmetric(n, threads, [&](std::size_t i, std::size_t j) {
        return detail::sparse_dot(weights.columns[i], weights.columns[j]) / std::sqrt(sq[i] * sq[j]);
    });
    return b;
}

/// Cosine between columns of the first-order matrix, summing over every
/// institution k including k = i and k = j.
inline SimilarityMatrix second_order(const SimilarityMatrix& first, unsigned threads = 1)
{
    if (first.order != Order::first)
        throw ArgumentError("second_order expects a first-order similarity matrix");
    const std::size_t n = first.size();
    std::vector<double> sq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            sq[i] += first.at(k, i) * first.at(k, i);

    SimilarityMatrix s;
    s.order = Order::second;
    s.institutions = first.institutions;
    s.values = detail::fill_symmetric(n, threads, [&](std::size_t i, std::size_t j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            sum += first.at(k, i) * first.at(k, j);
        return sum / std::sqrt(sq[i] * sq[j]);
    });
    return s;
}

inline constexpr double range_tolerance = 1e-9;

/// d = 1 - s with the diagonal forced to 0. Values within tolerance of the
/// unit interval are clamped into it.
inline DissimilarityMatrix to_dissimilarity(const SimilarityMatrix& s)
{
    DissimilarityMatrix d;
    d.derived_from = s.order;
    d.institutions = s.institutions;
    d.values.resize(s.values.size());
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = s.at(i, j);
            if (!(v >= -range_tolerance && v <= 1.0 + range_tolerance))
                throw ConsistencyError("similarity (" + s.institutions[i] + ", "
                                       + s.institutions[j] + ") = " + text::format_exact(v)
                                       + " is outside [0, 1]");
            d.values[i * n + j] = i == j ? 0.0 : std::clamp(1.0 - v, 0.0, 1.0);
        }
    }
    return d;
}

// ---- CSV ---------------------------------------------------------------------

inline constexpr int csv_digits = 12;

/// Full symmetric matrix with a header row and a leading column of ids.
inline std::string write_matrix_csv(const std::vector<std::string>& ids,
                                    const std::vector<double>& values)
{
    std::string out = "institution";
    for (const auto& id : ids)
        out += "," + text::csv_field(id);
    out += "\n";
    const std::size_t n = ids.size();
    for (std::size_t i = 0; i < n; ++i) {
        out += text::csv_field(ids[i]);
        for (std::size_t j = 0; j < n; ++j)
            out += "," + text::format_significant(values[i * n + j], csv_digits);
        out += "\n";
    }
    return out;
}

inline std::string write_matrix_csv(const SimilarityMatrix& s)
{
    return write_matrix_csv(s.institutions, s.values);
}

inline std::string write_matrix_csv(const DissimilarityMatrix& d)
{
    return write_matrix_csv(d.institutions, d.values);
}

struct MatrixCsv {
    std::vector<std::string> ids;
    std::vector<double> values;
};

inline MatrixCsv read_matrix_csv(std::string_view source)
{
    const auto rows = text::parse_csv(source);
    if (rows.empty() || rows[0].fields.empty() || rows[0].fields[0] != "institution")
        throw DataError("matrix csv must start with an 'institution' header cell");
    MatrixCsv m;
    m.ids.assign(rows[0].fields.begin() + 1, rows[0].fields.end());
    const std::size_t n = m.ids.size();
    if (rows.size() != n + 1)
        throw DataError("matrix csv is not square: " + std::to_string(n) + " columns, "
                        + std::to_string(rows.size() - 1) + " rows");
    m.values.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = rows[i + 1].fields;
        const auto where = " on matrix row " + std::to_string(rows[i + 1].line);
        if (f.size() != n + 1)
            throw DataError("wrong number of cells" + where);
        if (f[0] != m.ids[i])
            throw DataError("row label '" + f[0] + "' does not match column '" + m.ids[i] + "'"
                            + where);
        for (std::size_t j = 0; j < n; ++j) {
            auto v = text::parse_double(f[j + 1]);
            if (!v || !std::isfinite(*v))
                throw DataError("non-numeric cell" + where);
            m.values[i * n + j] = *v;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m.values[i * n + j] != m.values[j * n + i])
                throw ConsistencyError("matrix csv is not symmetric at (" + m.ids[i] + ", "
                                       + m.ids[j] + ")");
    return m;
}

inline SimilarityMatrix read_similarity_csv(std::string_view source, Order order)
{
    auto m = read_matrix_csv(source);
    return {order, std::move(m.ids), std::move(m.values)};
}

inline DissimilarityMatrix read_dissimilarity_csv(std::string_view source,
                                                  Order derived_from = Order::second)
{
    auto m = read_matrix_csv(source);
    return {derived_from, std::move(m.ids), std::move(m.values)};
}

} // namespace profilemap::similarity
