#pragma once

// Journal-by-institution frequency counts and inverse-institution-frequency
// journal weights.

#include "profilemap/error.hpp"
#include "profilemap/ingest.hpp"
#include "profilemap/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace profilemap::weighting {

enum class LogBase { natural, base10 };

inline constexpr std::string_view to_string(LogBase b)
{
    return b == LogBase::natural ? "natural" : "10";
}

template <class Value>
struct SparseEntry {
    std::size_t journal; // row index into journals
    Value value;
    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// freq_{m,i} stored per institution column, entries ascending by journal.
/// Absent entries are zero.
struct FreqMatrix {
    std::vector<std::string> journals;
    std::vector<std::string> institutions;
    std::vector<std::vector<SparseEntry<std::size_t>>> columns;
    std::vector<std::size_t> journal_institution_counts; // n_m

    std::size_t n_journals() const noexcept { return journals.size(); }
    std::size_t n_institutions() const noexcept { return institutions.size(); }

    std::size_t at(std::size_t journal, std::size_t institution) const
    {
        for (const auto& e : columns.at(institution))
            if (e.journal == journal)
                return e.value;
        return 0;
    }
};

/// w_{m,i}, column i being the journal vector of institution i. Rows of
/// journals used by every institution are elided.
struct WeightMatrix {
    std::vector<std::string> journals;
    std::vector<std::string> institutions;
    std::vector<std::vector<SparseEntry<double>>> columns;
    LogBase log_base = LogBase::natural;

    std::size_t n_journals() const noexcept { return journals.size(); }
    std::size_t n_institutions() const noexcept { return institutions.size(); }

    double at(std::size_t journal, std::size_t institution) const
    {
        for (const auto& e : columns.at(institution))
            if (e.journal == journal)
                return e.value;
        return 0.0;
    }
};

inline FreqMatrix count_frequencies(const ingest::Corpus& corpus)
{
    if (corpus.institutions().empty() || corpus.journals().empty())
        throw ArgumentError("cannot count frequencies of an empty corpus");

    FreqMatrix f;
    f.journals = corpus.journals();
    f.institutions = corpus.institutions();
    f.columns.resize(f.institutions.size());
    f.journal_institution_counts.assign(f.journals.size(), 0);

    std::vector<std::map<std::size_t, std::size_t>> tally(f.institutions.size());
    for (const auto& r : corpus.records())
        ++tally[*corpus.institution_index(r.institution)][*corpus.journal_index(r.journal)];

    for (std::size_t i = 0; i < tally.size(); ++i) {
        for (const auto& [m, n] : tally[i]) {
            f.columns[i].push_back({m, n});
            ++f.journal_institution_counts[m];
        }
    }
    return f;
}

/// log(N / n_m) in the requested base; exactly 0 when n_m == N.
inline double inverse_frequency(std::size_t n_m, std::size_t n, LogBase base = LogBase::natural)
{
    if (n_m < 1 || n_m > n)
        throw ArgumentError("inverse frequency needs 1 <= n_m <= N (n_m = "
                            + std::to_string(n_m) + ", N = " + std::to_string(n) + ")");
    if (n_m == n)
        return 0.0;
    const double ratio = static_cast<double>(n) / static_cast<double>(n_m);
    return base == LogBase::natural ? std::log(ratio) : std::log10(ratio);
}

inline WeightMatrix compute_weights(const FreqMatrix& freq, LogBase base = LogBase::natural)
{
    WeightMatrix w;
    w.journals = freq.journals;
    w.institutions = freq.institutions;
    w.log_base = base;
    w.columns.resize(freq.columns.size());

    const std::size_t n = freq.n_institutions();
    std::vector<double> idf(freq.n_journals());
    for (std::size_t m = 0; m < idf.size(); ++m)
        idf[m] = freq.journal_institution_counts[m] == 0
            ? 0.0
            : inverse_frequency(freq.journal_institution_counts[m], n, base);

    for (std::size_t i = 0; i < freq.columns.size(); ++i)
        for (const auto& e : freq.columns[i])
            if (idf[e.journal] != 0.0)
                w.columns[i].push_back({e.journal, static_cast<double>(e.value) * idf[e.journal]});
    return w;
}

inline double column_norm(const WeightMatrix& w, std::size_t institution)
{
    double sum = 0.0;
    for (const auto& e : w.columns.at(institution))
        sum += e.value * e.value;
    return std::sqrt(sum);
}

/// Institutions whose weight vector is identically zero.
inline std::vector<std::string> zero_norm_institutions(const WeightMatrix& w)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < w.columns.size(); ++i)
        if (w.columns[i].empty())
            out.push_back(w.institutions[i]);
    return out;
}

/// Removes the named institutions; journal rows and the remaining weights are
/// left untouched.
inline WeightMatrix drop_institutions(const WeightMatrix& w, const std::vector<std::string>& ids)
{
    WeightMatrix out;
    out.journals = w.journals;
    out.log_base = w.log_base;
    for (std::size_t i = 0; i < w.institutions.size(); ++i) {
        if (std::find(ids.begin(), ids.end(), w.institutions[i]) != ids.end())
            continue;
        out.institutions.push_back(w.institutions[i]);
        out.columns.push_back(w.columns[i]);
    }
    return out;
}

namespace detail {
    template <class Matrix, class Fmt>
    std::string triplets(const Matrix& mat, Fmt fmt)
    {
        std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::string>> rows;
        for (std::size_t i = 0; i < mat.columns.size(); ++i)
            for (const auto& e : mat.columns[i])
                rows.push_back({{e.journal, i}, fmt(e.value)});
        std::sort(rows.begin(), rows.end());
        std::string out = "journal,institution,value\n";
        for (const auto& [key, value] : rows)
            out += text::csv_field(mat.journals[key.first]) + ","
                + text::csv_field(mat.institutions[key.second]) + "," + value + "\n";
        return out;
    }
} // namespace detail

/// Sparse triplet CSV sorted by (journal, institution).
inline std::string write_triplets(const FreqMatrix& f)
{
    return detail::triplets(f, [](std::size_t v) { return std::to_string(v); });
}

/// Values use the shortest round-trip decimal form so that reading the file
/// back reproduces the weights bit for bit.
inline std::string write_triplets(const WeightMatrix& w)
{
    return detail::triplets(w, [](double v) { return text::format_exact(v); });
}

/// Rebuilds a weight matrix from triplets. `institutions` fixes column order;
/// institutions without triplets get empty (zero) columns.
inline WeightMatrix read_weight_triplets(std::string_view source,
                                         const std::vector<std::string>& institutions,
                                         LogBase base = LogBase::natural)
{
    const auto rows = text::parse_csv(source);
    if (rows.empty()
        || rows[0].fields != std::vector<std::string>{"journal", "institution", "value"})
        throw DataError("weight triplet header must be 'journal,institution,value'");

    std::map<std::string, std::size_t, std::less<>> inst_index;
    for (std::size_t i = 0; i < institutions.size(); ++i)
        inst_index[institutions[i]] = i;

    std::set<std::string> journal_set;
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (!rows[r].fields.empty())
            journal_set.insert(rows[r].fields[0]);

    WeightMatrix w;
    w.journals.assign(journal_set.begin(), journal_set.end());
    w.institutions = institutions;
    w.log_base = base;
    w.columns.resize(institutions.size());

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        const auto where = " on triplet row " + std::to_string(rows[r].line);
        if (f.size() != 3)
            throw DataError("malformed weight triplet" + where);
        auto it = inst_index.find(f[1]);
        if (it == inst_index.end())
            throw DataError("weight triplet names unknown institution '" + f[1] + "'" + where);
        auto v = text::parse_double(f[2]);
        if (!v || !std::isfinite(*v) || *v < 0.0)
            throw DataError("weight must be a finite non-negative number" + where);
        const auto m = static_cast<std::size_t>(
            std::lower_bound(w.journals.begin(), w.journals.end(), f[0]) - w.journals.begin());
        auto& col = w.columns[it->second];
        if (!col.empty() && col.back().journal >= m)
            throw DataError("weight triplets must be sorted by (journal, institution) without duplicates"
                            + where);
        if (*v != 0.0)
            col.push_back({m, *v});
    }
    // Rows are sorted by journal first, so each column is already ascending;
    // the check above rejects out-of-order input within a column.
    return w;
}

} // namespace profilemap::weighting
