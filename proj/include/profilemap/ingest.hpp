#pragma once

// Publication record ingestion, filtering and per-institution metadata.

#include "profilemap/error.hpp"
#include "profilemap/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace profilemap::ingest {

enum class DocType { article, review, note, letter, other };

inline constexpr std::string_view to_string(DocType t)
{
    switch (t) {
    case DocType::article: return "article";
    case DocType::review: return "review";
    case DocType::note: return "note";
    case DocType::letter: return "letter";
    case DocType::other: return "other";
    }
    return "other";
}

/// Maps a normalized doc_type string; unknown strings yield nullopt.
inline std::optional<DocType> doc_type_from_string(std::string_view s)
{
    static constexpr std::array<DocType, 5> all{DocType::article, DocType::review,
                                               DocType::note, DocType::letter,
                                               DocType::other};
    for (DocType t : all)
        if (to_string(t) == s)
            return t;
    return std::nullopt;
}

inline constexpr bool is_citable(DocType t) { return t != DocType::other; }

struct PublicationRecord {
    std::string institution;
    std::string journal;
    int year = 0;
    DocType doc_type = DocType::other;
    std::vector<std::string> categories; // sorted, unique
    bool is_q1 = false;

    friend bool operator==(const PublicationRecord&, const PublicationRecord&) = default;
};

struct Period {
    int start = 0;
    int end = 0;
    friend bool operator==(const Period&, const Period&) = default;
};

/// Immutable set of records with the institution set U and journal set J
/// derived from them, both in lexicographic order of normalized id.
class Corpus {
public:
    Corpus() = default;

    explicit Corpus(std::vector<PublicationRecord> records, std::optional<Period> period = {})
        : records_(std::move(records)), period_(period)
    {
        std::set<std::string> inst, jour;
        for (const auto& r : records_) {
            inst.insert(r.institution);
            jour.insert(r.journal);
        }
        institutions_.assign(inst.begin(), inst.end());
        journals_.assign(jour.begin(), jour.end());
    }

    const std::vector<PublicationRecord>& records() const noexcept { return records_; }
    const std::vector<std::string>& institutions() const noexcept { return institutions_; }
    const std::vector<std::string>& journals() const noexcept { return journals_; }
    const std::optional<Period>& period() const noexcept { return period_; }

    std::optional<std::size_t> institution_index(std::string_view id) const
    {
        return index_of(institutions_, id);
    }
    std::optional<std::size_t> journal_index(std::string_view id) const
    {
        return index_of(journals_, id);
    }

    friend bool operator==(const Corpus& a, const Corpus& b)
    {
        return a.records_ == b.records_ && a.period_ == b.period_;
    }

private:
    static std::optional<std::size_t> index_of(const std::vector<std::string>& v,
                                               std::string_view id)
    {
        auto it = std::lower_bound(v.begin(), v.end(), id);
        if (it == v.end() || *it != id)
            return std::nullopt;
        return static_cast<std::size_t>(it - v.begin());
    }

    std::vector<PublicationRecord> records_;
    std::vector<std::string> institutions_;
    std::vector<std::string> journals_;
    std::optional<Period> period_;
};

enum class Format { csv, jsonl };

/// Normalized raw name -> normalized canonical institution name.
using AliasTable = std::map<std::string, std::string, std::less<>>;

/// Field name -> normalized category ids.
using FieldMap = std::map<std::string, std::set<std::string>, std::less<>>;

struct ParseResult {
    Corpus corpus;
    std::size_t unknown_doc_types = 0; // rows whose doc_type fell back to `other`
};

inline constexpr std::array<std::string_view, 6> record_columns{
    "institution", "journal", "year", "doc_type", "categories", "is_q1"};

namespace detail {

    inline std::string resolve_institution(std::string id, const AliasTable* aliases)
    {
        if (aliases) {
            if (auto it = aliases->find(id); it != aliases->end())
                return it->second;
        }
        return id;
    }

    inline std::vector<std::string> normalize_categories(const std::vector<std::string>& raw)
    {
        std::set<std::string> cats;
        for (const auto& c : raw) {
            std::string id = text::normalize_id(c);
            if (!id.empty())
                cats.insert(std::move(id));
        }
        return {cats.begin(), cats.end()};
    }

    inline std::optional<bool> parse_flag(std::string_view s)
    {
        const auto t = text::normalize_id(s);
        if (t == "1" || t == "true")
            return true;
        if (t == "0" || t == "false")
            return false;
        return std::nullopt;
    }

    struct RawRow {
        std::string institution, journal, year, doc_type;
        std::vector<std::string> categories;
        std::string is_q1;
    };

    [[noreturn]] inline void row_error(std::size_t line, const std::string& what)
    {
        throw DataError("malformed record at row " + std::to_string(line) + ": " + what);
    }

    inline PublicationRecord build_record(const RawRow& raw, std::size_t line,
                                          const AliasTable* aliases, std::size_t& unknown)
    {
        PublicationRecord r;
        r.institution = resolve_institution(text::normalize_id(raw.institution), aliases);
        r.journal = text::normalize_id(raw.journal);
        if (r.institution.empty())
            row_error(line, "empty institution");
        if (r.journal.empty())
            row_error(line, "empty journal");

        auto year = text::parse_integer<int>(text::trim_ascii(raw.year));
        if (!year)
            row_error(line, "year is not an integer: '" + raw.year + "'");
        r.year = *year;

        if (auto t = doc_type_from_string(text::normalize_id(raw.doc_type))) {
            r.doc_type = *t;
        } else {
            r.doc_type = DocType::other;
            ++unknown;
        }

        r.categories = normalize_categories(raw.categories);

        auto flag = parse_flag(raw.is_q1);
        if (!flag)
            row_error(line, "is_q1 must be one of 0,1,true,false: '" + raw.is_q1 + "'");
        r.is_q1 = *flag;
        return r;
    }

    inline ParseResult parse_csv_records(std::string_view source, const AliasTable* aliases)
    {
        const auto rows = text::parse_csv(source);
        if (rows.empty())
            throw DataError("csv input has no header row");

        const auto& header = rows.front();
        std::array<std::size_t, record_columns.size()> col{};
        std::vector<bool> seen(header.fields.size(), false);
        for (std::size_t c = 0; c < record_columns.size(); ++c) {
            auto it = std::find_if(header.fields.begin(), header.fields.end(),
                                   [&](const std::string& h) {
                                       return text::trim_ascii(h) == record_columns[c];
                                   });
            if (it == header.fields.end())
                throw DataError("csv header is missing column '"
                                + std::string(record_columns[c]) + "'");
            col[c] = static_cast<std::size_t>(it - header.fields.begin());
            seen[col[c]] = true;
        }
        for (std::size_t c = 0; c < header.fields.size(); ++c)
            if (!seen[c])
                throw DataError("csv header has unexpected column '" + header.fields[c] + "'");

        std::vector<PublicationRecord> records;
        std::size_t unknown = 0;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.fields.size() != header.fields.size())
                row_error(row.line, "expected " + std::to_string(header.fields.size())
                                        + " fields, found "
                                        + std::to_string(row.fields.size()));
            RawRow raw{row.fields[col[0]], row.fields[col[1]], row.fields[col[2]],
                       row.fields[col[3]], {}, row.fields[col[5]]};
            if (!text::trim_ascii(row.fields[col[4]]).empty())
                raw.categories = text::split(row.fields[col[4]], ';');
            records.push_back(build_record(raw, row.line, aliases, unknown));
        }
        return {Corpus(std::move(records)), unknown};
    }

    inline std::string json_scalar(const nlohmann::json& v, std::size_t line, const char* key)
    {
        if (v.is_string())
            return v.get<std::string>();
        if (v.is_number_integer())
            return std::to_string(v.get<long long>());
        if (v.is_boolean())
            return v.get<bool>() ? "true" : "false";
        row_error(line, std::string("field '") + key + "' has unsupported type");
    }

    inline ParseResult parse_jsonl_records(std::string_view source, const AliasTable* aliases)
    {
        std::vector<PublicationRecord> records;
        std::size_t unknown = 0;
        std::size_t line = 0;
        std::size_t start = 0;
        while (start <= source.size()) {
            auto end = source.find('\n', start);
            if (end == std::string_view::npos)
                end = source.size();
            ++line;
            const auto text_line = text::trim_ascii(source.substr(start, end - start));
            start = end + 1;
            if (text_line.empty())
                continue;

            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(text_line);
            } catch (const nlohmann::json::exception& e) {
                row_error(line, e.what());
            }
            if (!obj.is_object())
                row_error(line, "expected a JSON object");
            for (auto key : record_columns)
                if (!obj.contains(std::string(key)))
                    row_error(line, "missing field '" + std::string(key) + "'");

            RawRow raw;
            raw.institution = json_scalar(obj["institution"], line, "institution");
            raw.journal = json_scalar(obj["journal"], line, "journal");
            raw.year = json_scalar(obj["year"], line, "year");
            raw.doc_type = json_scalar(obj["doc_type"], line, "doc_type");
            raw.is_q1 = json_scalar(obj["is_q1"], line, "is_q1");
            const auto& cats = obj["categories"];
            if (cats.is_array()) {
                for (const auto& c : cats) {
                    if (!c.is_string())
                        row_error(line, "categories must be strings");
                    raw.categories.push_back(c.get<std::string>());
                }
            } else if (cats.is_string()) {
                if (!text::trim_ascii(cats.get<std::string>()).empty())
                    raw.categories = text::split(cats.get<std::string>(), ';');
            } else if (!cats.is_null()) {
                row_error(line, "categories must be an array or a ';'-separated string");
            }
            records.push_back(build_record(raw, line, aliases, unknown));
        }
        return {Corpus(std::move(records)), unknown};
    }

} // namespace detail

/// Reads records from UTF-8 text. Identifiers are normalized (see
/// text::normalize_id) and institution names resolved through `aliases`.
inline ParseResult parse_records(std::string_view source, Format format,
                                 const AliasTable* aliases = nullptr)
{
    if (!text::is_valid_utf8(source))
        throw DataError("input is not valid UTF-8");
    return format == Format::csv ? detail::parse_csv_records(source, aliases)
                                 : detail::parse_jsonl_records(source, aliases);
}

/// Alias table CSV with header `raw_name,canonical_name`.
inline AliasTable parse_alias_table(std::string_view source)
{
    if (!text::is_valid_utf8(source))
        throw DataError("alias table is not valid UTF-8");
    const auto rows = text::parse_csv(source);
    if (rows.empty() || rows[0].fields.size() != 2
        || text::trim_ascii(rows[0].fields[0]) != "raw_name"
        || text::trim_ascii(rows[0].fields[1]) != "canonical_name")
        throw DataError("alias table header must be 'raw_name,canonical_name'");
    AliasTable table;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != 2)
            throw DataError("malformed alias row " + std::to_string(row.line));
        auto raw = text::normalize_id(row.fields[0]);
        auto canonical = text::normalize_id(row.fields[1]);
        if (raw.empty() || canonical.empty())
            throw DataError("empty name in alias row " + std::to_string(row.line));
        auto [it, inserted] = table.emplace(raw, canonical);
        if (!inserted && it->second != canonical)
            throw DataError("conflicting aliases for '" + raw + "'");
    }
    return table;
}

/// Field map JSON: `{ "field name": ["category", ...], ... }`. Field names
/// are kept verbatim; category names are normalized like record categories.
inline FieldMap parse_field_map(std::string_view source)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(source);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("field map is not valid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw DataError("field map must be a JSON object");
    FieldMap map;
    for (const auto& [name, cats] : doc.items()) {
        if (!cats.is_array())
            throw DataError("field '" + name + "' must map to an array of category names");
        auto& set = map[name];
        for (const auto& c : cats) {
            if (!c.is_string())
                throw DataError("field '" + name + "' contains a non-string category");
            set.insert(text::normalize_id(c.get<std::string>()));
        }
    }
    return map;
}

template <class Pred>
Corpus filter_records(const Corpus& corpus, Pred keep, std::optional<Period> period)
{
    std::vector<PublicationRecord> kept;
    for (const auto& r : corpus.records())
        if (keep(r))
            kept.push_back(r);
    return Corpus(std::move(kept), period);
}

/// Keeps articles, reviews, notes and letters.
inline Corpus filter_citable(const Corpus& corpus)
{
    return filter_records(
        corpus, [](const PublicationRecord& r) { return is_citable(r.doc_type); },
        corpus.period());
}

inline Corpus filter_period(const Corpus& corpus, int start, int end)
{
    if (start > end)
        throw ArgumentError("period start " + std::to_string(start) + " is after end "
                            + std::to_string(end));
    return filter_records(
        corpus, [=](const PublicationRecord& r) { return start <= r.year && r.year <= end; },
        Period{start, end});
}

/// Keeps records sharing at least one category with the named field.
inline Corpus filter_field(const Corpus& corpus, std::string_view field, const FieldMap& map)
{
    auto it = map.find(field);
    if (it == map.end())
        throw ArgumentError("unknown field '" + std::string(field) + "'");
    const auto& cats = it->second;
    return filter_records(
        corpus,
        [&](const PublicationRecord& r) {
            return std::any_of(r.categories.begin(), r.categories.end(),
                               [&](const std::string& c) { return cats.count(c) > 0; });
        },
        corpus.period());
}

/// Drops institutions with fewer than `min_docs` records (strict <).
inline Corpus apply_min_output(const Corpus& corpus, long long min_docs = 50)
{
    if (min_docs < 0)
        throw ArgumentError("min_docs must be non-negative");
    std::unordered_map<std::string, long long> counts;
    for (const auto& r : corpus.records())
        ++counts[r.institution];
    return filter_records(
        corpus,
        [&](const PublicationRecord& r) { return counts.at(r.institution) >= min_docs; },
        corpus.period());
}

struct InstitutionMeta {
    std::string id;
    std::size_t ndocs = 0;
    std::optional<double> q1_share; // absent when ndocs == 0
    // A record with k categories contributes k assignments, so the counts
    // may sum to more than ndocs.
    std::map<std::string, std::size_t> category_counts;

    friend bool operator==(const InstitutionMeta&, const InstitutionMeta&) = default;
};

inline std::vector<InstitutionMeta> institution_meta(const Corpus& corpus)
{
    std::vector<InstitutionMeta> meta(corpus.institutions().size());
    std::vector<std::size_t> q1(meta.size(), 0);
    for (std::size_t i = 0; i < meta.size(); ++i)
        meta[i].id = corpus.institutions()[i];
    for (const auto& r : corpus.records()) {
        const auto i = *corpus.institution_index(r.institution);
        ++meta[i].ndocs;
        if (r.is_q1)
            ++q1[i];
        for (const auto& c : r.categories)
            ++meta[i].category_counts[c];
    }
    for (std::size_t i = 0; i < meta.size(); ++i)
        if (meta[i].ndocs > 0)
            meta[i].q1_share = static_cast<double>(q1[i]) / static_cast<double>(meta[i].ndocs);
    return meta;
}

/// Category counts divided by the institution's total category assignments.
inline std::map<std::string, double> category_profile(const InstitutionMeta& meta)
{
    std::size_t total = 0;
    for (const auto& [cat, n] : meta.category_counts)
        total += n;
    std::map<std::string, double> profile;
    if (total == 0)
        return profile;
    for (const auto& [cat, n] : meta.category_counts)
        profile[cat] = static_cast<double>(n) / static_cast<double>(total);
    return profile;
}

inline std::map<std::string, double> category_profile(const Corpus& corpus,
                                                      std::string_view institution)
{
    auto idx = corpus.institution_index(institution);
    if (!idx)
        throw ArgumentError("unknown institution '" + std::string(institution) + "'");
    InstitutionMeta meta;
    meta.id = std::string(institution);
    for (const auto& r : corpus.records())
        if (r.institution == institution)
            for (const auto& c : r.categories)
                ++meta.category_counts[c];
    return category_profile(meta);
}

// ---- metadata files --------------------------------------------------------

inline std::string write_meta_csv(const std::vector<InstitutionMeta>& meta)
{
    std::string out = "institution,ndocs,q1_share\n";
    for (const auto& m : meta) {
        out += text::csv_field(m.id) + "," + std::to_string(m.ndocs) + ",";
        if (m.q1_share)
            out += text::format_exact(*m.q1_share);
        out += "\n";
    }
    return out;
}

inline std::string write_category_counts_csv(const std::vector<InstitutionMeta>& meta)
{
    std::string out = "institution,category,count\n";
    for (const auto& m : meta)
        for (const auto& [cat, n] : m.category_counts)
            out += text::csv_field(m.id) + "," + text::csv_field(cat) + ","
                + std::to_string(n) + "\n";
    return out;
}

/// Reads `institution,ndocs,q1_share` (and optionally merges category counts).
inline std::vector<InstitutionMeta> read_meta_csv(std::string_view source)
{
    const auto rows = text::parse_csv(source);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"institution", "ndocs", "q1_share"})
        throw DataError("institution metadata header must be 'institution,ndocs,q1_share'");
    std::vector<InstitutionMeta> meta;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        if (f.size() != 3)
            throw DataError("malformed metadata row " + std::to_string(rows[r].line));
        InstitutionMeta m;
        m.id = f[0];
        auto nd = text::parse_integer<std::size_t>(f[1]);
        if (!nd)
            throw DataError("bad ndocs on metadata row " + std::to_string(rows[r].line));
        m.ndocs = *nd;
        if (!f[2].empty()) {
            auto q = text::parse_double(f[2]);
            if (!q || *q < 0.0 || *q > 1.0)
                throw DataError("bad q1_share on metadata row " + std::to_string(rows[r].line));
            m.q1_share = *q;
        }
        meta.push_back(std::move(m));
    }
    return meta;
}

inline void read_category_counts_csv(std::string_view source, std::vector<InstitutionMeta>& meta)
{
    const auto rows = text::parse_csv(source);
    if (rows.empty() || rows[0].fields != std::vector<std::string>{"institution", "category", "count"})
        throw DataError("category count header must be 'institution,category,count'");
    std::map<std::string, InstitutionMeta*, std::less<>> by_id;
    for (auto& m : meta)
        by_id[m.id] = &m;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        auto n = f.size() == 3 ? text::parse_integer<std::size_t>(f[2]) : std::nullopt;
        if (!n)
            throw DataError("malformed category count row " + std::to_string(rows[r].line));
        auto it = by_id.find(f[0]);
        if (it == by_id.end())
            throw DataError("category counts name unknown institution '" + f[0] + "'");
        it->second->category_counts[f[1]] = *n;
    }
}

} // namespace profilemap::ingest
