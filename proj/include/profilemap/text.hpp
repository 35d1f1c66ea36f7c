#pragma once

// Shared text plumbing: CSV reading/writing, number formatting, identifier
// normalization and whole-file IO.

#include "profilemap/error.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace profilemap::text {

struct CsvRow {
    std::size_t line = 0; // 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader. Accepts LF or CRLF, quoted fields with doubled quotes and
/// embedded newlines. Blank lines are skipped.
inline std::vector<CsvRow> parse_csv(std::string_view src)
{
    std::vector<CsvRow> rows;
    std::size_t pos = 0;
    std::size_t line = 1;
    const std::size_t n = src.size();

    while (pos < n) {
        CsvRow row;
        row.line = line;
        std::string field;
        bool in_quotes = false;
        bool field_was_quoted = false;
        bool row_done = false;

        while (!row_done) {
            if (pos >= n) {
                if (in_quotes)
                    throw DataError("unterminated quoted field starting on line "
                                    + std::to_string(row.line));
                row.fields.push_back(std::move(field));
                break;
            }
            const char c = src[pos];
            if (in_quotes) {
                if (c == '"') {
                    if (pos + 1 < n && src[pos + 1] == '"') {
                        field.push_back('"');
                        pos += 2;
                    } else {
                        in_quotes = false;
                        ++pos;
                    }
                } else {
                    if (c == '\n')
                        ++line;
                    field.push_back(c);
                    ++pos;
                }
                continue;
            }
            switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted)
                    throw DataError("stray quote in unquoted field on line "
                                    + std::to_string(line));
                in_quotes = true;
                field_was_quoted = true;
                ++pos;
                break;
            case ',':
                row.fields.push_back(std::move(field));
                field.clear();
                field_was_quoted = false;
                ++pos;
                break;
            case '\r':
                ++pos;
                break;
            case '\n':
                row.fields.push_back(std::move(field));
                ++pos;
                ++line;
                row_done = true;
                break;
            default:
                if (field_was_quoted)
                    throw DataError("text after closing quote on line "
                                    + std::to_string(line));
                field.push_back(c);
                ++pos;
            }
        }

        const bool blank = row.fields.size() == 1 && row.fields[0].empty();
        if (!blank)
            rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string csv_field(std::string_view value)
{
    const bool needs_quotes = value.find_first_of(",\"\r\n") != std::string_view::npos
        || (!value.empty() && (value.front() == ' ' || value.back() == ' '));
    if (!needs_quotes)
        return std::string(value);
    std::string out = "\"";
    for (char c : value) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_exact(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

inline std::string format_significant(double value, int digits)
{
    if (value == 0.0)
        value = 0.0; // no "-0"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

inline std::string format_fixed(double value, int decimals)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s = buf;
    // "-0.000000" would make exports depend on the sign of a rounded zero.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> parse_integer(std::string_view s)
{
    Int v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

inline std::string_view trim_ascii(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = s.find(sep, start);
        parts.emplace_back(s.substr(start, at - start));
        if (at == std::string_view::npos)
            break;
        start = at + 1;
    }
    return parts;
}

inline bool is_valid_utf8(std::string_view s)
{
    UErrorCode status = U_ZERO_ERROR;
    int32_t needed = 0;
    u_strFromUTF8(nullptr, 0, &needed, s.data(), static_cast<int32_t>(s.size()), &status);
    return status == U_ZERO_ERROR || status == U_BUFFER_OVERFLOW_ERROR
        || status == U_STRING_NOT_TERMINATED_WARNING;
}

/// Canonical identifier form: NFC, Unicode case folding, whitespace runs
/// collapsed to one ASCII space, leading/trailing whitespace removed.
inline std::string normalize_id(std::string_view raw)
{
    icu::UnicodeString s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    s.foldCase();

    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status))
        throw ConsistencyError("ICU NFC normalizer unavailable");
    icu::UnicodeString folded = nfc->normalize(s, status);
    if (U_FAILURE(status))
        throw DataError("cannot normalize identifier");

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < folded.length();) {
        const UChar32 cp = folded.char32At(i);
        i += U16_LENGTH(cp);
        if (u_isUWhiteSpace(cp)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !collapsed.isEmpty())
            collapsed.append(static_cast<UChar>(' '));
        pending_space = false;
        collapsed.append(cp);
    }
    std::string out;
    collapsed.toUTF8String(out);
    return out;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open file: " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::string_view content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ArgumentError("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw ArgumentError("write failed: " + path.string());
}

} // namespace profilemap::text
