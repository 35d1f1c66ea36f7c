#pragma once

// Pajek, GraphML and DOT exports of a MapGraph, plus a minimal Pajek reader.

#include "profilemap/error.hpp"
#include "profilemap/mapgraph.hpp"
#include "profilemap/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace profilemap::mapgraph {

inline constexpr std::string_view pajek_color(Q1Class c)
{
    switch (c) {
    case Q1Class::gt50: return "Red";
    case Q1Class::b40_50: return "Orange";
    case Q1Class::b30_40: return "Yellow";
    case Q1Class::lt30: return "White";
    case Q1Class::unknown: return "Gray";
    }
    return "Gray";
}

/// Layout coordinates mapped into the unit square with one uniform scale
/// (aspect ratio kept); the shorter axis is centred.
inline std::vector<Point> unit_square_positions(const MapGraph& g)
{
    if (!g.has_layout())
        throw ArgumentError("graph has no layout");
    std::vector<Point> out(g.nodes.size(), Point{0.5, 0.5});
    if (g.nodes.empty())
        return out;
    Point lo = *g.nodes[0].position, hi = lo;
    for (const auto& n : g.nodes) {
        lo = {std::min(lo.x, n.position->x), std::min(lo.y, n.position->y)};
        hi = {std::max(hi.x, n.position->x), std::max(hi.y, n.position->y)};
    }
    const double w = hi.x - lo.x;
    const double h = hi.y - lo.y;
    const double extent = std::max(w, h);
    if (!(extent > 0.0))
        return out;
    const double pad_x = 0.5 * (1.0 - w / extent);
    const double pad_y = 0.5 * (1.0 - h / extent);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out[i] = {pad_x + (g.nodes[i].position->x - lo.x) / extent,
                  pad_y + (g.nodes[i].position->y - lo.y) / extent};
    return out;
}

inline std::string quote_backslash(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline constexpr int pajek_decimals = 6;

/// Pajek .net: 1-based vertex ids, unit-square coordinates, `ic` colour by
/// Q1 class, undirected edges weighted by similarity.
inline std::string export_pajek(const MapGraph& g)
{
    if (g.nodes.empty())
        return "*Vertices 0\n";
    const auto pos = unit_square_positions(g);
    std::string out = "*Vertices " + std::to_string(g.nodes.size()) + "\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        out += std::to_string(i + 1) + " " + quote_backslash(g.nodes[i].institution) + " "
            + text::format_fixed(pos[i].x, pajek_decimals) + " "
            + text::format_fixed(pos[i].y, pajek_decimals) + " ic "
            + std::string(pajek_color(g.nodes[i].q1_class)) + "\n";
    out += "*Edges\n";
    for (const auto& e : g.edges)
        out += std::to_string(e.i + 1) + " " + std::to_string(e.j + 1) + " "
            + text::format_fixed(e.similarity, pajek_decimals) + "\n";
    return out;
}

struct PajekVertex {
    std::size_t id = 0;
    std::string label;
    double x = 0.0, y = 0.0;
    std::string color;
};

struct PajekEdge {
    std::size_t i = 0, j = 0;
    double weight = 1.0;
};

struct PajekNetwork {
    std::vector<PajekVertex> vertices;
    std::vector<PajekEdge> edges;
};

/// Reads the subset of Pajek written by export_pajek (`*Vertices`, `*Edges`
/// and `*Arcs` sections; coordinates and `ic` optional).
inline PajekNetwork read_pajek(std::string_view src)
{
    PajekNetwork net;
    enum class Section { none, vertices, edges } section = Section::none;
    std::size_t declared = 0;
    std::size_t line_no = 0;
    std::istringstream in{std::string(src)};
    std::string line;
    auto fail = [&](const std::string& what) {
        throw DataError("pajek line " + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim_ascii(line);
        if (t.empty() || t.front() == '%')
            continue;
        if (t.front() == '*') {
            std::istringstream hs{std::string(t)};
            std::string kw;
            hs >> kw;
            std::transform(kw.begin(), kw.end(), kw.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (kw == "*vertices") {
                if (!(hs >> declared))
                    fail("missing vertex count");
                section = Section::vertices;
            } else if (kw == "*edges" || kw == "*arcs") {
                section = Section::edges;
            } else {
                fail("unsupported section " + kw);
            }
            continue;
        }

        std::size_t pos = 0;
        auto next_token = [&]() -> std::string {
            while (pos < t.size() && (t[pos] == ' ' || t[pos] == '\t'))
                ++pos;
            if (pos >= t.size())
                return {};
            std::string tok;
            if (t[pos] == '"') {
                ++pos;
                while (pos < t.size() && t[pos] != '"') {
                    if (t[pos] == '\\' && pos + 1 < t.size())
                        ++pos;
                    tok.push_back(t[pos++]);
                }
                if (pos >= t.size())
                    fail("unterminated label");
                ++pos;
                return tok;
            }
            while (pos < t.size() && t[pos] != ' ' && t[pos] != '\t')
                tok.push_back(t[pos++]);
            return tok;
        };

        if (section == Section::vertices) {
            PajekVertex v;
            auto id = text::parse_integer<std::size_t>(next_token());
            if (!id)
                fail("bad vertex id");
            v.id = *id;
            v.label = next_token();
            auto xs = next_token();
            if (!xs.empty()) {
                auto x = text::parse_double(xs);
                auto y = text::parse_double(next_token());
                if (!x || !y)
                    fail("bad coordinates");
                v.x = *x;
                v.y = *y;
            }
            for (auto tok = next_token(); !tok.empty(); tok = next_token())
                if (tok == "ic")
                    v.color = next_token();
            net.vertices.push_back(std::move(v));
        } else if (section == Section::edges) {
            auto i = text::parse_integer<std::size_t>(next_token());
            auto j = text::parse_integer<std::size_t>(next_token());
            if (!i || !j)
                fail("bad edge endpoints");
            PajekEdge e{*i, *j, 1.0};
            auto ws = next_token();
            if (!ws.empty()) {
                auto w = text::parse_double(ws);
                if (!w)
                    fail("bad edge weight");
                e.weight = *w;
            }
            net.edges.push_back(e);
        } else {
            fail("data before any section header");
        }
    }
    if (net.vertices.size() != declared)
        throw DataError("pajek declares " + std::to_string(declared) + " vertices but lists "
                        + std::to_string(net.vertices.size()));
    return net;
}

inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

inline constexpr int attribute_digits = 12;

inline std::string export_graphml(const MapGraph& g)
{
    const bool with_pos = !g.nodes.empty() && g.has_layout();
    std::vector<Point> pos;
    if (with_pos)
        pos = unit_square_positions(g);

    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\"\n"
        "    xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\"\n"
        "    xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns "
        "http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n"
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        "  <key id=\"ndocs\" for=\"node\" attr.name=\"ndocs\" attr.type=\"long\"/>\n"
        "  <key id=\"q1_class\" for=\"node\" attr.name=\"q1_class\" attr.type=\"string\"/>\n";
    if (with_pos)
        out += "  <key id=\"x\" for=\"node\" attr.name=\"x\" attr.type=\"double\"/>\n"
               "  <key id=\"y\" for=\"node\" attr.name=\"y\" attr.type=\"double\"/>\n";
    out += "  <key id=\"similarity\" for=\"edge\" attr.name=\"similarity\" attr.type=\"double\"/>\n"
           "  <key id=\"emphasized\" for=\"edge\" attr.name=\"emphasized\" attr.type=\"boolean\"/>\n"
           "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        out += "    <node id=\"n" + std::to_string(i) + "\">\n";
        out += "      <data key=\"label\">" + xml_escape(n.institution) + "</data>\n";
        out += "      <data key=\"ndocs\">" + std::to_string(n.ndocs) + "</data>\n";
        out += "      <data key=\"q1_class\">" + std::string(to_string(n.q1_class)) + "</data>\n";
        if (with_pos) {
            out += "      <data key=\"x\">" + text::format_fixed(pos[i].x, pajek_decimals) + "</data>\n";
            out += "      <data key=\"y\">" + text::format_fixed(pos[i].y, pajek_decimals) + "</data>\n";
        }
        out += "    </node>\n";
    }
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const auto& e = g.edges[k];
        out += "    <edge id=\"e" + std::to_string(k) + "\" source=\"n" + std::to_string(e.i)
            + "\" target=\"n" + std::to_string(e.j) + "\">\n";
        out += "      <data key=\"similarity\">"
            + text::format_significant(e.similarity, attribute_digits) + "</data>\n";
        out += std::string("      <data key=\"emphasized\">") + (e.emphasized ? "true" : "false")
            + "</data>\n";
        out += "    </edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

inline std::string export_dot(const MapGraph& g)
{
    const bool with_pos = !g.nodes.empty() && g.has_layout();
    std::vector<Point> pos;
    if (with_pos)
        pos = unit_square_positions(g);

    std::string out = "graph profilemap {\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const auto& n = g.nodes[i];
        out += "  n" + std::to_string(i) + " [label=" + quote_backslash(n.institution)
            + ", ndocs=" + std::to_string(n.ndocs) + ", q1_class=\""
            + std::string(to_string(n.q1_class)) + "\"";
        if (with_pos)
            out += ", x=" + text::format_fixed(pos[i].x, pajek_decimals)
                + ", y=" + text::format_fixed(pos[i].y, pajek_decimals);
        out += "];\n";
    }
    for (const auto& e : g.edges)
        out += "  n" + std::to_string(e.i) + " -- n" + std::to_string(e.j) + " [similarity="
            + text::format_significant(e.similarity, attribute_digits)
            + ", emphasized=" + (e.emphasized ? "true" : "false") + "];\n";
    out += "}\n";
    return out;
}

} // namespace profilemap::mapgraph
