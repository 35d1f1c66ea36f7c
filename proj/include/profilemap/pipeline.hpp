#pragma once

// End-to-end mapping procedure: ingest -> weights -> first/second-order
// similarity -> complete-linkage dendrogram -> thresholded map. Stages hand
// off through files in one output directory, so running the stages one by
// one produces the same bytes as a full run.

#include "profilemap/clustering.hpp"
#include "profilemap/error.hpp"
#include "profilemap/graph_io.hpp"
#include "profilemap/ingest.hpp"
#include "profilemap/layout.hpp"
#include "profilemap/mapgraph.hpp"
#include "profilemap/similarity.hpp"
#include "profilemap/text.hpp"
#include "profilemap/weighting.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace profilemap::pipeline {

namespace fs = std::filesystem;

inline constexpr std::string_view version = "1.0.0";

namespace files {
    inline constexpr std::string_view meta = "institutions.csv";
    inline constexpr std::string_view categories = "category_counts.csv";
    inline constexpr std::string_view weights = "weights.csv";
    inline constexpr std::string_view first_order = "similarity_first.csv";
    inline constexpr std::string_view second_order = "similarity_second.csv";
    inline constexpr std::string_view dissimilarity = "dissimilarity.csv";
    inline constexpr std::string_view newick = "dendrogram.nwk";
    inline constexpr std::string_view dendrogram_json = "dendrogram.json";
    inline constexpr std::string_view pajek = "map.net";
    inline constexpr std::string_view graphml = "map.graphml";
    inline constexpr std::string_view dot = "map.dot";
    inline constexpr std::string_view profile = "profile.csv";
    inline constexpr std::string_view manifest = "manifest.json";
} // namespace files

enum class ExportFormat { pajek, graphml, dot, newick, json };
using ExportSet = std::set<ExportFormat>;

inline constexpr std::array<std::pair<ExportFormat, std::string_view>, 5> export_names{{
    {ExportFormat::pajek, "pajek"},
    {ExportFormat::graphml, "graphml"},
    {ExportFormat::dot, "dot"},
    {ExportFormat::newick, "newick"},
    {ExportFormat::json, "json"},
}};

inline ExportSet all_exports()
{
    ExportSet s;
    for (const auto& [f, name] : export_names)
        s.insert(f);
    return s;
}

inline ExportFormat export_from_string(std::string_view s)
{
    for (const auto& [f, name] : export_names)
        if (name == s)
            return f;
    throw ArgumentError("unknown export format '" + std::string(s) + "'");
}

inline std::string_view to_string(ExportFormat f)
{
    for (const auto& [g, name] : export_names)
        if (g == f)
            return name;
    return "?";
}

struct IngestConfig {
    fs::path input;
    ingest::Format format = ingest::Format::csv;
    std::optional<ingest::Period> period;
    std::optional<std::string> field;
    std::optional<fs::path> field_map;
    std::optional<fs::path> aliases;
    long long min_docs = 50;
    weighting::LogBase log_base = weighting::LogBase::natural;
};

struct MapConfig {
    double threshold = mapgraph::default_threshold;
    double emphasis = mapgraph::default_emphasis;
    mapgraph::LayoutOptions layout;
};

struct PipelineConfig {
    IngestConfig ingest;
    MapConfig map;
    fs::path out_dir;
    ExportSet exports = all_exports();
    unsigned threads = 1;
};

inline void validate(const IngestConfig& c)
{
    if (c.input.empty())
        throw ArgumentError("no input file given");
    if (c.min_docs < 0)
        throw ArgumentError("min_docs must be non-negative");
    if (c.period && c.period->start > c.period->end)
        throw ArgumentError("period start is after period end");
    if (c.field.has_value() != c.field_map.has_value())
        throw ArgumentError("--field and --field-map must be given together");
}

inline void validate(const MapConfig& c)
{
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0))
        throw ArgumentError("threshold must lie in [0, 1]");
    if (!(c.threshold <= c.emphasis))
        throw ArgumentError("threshold must not exceed the emphasis threshold");
    if (!(c.layout.tol > 0.0))
        throw ArgumentError("layout tolerance must be positive");
}

/// Creates the directory if needed and checks that files can be created in it.
inline void ensure_writable_dir(const fs::path& dir)
{
    if (dir.empty())
        throw ArgumentError("no output directory given");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ArgumentError("cannot create output directory " + dir.string());
    const auto probe = dir / ".profilemap-write-probe";
    {
        std::FILE* f = std::fopen(probe.string().c_str(), "wb");
        if (!f)
            throw ArgumentError("output directory is not writable: " + dir.string());
        std::fclose(f);
    }
    fs::remove(probe, ec);
}

inline void validate(const PipelineConfig& c)
{
    validate(c.ingest);
    validate(c.map);
    ensure_writable_dir(c.out_dir);
}

inline std::string sha256_hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw ConsistencyError("sha256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

struct Artifact {
    std::string file;
    std::size_t bytes = 0;
    std::string sha256;
};

/// Writes artifacts into one directory. Unless commit() is called, every
/// file written through it is deleted on destruction.
class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}
    ArtifactWriter(const ArtifactWriter&) = delete;
    ArtifactWriter& operator=(const ArtifactWriter&) = delete;

    ~ArtifactWriter()
    {
        if (committed_)
            return;
        std::error_code ec;
        for (const auto& a : written_)
            fs::remove(dir_ / a.file, ec);
    }

    void write(std::string_view name, std::string_view content)
    {
        text::write_file(dir_ / name, content);
        written_.push_back({std::string(name), content.size(), sha256_hex(content)});
    }

    void commit() noexcept { committed_ = true; }

    const fs::path& dir() const noexcept { return dir_; }
    const std::vector<Artifact>& written() const noexcept { return written_; }

private:
    fs::path dir_;
    std::vector<Artifact> written_;
    bool committed_ = false;
};

/// Counters and notes collected while running stages.
struct Summary {
    nlohmann::ordered_json data = nlohmann::ordered_json::object();
    std::vector<std::string> warnings;
};

inline std::string read_upstream(const fs::path& dir, std::string_view name, std::string_view producer)
{
    const auto path = dir / name;
    if (!fs::exists(path))
        throw DataError("missing upstream artifact " + path.string() + " (produced by `profilemap "
                        + std::string(producer) + "`)");
    return text::read_file(path);
}

template <class Fn>
auto in_stage(std::string_view stage, Fn&& fn)
{
    try {
        return fn();
    } catch (Error& e) {
        if (e.stage().empty())
            e.set_stage(std::string(stage));
        throw;
    }
}

// ---- stages ------------------------------------------------------------------

/// Records -> institution metadata, category counts and weight triplets.
inline void stage_ingest(const IngestConfig& cfg, ArtifactWriter& out, Summary& summary)
{
    in_stage("ingest", [&] {
        validate(cfg);
        std::optional<ingest::AliasTable> aliases;
        if (cfg.aliases)
            aliases = ingest::parse_alias_table(text::read_file(*cfg.aliases));

        auto parsed = ingest::parse_records(text::read_file(cfg.input), cfg.format,
                                            aliases ? &*aliases : nullptr);
        auto& s = summary.data;
        s["records_read"] = parsed.corpus.records().size();
        s["unknown_doc_types"] = parsed.unknown_doc_types;
        if (parsed.unknown_doc_types > 0)
            summary.warnings.push_back(std::to_string(parsed.unknown_doc_types)
                                       + " record(s) had an unknown doc_type and were treated as 'other'");

        ingest::Corpus corpus = std::move(parsed.corpus);
        if (cfg.period)
            corpus = ingest::filter_period(corpus, cfg.period->start, cfg.period->end);
        corpus = ingest::filter_citable(corpus);
        if (cfg.field) {
            const auto map = ingest::parse_field_map(text::read_file(*cfg.field_map));
            corpus = ingest::filter_field(corpus, *cfg.field, map);
        }
        s["records_citable"] = corpus.records().size();
        corpus = ingest::apply_min_output(corpus, cfg.min_docs);
        s["records_kept"] = corpus.records().size();
        s["institutions"] = corpus.institutions().size();
        s["journals"] = corpus.journals().size();
        if (corpus.records().empty())
            throw DataError("no records remain after filtering");

        const auto meta = ingest::institution_meta(corpus);
        out.write(files::meta, ingest::write_meta_csv(meta));
        out.write(files::categories, ingest::write_category_counts_csv(meta));

        const auto freq = weighting::count_frequencies(corpus);
        const auto weights = weighting::compute_weights(freq, cfg.log_base);
        out.write(files::weights, weighting::write_triplets(weights));
    });
}

/// Weight triplets -> first-order, second-order and dissimilarity matrices.
/// Institutions with an all-zero weight vector are excluded and reported.
inline void stage_similarity(const fs::path& in_dir, ArtifactWriter& out, Summary& summary,
                             unsigned threads = 1)
{
    in_stage("similarity", [&] {
        const auto meta = ingest::read_meta_csv(read_upstream(in_dir, files::meta, "ingest"));
        std::vector<std::string> ids;
        for (const auto& m : meta)
            ids.push_back(m.id);
        auto weights = weighting::read_weight_triplets(
            read_upstream(in_dir, files::weights, "ingest"), ids);

        const auto zero = weighting::zero_norm_institutions(weights);
        summary.data["excluded_institutions"] = zero;
        if (!zero.empty()) {
            summary.warnings.push_back(std::to_string(zero.size())
                                       + " institution(s) publish only in journals shared by every "
                                         "institution and were excluded from the similarity matrices");
            weights = weighting::drop_institutions(weights, zero);
        }
        if (weights.n_institutions() == 0)
            throw DataError("no institution has a nonzero journal weight vector");

        const auto b = similarity::first_order(weights, threads);
        const auto s = similarity::second_order(b, threads);
        out.write(files::first_order, similarity::write_matrix_csv(b));
        out.write(files::second_order, similarity::write_matrix_csv(s));
        out.write(files::dissimilarity,
                  similarity::write_matrix_csv(similarity::to_dissimilarity(s)));
    });
}

/// Dissimilarity matrix -> complete-linkage dendrogram (Newick and/or JSON).
inline void stage_cluster(const fs::path& in_dir, ArtifactWriter& out, Summary& summary,
                          const ExportSet& exports = all_exports())
{
    in_stage("cluster", [&] {
        const auto d = similarity::read_dissimilarity_csv(
            read_upstream(in_dir, files::dissimilarity, "similarity"));
        if (d.size() < 2)
            throw DataError("clustering needs at least 2 institutions, found "
                            + std::to_string(d.size()));
        const auto tree = clustering::complete_linkage(d);
        summary.data["dendrogram_root_height"] = tree.merges.back().height;
        if (exports.count(ExportFormat::newick))
            out.write(files::newick, clustering::export_newick(tree) + "\n");
        if (exports.count(ExportFormat::json))
            out.write(files::dendrogram_json, clustering::export_dendrogram_json(tree));
    });
}

/// Second-order similarities + metadata -> thresholded, laid-out map.
inline void stage_map(const fs::path& in_dir, const MapConfig& cfg, ArtifactWriter& out,
                      Summary& summary, const ExportSet& exports = all_exports())
{
    in_stage("map", [&] {
        validate(cfg);
        const auto meta = ingest::read_meta_csv(read_upstream(in_dir, files::meta, "ingest"));
        const auto s = similarity::read_similarity_csv(
            read_upstream(in_dir, files::second_order, "similarity"), similarity::Order::second);

        auto graph = mapgraph::build_graph(s, meta, cfg.threshold, cfg.emphasis);
        auto& sum = summary.data;
        sum["map_nodes"] = graph.nodes.size();
        sum["map_edges"] = graph.edges.size();
        if (graph.nodes.empty()) {
            summary.warnings.push_back("no pair of institutions reaches the similarity threshold; "
                                       "the map is empty");
        } else {
            const auto layout = mapgraph::kamada_kawai(graph, cfg.layout);
            graph = mapgraph::with_layout(std::move(graph), layout);
            sum["layout_stress"] = layout.stress;
            sum["layout_iterations"] = layout.iterations;
            sum["layout_converged"] = layout.converged;
            if (!layout.converged)
                summary.warnings.push_back("layout stopped at the iteration limit before reaching "
                                           "the gradient tolerance");
        }
        if (exports.count(ExportFormat::pajek))
            out.write(files::pajek, mapgraph::export_pajek(graph));
        if (exports.count(ExportFormat::graphml))
            out.write(files::graphml, mapgraph::export_graphml(graph));
        if (exports.count(ExportFormat::dot))
            out.write(files::dot, mapgraph::export_dot(graph));
    });
}

/// Category distribution of the named institutions (all when empty).
inline void stage_profile(const fs::path& in_dir, const std::vector<std::string>& names,
                          ArtifactWriter& out)
{
    in_stage("profile", [&] {
        auto meta = ingest::read_meta_csv(read_upstream(in_dir, files::meta, "ingest"));
        ingest::read_category_counts_csv(read_upstream(in_dir, files::categories, "ingest"), meta);

        std::vector<const ingest::InstitutionMeta*> chosen;
        if (names.empty()) {
            for (const auto& m : meta)
                chosen.push_back(&m);
        } else {
            for (const auto& raw : names) {
                const auto id = text::normalize_id(raw);
                auto it = std::find_if(meta.begin(), meta.end(),
                                       [&](const ingest::InstitutionMeta& m) { return m.id == id; });
                if (it == meta.end())
                    throw ArgumentError("unknown institution '" + raw + "'");
                chosen.push_back(&*it);
            }
        }

        std::string csv = "institution,category,count,fraction\n";
        for (const auto* m : chosen) {
            const auto profile = ingest::category_profile(*m);
            for (const auto& [cat, frac] : profile)
                csv += text::csv_field(m->id) + "," + text::csv_field(cat) + ","
                    + std::to_string(m->category_counts.at(cat)) + ","
                    + text::format_significant(frac, similarity::csv_digits) + "\n";
        }
        out.write(files::profile, csv);
    });
}

// ---- full run ----------------------------------------------------------------

inline nlohmann::ordered_json parameters_json(const PipelineConfig& c)
{
    nlohmann::ordered_json p;
    p["format"] = c.ingest.format == ingest::Format::csv ? "csv" : "jsonl";
    if (c.ingest.period)
        p["period"] = {c.ingest.period->start, c.ingest.period->end};
    else
        p["period"] = nullptr;
    p["field"] = c.ingest.field ? nlohmann::ordered_json(*c.ingest.field) : nullptr;
    p["min_docs"] = c.ingest.min_docs;
    p["log_base"] = weighting::to_string(c.ingest.log_base);
    p["threshold"] = c.map.threshold;
    p["emphasis"] = c.map.emphasis;
    p["layout"] = {{"max_iter", c.map.layout.max_iter},
                   {"tol", c.map.layout.tol},
                   {"edge_length", c.map.layout.edge_length},
                   {"weighted_distances", c.map.layout.weighted_distances}};
    auto ex = nlohmann::ordered_json::array();
    for (auto f : c.exports)
        ex.push_back(to_string(f));
    p["exports"] = ex;
    return p;
}

struct RunResult {
    std::vector<Artifact> artifacts; // excluding the manifest itself
    std::vector<std::string> warnings;
    std::string manifest;
};

/// Runs every stage into config.out_dir and writes manifest.json last. On
/// failure all files written by this run are removed and the error, tagged
/// with its stage, propagates.
inline RunResult run_pipeline(const PipelineConfig& config)
{
    in_stage("config", [&] { validate(config); });

    ArtifactWriter out(config.out_dir);
    Summary summary;
    stage_ingest(config.ingest, out, summary);
    stage_similarity(config.out_dir, out, summary, config.threads);
    stage_cluster(config.out_dir, out, summary, config.exports);
    stage_map(config.out_dir, config.map, out, summary, config.exports);

    nlohmann::ordered_json manifest;
    manifest["tool"] = "profilemap";
    manifest["version"] = version;
    manifest["parameters"] = parameters_json(config);

    auto inputs = nlohmann::ordered_json::array();
    auto add_input = [&](std::string_view role, const fs::path& p) {
        inputs.push_back({{"role", role},
                          {"path", p.generic_string()},
                          {"sha256", sha256_hex(text::read_file(p))}});
    };
    add_input("records", config.ingest.input);
    if (config.ingest.aliases)
        add_input("aliases", *config.ingest.aliases);
    if (config.ingest.field_map)
        add_input("field_map", *config.ingest.field_map);
    manifest["inputs"] = inputs;
    manifest["summary"] = summary.data;
    manifest["warnings"] = summary.warnings;

    auto arts = nlohmann::ordered_json::array();
    for (const auto& a : out.written())
        arts.push_back({{"file", a.file}, {"bytes", a.bytes}, {"sha256", a.sha256}});
    manifest["artifacts"] = arts;

    RunResult result;
    result.artifacts = out.written();
    result.warnings = summary.warnings;
    result.manifest = manifest.dump(2) + "\n";
    out.write(files::manifest, result.manifest);
    out.commit();
    return result;
}

} // namespace profilemap::pipeline
