// profilemap: map institutions by the journals they publish in.
//
//   profilemap run        --input records.csv --out results/
//   profilemap ingest     --input records.csv --out results/
//   profilemap similarity --out results/
//   profilemap cluster    --out results/
//   profilemap map        --out results/ --threshold 0.6
//   profilemap profile    --out results/ --institution "tech institute d"

#include "profilemap/profilemap.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

namespace pm = profilemap;
namespace pp = profilemap::pipeline;

namespace {

struct Options {
    std::string input;
    std::string format = "csv";
    std::string period;
    std::string field;
    std::string field_map;
    std::string aliases;
    long long min_docs = 50;
    std::string log_base = "natural";
    double threshold = pm::mapgraph::default_threshold;
    double emphasis = pm::mapgraph::default_emphasis;
    std::size_t layout_iters = pm::mapgraph::LayoutOptions{}.max_iter;
    double layout_tol = pm::mapgraph::LayoutOptions{}.tol;
    bool weighted_distances = false;
    std::string out;
    std::string from;
    std::vector<std::string> exports;
    std::vector<std::string> institutions;
};

pm::ingest::Period parse_period(const std::string& s)
{
    const auto parts = pm::text::split(s, ':');
    if (parts.size() == 2) {
        auto a = pm::text::parse_integer<int>(parts[0]);
        auto b = pm::text::parse_integer<int>(parts[1]);
        if (a && b)
            return {*a, *b};
    }
    throw pm::ArgumentError("--period must look like START:END, got '" + s + "'");
}

pp::IngestConfig ingest_config(const Options& o)
{
    pp::IngestConfig c;
    c.input = o.input;
    if (o.format == "csv")
        c.format = pm::ingest::Format::csv;
    else if (o.format == "jsonl")
        c.format = pm::ingest::Format::jsonl;
    else
        throw pm::ArgumentError("--format must be csv or jsonl");
    if (!o.period.empty())
        c.period = parse_period(o.period);
    if (!o.field.empty())
        c.field = o.field;
    if (!o.field_map.empty())
        c.field_map = o.field_map;
    if (!o.aliases.empty())
        c.aliases = o.aliases;
    c.min_docs = o.min_docs;
    if (o.log_base == "natural")
        c.log_base = pm::weighting::LogBase::natural;
    else if (o.log_base == "10")
        c.log_base = pm::weighting::LogBase::base10;
    else
        throw pm::ArgumentError("--log-base must be natural or 10");
    pp::validate(c);
    return c;
}

pp::MapConfig map_config(const Options& o)
{
    pp::MapConfig c;
    c.threshold = o.threshold;
    c.emphasis = o.emphasis;
    c.layout.max_iter = o.layout_iters;
    c.layout.tol = o.layout_tol;
    c.layout.weighted_distances = o.weighted_distances;
    pp::validate(c);
    return c;
}

pp::ExportSet export_set(const Options& o)
{
    if (o.exports.empty())
        return pp::all_exports();
    pp::ExportSet s;
    for (const auto& e : o.exports)
        s.insert(pp::export_from_string(e));
    return s;
}

unsigned thread_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PROFILEMAP_THREADS")) {
        auto cap = pm::text::parse_integer<unsigned>(env);
        if (!cap || *cap == 0)
            throw pm::ArgumentError("PROFILEMAP_THREADS must be a positive integer");
        n = std::min(n, *cap);
    }
    return n;
}

void print_warnings(const std::vector<std::string>& warnings)
{
    for (const auto& w : warnings)
        std::cerr << "profilemap: warning: " << w << "\n";
}

void add_ingest_flags(CLI::App* app, Options& o)
{
    app->add_option("--input", o.input, "Publication records file")->required();
    app->add_option("--format", o.format, "Input format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    app->add_option("--period", o.period, "Inclusive year range START:END");
    app->add_option("--field", o.field, "Restrict to one field of the field map");
    app->add_option("--field-map", o.field_map, "JSON field -> categories map");
    app->add_option("--aliases", o.aliases, "CSV raw_name,canonical_name alias table");
    app->add_option("--min-docs", o.min_docs, "Minimum citable documents per institution");
    app->add_option("--log-base", o.log_base, "Inverse frequency logarithm base")
        ->check(CLI::IsMember({"natural", "10"}));
}

void add_map_flags(CLI::App* app, Options& o)
{
    app->add_option("--threshold", o.threshold, "Minimum second-order similarity for an edge");
    app->add_option("--emphasis", o.emphasis, "Similarity from which edges are emphasized");
    app->add_option("--layout-iters", o.layout_iters, "Kamada-Kawai iteration limit");
    app->add_option("--layout-tol", o.layout_tol, "Kamada-Kawai gradient tolerance");
    app->add_flag("--weighted-distances", o.weighted_distances,
                  "Use 1 - similarity as edge length for graph distances");
}

void add_export_flag(CLI::App* app, Options& o)
{
    app->add_option("--export", o.exports, "Export formats: pajek,graphml,dot,newick,json")
        ->delimiter(',')
        ->check(CLI::IsMember({"pajek", "graphml", "dot", "newick", "json"}));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Map institutions by their journal publication profiles"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Run the whole pipeline and write a manifest");
    auto* ing = app.add_subcommand("ingest", "Records -> metadata, category counts, weights");
    auto* sim = app.add_subcommand("similarity", "Weights -> similarity and dissimilarity matrices");
    auto* clu = app.add_subcommand("cluster", "Dissimilarities -> complete-linkage dendrogram");
    auto* map = app.add_subcommand("map", "Second-order similarities -> network map exports");
    auto* pro = app.add_subcommand("profile", "Category distribution of institutions");

    for (auto* sub : {run, ing, sim, clu, map, pro})
        sub->add_option("--out", o.out, "Output directory")->required();
    for (auto* sub : {sim, clu, map, pro})
        sub->add_option("--from", o.from, "Directory holding upstream artifacts (default: --out)");
    add_ingest_flags(run, o);
    add_ingest_flags(ing, o);
    add_map_flags(run, o);
    add_map_flags(map, o);
    add_export_flag(run, o);
    add_export_flag(clu, o);
    add_export_flag(map, o);
    pro->add_option("--institution", o.institutions, "Institution name (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            pp::PipelineConfig cfg;
            cfg.ingest = ingest_config(o);
            cfg.map = map_config(o);
            cfg.out_dir = o.out;
            cfg.exports = export_set(o);
            cfg.threads = thread_count();
            const auto result = pp::run_pipeline(cfg);
            print_warnings(result.warnings);
            std::cout << "wrote " << result.artifacts.size() + 1 << " files to " << o.out << "\n";
            return 0;
        }

        const auto from = o.from.empty() ? o.out : o.from;
        pp::Summary summary;
        auto stage = [&](auto&& body) {
            pp::ensure_writable_dir(o.out);
            pp::ArtifactWriter out(o.out);
            body(out);
            out.commit();
            print_warnings(summary.warnings);
            for (const auto& a : out.written())
                std::cout << "wrote " << (pp::fs::path(o.out) / a.file).string() << "\n";
        };

        if (ing->parsed()) {
            const auto cfg = ingest_config(o);
            stage([&](pp::ArtifactWriter& out) { pp::stage_ingest(cfg, out, summary); });
        } else if (sim->parsed()) {
            const auto threads = thread_count();
            stage([&](pp::ArtifactWriter& out) { pp::stage_similarity(from, out, summary, threads); });
        } else if (clu->parsed()) {
            const auto ex = export_set(o);
            stage([&](pp::ArtifactWriter& out) { pp::stage_cluster(from, out, summary, ex); });
        } else if (map->parsed()) {
            const auto cfg = map_config(o);
            const auto ex = export_set(o);
            stage([&](pp::ArtifactWriter& out) { pp::stage_map(from, cfg, out, summary, ex); });
        } else if (pro->parsed()) {
            stage([&](pp::ArtifactWriter& out) { pp::stage_profile(from, o.institutions, out); });
        }
        return 0;
    } catch (const pm::Error& e) {
        std::cerr << "profilemap: ";
        if (!e.stage().empty())
            std::cerr << e.stage() << ": ";
        std::cerr << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "profilemap: internal error: " << e.what() << "\n";
        return 1;
    }
}
