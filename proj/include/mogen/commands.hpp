#pragma once

// File-based pipeline commands behind the `mogen` executable. Every output
// file carries the run configuration and the hashes of its inputs, and
// identical configuration + inputs reproduce byte-identical files.

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mogen/centrality.hpp"
#include "mogen/error.hpp"
#include "mogen/experiment.hpp"
#include "mogen/models.hpp"
#include "mogen/pathdata.hpp"
#include "mogen/report.hpp"
#include "mogen/smells.hpp"

namespace mogen::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum ExitCode : int { ok = 0, usage = 1, data = 2, numeric = 3 };

/// Maps an exception to the documented exit codes.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const UnsupportedMeasure*>(&e))
        return usage;
    if (dynamic_cast<const NumericError*>(&e))
        return numeric;
    return data;
}

/// Integer durations with optional unit: s, h, d, m (30 days), y (365 days).
inline Timestamp parse_duration(const std::string& text) {
    if (text.empty())
        throw InvalidArgument("empty duration");
    Timestamp unit = 1;
    std::string digits = text;
    switch (text.back()) {
    case 's':
        unit = 1;
        break;
    case 'h':
        unit = 3600;
        break;
    case 'd':
        unit = 86400;
        break;
    case 'm':
        unit = 30 * 86400;
        break;
    case 'y':
        unit = 365 * 86400;
        break;
    default:
        digits.push_back('_'); // no suffix; keep the pop below uniform
    }
    digits.pop_back();
    auto value = detail::parse_int<Timestamp>(digits);
    if (!value || *value <= 0)
        throw InvalidArgument("malformed duration '" + text + "'");
    return *value * unit;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    for (auto tok : detail::split(s, ','))
        if (!detail::trim(tok).empty())
            out.emplace_back(detail::trim(tok));
    return out;
}

inline std::vector<Measure> parse_measures(const std::vector<std::string>& names) {
    std::vector<Measure> out;
    for (const auto& n : names)
        for (const auto& item : split_list(n))
            out.push_back(parse_measure(item));
    return out;
}

struct InputFile {
    std::string path;
    std::string bytes;
    std::string hash;

    static InputFile load(const std::string& path) {
        InputFile f{path, read_file(path), {}};
        f.hash = content_hash(f.bytes);
        return f;
    }
};

/// Metadata block embedded in every output.
inline json metadata(const json& config, const std::vector<InputFile>& inputs) {
    json in = json::array();
    for (const auto& f : inputs)
        in.push_back({{"path", f.path}, {"fnv1a64", f.hash}});
    return {{"config", config}, {"inputs", in}};
}

/// '#'-prefixed comment lines placed before a CSV header.
inline std::string csv_preamble(const json& meta) {
    return "# config: " + meta.at("config").dump() + "\n# inputs: " + meta.at("inputs").dump() + "\n";
}

inline void write_text(const fs::path& file, const std::string& text) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw DataError(file.string() + ": cannot write file");
    out << text;
}

inline void write_json(const fs::path& file, const json& doc) { write_text(file, doc.dump(2) + "\n"); }

inline PathDataset load_paths(const InputFile& f, char delimiter = ',') {
    std::istringstream in(f.bytes);
    return parse_paths(in, PathFileFormat{delimiter, ';'}, f.path).dataset;
}

inline json stats_json(const DatasetStats& s) {
    return {{"total_paths", s.total_paths}, {"unique_paths", s.unique_paths}, {"mean_len", s.mean_len},
            {"median_len", s.median_len},   {"n_nodes", s.n_nodes},           {"n_links", s.n_links}};
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
    std::string input;
    std::string format = "paths"; // paths | temporal-edges | actions
    std::optional<std::string> delta;
    char delimiter = ',';
    std::string out_dir = ".";

    json to_json() const {
        return {{"command", "ingest"}, {"input", input}, {"format", format},
                {"delta", delta ? json(*delta) : json(nullptr)}, {"delimiter", std::string(1, delimiter)},
                {"out", out_dir}};
    }
    void validate() const {
        if (format != "paths" && format != "temporal-edges" && format != "actions")
            throw InvalidArgument("--format must be paths, temporal-edges or actions");
        if (format == "temporal-edges" && !delta)
            throw InvalidArgument("--delta is required with --format temporal-edges");
        if (delta)
            parse_duration(*delta);
    }
};

/// Writes <out>/dataset.paths (canonical format) and <out>/stats.json.
inline DatasetStats cmd_ingest(const IngestOptions& opts, std::ostream& log) {
    opts.validate();
    const auto input = InputFile::load(opts.input);
    PathDataset ds;
    std::istringstream in(input.bytes);
    if (opts.format == "paths") {
        auto parsed = parse_paths(in, PathFileFormat{opts.delimiter, ';'}, input.path);
        for (const auto& w : parsed.warnings)
            log << "warning: " << w << '\n';
        ds = std::move(parsed.dataset);
    } else if (opts.format == "temporal-edges") {
        ds = extract_paths(parse_temporal_edges(in, input.path), parse_duration(*opts.delta));
    } else {
        ds = paths_from_actions(parse_actions(in, input.path));
    }
    const auto s = stats(ds);
    const auto meta = metadata(opts.to_json(), {input});
    std::ostringstream paths;
    paths << csv_preamble(meta);
    write_paths(paths, ds);
    write_text(fs::path(opts.out_dir) / "dataset.paths", paths.str());
    json doc = meta;
    doc["stats"] = stats_json(s);
    write_json(fs::path(opts.out_dir) / "stats.json", doc);
    log << "ingested " << s.total_paths << " paths (" << s.unique_paths << " unique)\n";
    return s;
}

// ---------------------------------------------------------------------------
// centrality

struct CentralityCommandOptions {
    std::string input;
    std::string model = "mogen"; // network | path | mogen
    std::optional<std::size_t> K;
    bool auto_order = false;
    std::size_t K_max = 5;
    std::vector<std::string> measures; // empty: all
    bool edges = false;
    double min_visitation = 0.02;
    bool raw_betweenness = false;
    std::string direction = "out";
    std::string out_dir = ".";

    json to_json() const {
        return {{"command", "centrality"},
                {"input", input},
                {"model", model},
                {"k", K ? json(*K) : json(nullptr)},
                {"auto_order", auto_order},
                {"k_max", K_max},
                {"measures", measures},
                {"edges", edges},
                {"min_visitation", min_visitation},
                {"raw_betweenness", raw_betweenness},
                {"direction", direction},
                {"out", out_dir}};
    }
    void validate() const {
        if (model != "network" && model != "path" && model != "mogen")
            throw InvalidArgument("--model must be network, path or mogen");
        if (direction != "out" && direction != "in")
            throw InvalidArgument("--direction must be out or in");
        if (model == "mogen" && !K && !auto_order)
            throw InvalidArgument("mogen needs --k or --auto-order");
        if (K && *K < 1)
            throw InvalidArgument("--k must be at least 1");
        if (edges && model != "mogen")
            throw InvalidArgument("--edges requires --model mogen");
        parse_measures(measures);
    }
};

inline std::vector<Measure> measures_or_all(const std::vector<std::string>& names) {
    auto out = parse_measures(names);
    if (out.empty())
        out.assign(kAllMeasures.begin(), kAllMeasures.end());
    return out;
}

/// Writes <out>/centrality.{csv,json} and, with edges, <out>/edges.{csv,json}.
inline CentralityReport cmd_centrality(const CentralityCommandOptions& opts, std::ostream& log) {
    opts.validate();
    const auto input = InputFile::load(opts.input);
    const auto ds = load_paths(input);
    const auto measures = measures_or_all(opts.measures);
    CentralityOptions copts;
    copts.raw_betweenness = opts.raw_betweenness;
    copts.direction = opts.direction == "in" ? ClosenessDirection::incoming : ClosenessDirection::outgoing;

    CentralityReport report;
    std::vector<std::string> skipped;
    std::optional<MOGenModel> mogen_model;
    json extra;
    if (opts.model == "network") {
        const auto net = fit_network(ds);
        for (auto m : measures) {
            try {
                report.add(centrality(net, m, copts), "network");
            } catch (const UnsupportedMeasure& e) {
                log << "warning: " << e.what() << '\n';
                skipped.emplace_back(to_string(m));
            }
        }
    } else if (opts.model == "path") {
        const auto pm = PathModel::fit(ds);
        const PathCentrality pc(pm, 1, copts.direction);
        for (auto m : measures)
            report.add(pc.nodes(m), "path");
    } else {
        std::size_t K = opts.K.value_or(1);
        if (opts.auto_order) {
            const auto scores = order_scores(ds, opts.K_max);
            K = select_order(ds, opts.K_max);
            json sel = json::array();
            for (const auto& s : scores)
                sel.push_back({{"K", s.K}, {"log_likelihood", s.log_likelihood}, {"dof", s.dof}, {"aic", s.aic}});
            extra["order_selection"] = {{"selected_K", K}, {"scores", sel}};
            log << "selected K = " << K << '\n';
        }
        mogen_model = fit_mogen(ds, K);
        const MOGenCentrality mc(*mogen_model, copts);
        for (auto m : measures) {
            report.add(mc.nodes(m), "mogen");
            report.add(mc.states(m), "mogen@state");
        }
    }
    if (report.empty())
        throw UnsupportedMeasure("no requested measure can be computed for a " + opts.model + " model");

    const auto meta = metadata(opts.to_json(), {input});
    std::ostringstream csv;
    csv << csv_preamble(meta);
    report.write_csv(csv);
    write_text(fs::path(opts.out_dir) / "centrality.csv", csv.str());
    json doc = meta;
    doc["skipped_measures"] = skipped;
    doc["rows"] = report.to_json();
    if (!extra.is_null())
        doc.update(extra);
    write_json(fs::path(opts.out_dir) / "centrality.json", doc);

    if (opts.edges) {
        const auto edges = edge_centralities(*mogen_model, measures, opts.min_visitation, copts);
        std::ostringstream ecsv;
        ecsv << csv_preamble(meta) << "measure,model,state,score\n";
        json rows = json::array();
        for (auto m : measures) {
            std::string name(to_string(m));
            for (const auto& e : edges.edges) {
                const double v = e.values.at(m);
                ecsv << name << ",mogen@edge," << csv_field(e.source + "|" + e.target) << ',' << format_number(v)
                     << '\n';
            }
        }
        for (const auto& e : edges.edges) {
            json values;
            for (const auto& [m, v] : e.values)
                values[std::string(to_string(m))] = v;
            rows.push_back({{"source", e.source}, {"target", e.target}, {"visitation", e.visitation}, {"values", values}});
        }
        write_text(fs::path(opts.out_dir) / "edges.csv", ecsv.str());
        json edoc = meta;
        edoc["edges"] = rows;
        write_json(fs::path(opts.out_dir) / "edges.json", edoc);
        log << edges.edges.size() << " order-2 states above " << opts.min_visitation << " visitation\n";
    }
    return report;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentCommandOptions {
    std::string input;
    std::string dataset_name; // defaults to the input file stem
    double train_fraction = 0.3;
    std::vector<std::string> models = {"N", "M1", "M2", "M3", "M4", "M5", "P"};
    std::vector<std::string> measures = {"betweenness", "closeness", "path_end", "path_continuation", "path_reach"};
    std::size_t replicates = 5;
    std::uint64_t seed = 0;
    std::size_t K_truth = 5;
    bool per_order = false;
    bool exclude_unmatched = false;
    bool literal_projection = false;
    std::string out_dir = ".";

    json to_json() const {
        return {{"command", "experiment"},   {"input", input},
                {"dataset", dataset_name},   {"train_fraction", train_fraction},
                {"models", models},          {"measures", measures},
                {"replicates", replicates},  {"seed", seed},
                {"k_truth", K_truth},        {"per_order_pooling", per_order},
                {"exclude_unmatched", exclude_unmatched}, {"literal_projection", literal_projection},
                {"out", out_dir}};
    }
    std::vector<ModelConfig> model_configs() const {
        std::vector<ModelConfig> out;
        for (const auto& m : models)
            for (const auto& item : split_list(m))
                out.push_back(ModelConfig::parse(item));
        return out;
    }
    void validate() const {
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw InvalidArgument("--train-fraction must lie in (0, 1)");
        if (replicates < 1)
            throw InvalidArgument("--replicates must be at least 1");
        if (K_truth < 1)
            throw InvalidArgument("--k-truth must be at least 1");
        if (model_configs().empty())
            throw InvalidArgument("no models given");
        if (parse_measures(measures).empty())
            throw InvalidArgument("no measures given");
    }
};

/// Writes <out>/auc.csv (one row per dataset, one column per measure x
/// model, mean AUC to 3 decimals) and <out>/auc.json with replicate detail.
inline std::vector<AUCResult> cmd_experiment(const ExperimentCommandOptions& in_opts, std::ostream& log) {
    auto opts = in_opts;
    if (opts.dataset_name.empty())
        opts.dataset_name = fs::path(opts.input).stem().string();
    opts.validate();
    const auto input = InputFile::load(opts.input);
    const auto ds = load_paths(input);
    const auto models = opts.model_configs();
    const auto measures = parse_measures(opts.measures);
    ExperimentOptions eopts;
    eopts.K_truth = opts.K_truth;
    eopts.per_order_pooling = opts.per_order;
    eopts.mogen_sequences = !opts.literal_projection;
    eopts.unmatched = opts.exclude_unmatched ? UnmatchedTargets::exclude : UnmatchedTargets::minimum_score;
    const auto results = evaluate(ds, SplitSpec{opts.train_fraction, opts.seed, opts.replicates}, models, measures, eopts);

    const auto meta = metadata(opts.to_json(), {input});
    std::ostringstream csv;
    csv << csv_preamble(meta) << "dataset";
    for (const auto& r : results)
        csv << ',' << to_string(r.measure) << ':' << r.model;
    csv << '\n' << csv_field(opts.dataset_name);
    for (const auto& r : results)
        csv << ',' << format_fixed(r.mean, 3);
    csv << '\n';
    write_text(fs::path(opts.out_dir) / "auc.csv", csv.str());

    json doc = meta;
    json rows = json::array();
    for (const auto& r : results)
        rows.push_back({{"model", r.model}, {"measure", to_string(r.measure)}, {"mean_auc", r.mean},
                        {"replicates", r.replicates}});
    doc["results"] = rows;
    write_json(fs::path(opts.out_dir) / "auc.json", doc);
    log << results.size() << " model x measure cells over " << opts.replicates << " replicates\n";
    return results;
}

// ---------------------------------------------------------------------------
// smells

struct SmellsCommandOptions {
    /// (platform label, file) pairs.
    std::vector<std::pair<std::string, std::string>> platforms;
    std::string format = "actions"; // actions | paths (paths need timestamps)
    std::string window = "1y";
    std::string shift = "3m";
    std::optional<std::size_t> K;
    std::size_t K_max = 3;
    std::vector<std::string> measures; // empty: all six
    std::size_t top_n = 5;
    EvidenceThresholds thresholds;
    bool strict_absence = false;
    double epsilon = 1e-9;
    std::string out_dir = ".";

    json to_json() const {
        json plats = json::array();
        for (const auto& [name, file] : platforms)
            plats.push_back({{"name", name}, {"file", file}});
        return {{"command", "smells"},
                {"platforms", plats},
                {"format", format},
                {"window", window},
                {"shift", shift},
                {"k", K ? json(*K) : json(nullptr)},
                {"k_max", K_max},
                {"measures", measures},
                {"top", top_n},
                {"theta_end", thresholds.end_share},
                {"min_windows", thresholds.min_windows},
                {"theta_role", thresholds.role_share},
                {"max_performers", thresholds.max_performers},
                {"min_visitation", thresholds.min_visitation},
                {"strict_absence", strict_absence},
                {"epsilon", epsilon},
                {"out", out_dir}};
    }
    void validate() const {
        if (platforms.empty())
            throw InvalidArgument("at least one --platform NAME=FILE is required");
        if (format != "actions" && format != "paths")
            throw InvalidArgument("--format must be actions or paths");
        parse_duration(window);
        parse_duration(shift);
        if (K && *K < 1)
            throw InvalidArgument("--k must be at least 1");
        if (top_n < 1)
            throw InvalidArgument("--top must be at least 1");
        parse_measures(measures);
    }
};

struct SmellReport {
    std::vector<DeviationScore> ranking;
    std::vector<SmellEvidence> evidence;
    std::size_t skipped_terms = 0;
};

inline std::string safe_file_name(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
    return out.empty() ? "_" : out;
}

/// Window, fit, centralities, deviation scores, ranking and evidence per
/// platform. Writes <out>/smells.json and
/// <out>/series/<platform>/<member>.csv for the ranked members.
inline SmellReport cmd_smells(const SmellsCommandOptions& opts, std::ostream& log) {
    opts.validate();
    const auto length = parse_duration(opts.window);
    const auto shift = parse_duration(opts.shift);
    auto measures = measures_or_all(opts.measures);
    for (auto required : {Measure::path_end, Measure::betweenness})
        if (std::find(measures.begin(), measures.end(), required) == measures.end())
            measures.push_back(required); // evidence needs these series

    std::vector<InputFile> inputs;
    std::vector<std::vector<WindowSlice>> slices;
    std::vector<PlatformSeries> series;
    WindowModelOptions wopts;
    wopts.K = opts.K;
    wopts.K_max = opts.K_max;
    for (const auto& [name, file] : opts.platforms) {
        inputs.push_back(InputFile::load(file));
        std::istringstream in(inputs.back().bytes);
        const PathDataset ds = opts.format == "actions" ? paths_from_actions(parse_actions(in, file))
                                                        : parse_paths(in, {}, file).dataset;
        if (!ds.has_timestamps())
            throw DataError(file + ": every path needs a timestamp");
        slices.push_back(rolling_windows(ds, length, shift));
        series.push_back(windowed_centralities(slices.back(), measures, wopts, name));
        log << name << ": " << slices.back().size() << " windows\n";
    }

    const auto dev = deviation_scores(series, DeviationOptions{opts.epsilon, opts.strict_absence});
    SmellReport report;
    report.skipped_terms = dev.skipped_terms;
    report.ranking = rank_members(dev.scores, opts.top_n);
    for (const auto& s : report.ranking) {
        auto ev = evidence(series, s.member, opts.thresholds);
        for (std::size_t p = 0; p < series.size(); ++p) {
            if (!series[p].values.count(s.member))
                continue;
            std::size_t K = 2;
            for (auto k : series[p].orders)
                K = std::max(K, k);
            ev.breadth.push_back(
                interaction_breadth(slices[p], s.member, K, opts.thresholds.min_visitation, series[p].platform));
        }
        report.evidence.push_back(std::move(ev));
    }

    const auto meta = metadata(opts.to_json(), inputs);
    json doc = meta;
    doc["note"] = "flags are candidates for human review; interview validation is not performed";
    doc["skipped_terms"] = report.skipped_terms;
    json windows = json::object();
    for (const auto& p : series) {
        json w = json::array();
        for (std::size_t t = 0; t < p.windows.size(); ++t)
            w.push_back({{"start", p.windows[t].start}, {"end", p.windows[t].end()}, {"K", p.orders[t]},
                         {"empty", p.orders[t] == 0}});
        windows[p.platform] = w;
    }
    doc["windows"] = windows;
    json ranked = json::array();
    for (std::size_t i = 0; i < report.ranking.size(); ++i) {
        const auto& s = report.ranking[i];
        const auto& ev = report.evidence[i];
        json dom = json::array();
        for (const auto& d : ev.end_dominance)
            for (const auto& r : d.runs)
                dom.push_back({{"platform", d.platform}, {"start", r.start}, {"end", r.end}, {"windows", r.length()}});
        json red = json::array();
        for (const auto& w : ev.sole_performer)
            red.push_back({{"platform", w.platform}, {"start", w.start}, {"performers", w.performers}});
        json breadth = json::array();
        for (const auto& b : ev.breadth)
            breadth.push_back({{"platform", b.platform}, {"in_partners", b.in_partners},
                               {"out_partners", b.out_partners}, {"total", b.total()}});
        ranked.push_back({{"rank", i + 1},
                          {"member", s.member},
                          {"score", s.aggregate},
                          {"per_platform", s.per_platform},
                          {"flags",
                           {{"end_dominance", ev.end_dominant()},
                            {"code_red_candidate", !ev.sole_performer.empty()}}},
                          {"evidence", {{"end_dominance", dom}, {"code_red_windows", red}, {"breadth", breadth}}}});
    }
    doc["ranking"] = ranked;
    write_json(fs::path(opts.out_dir) / "smells.json", doc);

    for (const auto& s : report.ranking) {
        for (const auto& p : series) {
            auto it = p.values.find(s.member);
            if (it == p.values.end())
                continue;
            std::ostringstream csv;
            csv << csv_preamble(meta) << "window_start,measure,value,team_mean\n";
            for (std::size_t t = 0; t < p.windows.size(); ++t)
                for (auto m : measures) {
                    const auto& v = it->second.at(m)[t];
                    const auto& mean = p.means.at(m)[t];
                    csv << p.windows[t].start << ',' << to_string(m) << ',' << (v ? format_number(*v) : "") << ','
                        << (mean ? format_number(*mean) : "") << '\n';
                }
            write_text(fs::path(opts.out_dir) / "series" / safe_file_name(p.platform) /
                           (safe_file_name(s.member) + ".csv"),
                       csv.str());
        }
    }
    log << "ranked " << report.ranking.size() << " members\n";
    return report;
}

} // namespace mogen::cli
