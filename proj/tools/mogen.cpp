#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "mogen/commands.hpp"

namespace cli = mogen::cli;

int main(int argc, char** argv) {
    CLI::App app{"Multi-order path models, path centralities and community-smell screening"};
    app.require_subcommand(1);

    cli::IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Normalise raw input into a path dataset and report statistics");
    c_ingest->add_option("input", ingest.input, "Input file")->required();
    c_ingest->add_option("--format", ingest.format, "paths | temporal-edges | actions");
    c_ingest->add_option("--delta", ingest.delta, "Maximum gap between consecutive temporal edges (e.g. 800, 20m)");
    c_ingest->add_option("--delimiter", ingest.delimiter, "Node delimiter of path files");
    c_ingest->add_option("-o,--out", ingest.out_dir, "Output directory");

    cli::CentralityCommandOptions cent;
    auto* c_cent = app.add_subcommand("centrality", "Compute centralities of a network, path or MOGen model");
    c_cent->add_option("input", cent.input, "Path dataset file")->required();
    c_cent->add_option("--model", cent.model, "network | path | mogen");
    c_cent->add_option("--k", cent.K, "Maximum order of the MOGen model");
    c_cent->add_flag("--auto-order", cent.auto_order, "Select K by AIC");
    c_cent->add_option("--k-max", cent.K_max, "Largest order considered by --auto-order");
    c_cent->add_option("--measure", cent.measures, "Measures (comma separated, repeatable; default all)");
    c_cent->add_flag("--edges", cent.edges, "Also report order-2 state (edge) centralities");
    c_cent->add_option("--min-visitation", cent.min_visitation, "Visitation share filter for --edges");
    c_cent->add_flag("--raw-betweenness", cent.raw_betweenness, "Subtract R_v instead of expected terminations");
    c_cent->add_option("--direction", cent.direction, "Closeness direction: out | in");
    c_cent->add_option("-o,--out", cent.out_dir, "Output directory");

    cli::ExperimentCommandOptions exp;
    std::vector<std::string> exp_models;
    auto* c_exp = app.add_subcommand("experiment", "Top-decile AUC prediction experiment");
    c_exp->add_option("input", exp.input, "Path dataset file")->required();
    c_exp->add_option("--name", exp.dataset_name, "Dataset label in the result table");
    c_exp->add_option("--train-fraction", exp.train_fraction, "Share of path instances used for training");
    c_exp->add_option("--models", exp_models, "Models, e.g. N,M1,M2,P");
    c_exp->add_option("--measure", exp.measures, "Measures (comma separated)");
    c_exp->add_option("--replicates", exp.replicates, "Number of random splits");
    c_exp->add_option("--seed", exp.seed, "Random seed");
    c_exp->add_option("--k-truth", exp.K_truth, "Longest ground-truth node sequence");
    c_exp->add_flag("--per-order", exp.per_order, "Label the top decile per sequence length");
    c_exp->add_flag("--exclude-unmatched", exp.exclude_unmatched, "Drop targets without a scored suffix");
    c_exp->add_flag("--literal-projection", exp.literal_projection,
                    "Score MOGen targets longer than K by their K-suffix only");
    c_exp->add_option("-o,--out", exp.out_dir, "Output directory");

    cli::SmellsCommandOptions sm;
    std::vector<std::string> platforms;
    std::vector<std::string> sm_measures;
    auto* c_sm = app.add_subcommand("smells", "Rolling-window deviation scores and smell evidence");
    c_sm->add_option("--platform", platforms, "NAME=FILE, repeatable")->required();
    c_sm->add_option("--format", sm.format, "actions | paths");
    c_sm->add_option("--window", sm.window, "Window length (e.g. 1y)");
    c_sm->add_option("--shift", sm.shift, "Window shift (e.g. 3m)");
    c_sm->add_option("--k", sm.K, "Fixed maximum order (default: select per window)");
    c_sm->add_option("--k-max", sm.K_max, "Largest order considered when selecting");
    c_sm->add_option("--measure", sm_measures, "Measures (default all)");
    c_sm->add_option("--top", sm.top_n, "Number of members to report");
    c_sm->add_option("--theta-end", sm.thresholds.end_share, "Path-end share for end dominance");
    c_sm->add_option("--min-windows", sm.thresholds.min_windows, "Consecutive windows for end dominance");
    c_sm->add_option("--theta-role", sm.thresholds.role_share, "Path-end share that counts as performing");
    c_sm->add_option("--max-performers", sm.thresholds.max_performers, "Code-red performer limit");
    c_sm->add_option("--min-visitation", sm.thresholds.min_visitation, "Breadth visitation filter");
    c_sm->add_flag("--strict-absence", sm.strict_absence, "Count absent windows as zero values");
    c_sm->add_option("-o,--out", sm.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::usage;
    }

    try {
        if (*c_ingest) {
            cli::cmd_ingest(ingest, std::cerr);
        } else if (*c_cent) {
            cli::cmd_centrality(cent, std::cerr);
        } else if (*c_exp) {
            if (!exp_models.empty())
                exp.models = exp_models;
            cli::cmd_experiment(exp, std::cerr);
        } else if (*c_sm) {
            for (const auto& p : platforms) {
                const auto eq = p.find('=');
                if (eq == std::string::npos || eq == 0 || eq + 1 == p.size()) {
                    std::cerr << "error: --platform expects NAME=FILE\n";
                    return cli::usage;
                }
                sm.platforms.emplace_back(p.substr(0, eq), p.substr(eq + 1));
            }
            sm.measures = sm_measures;
            cli::cmd_smells(sm, std::cerr);
        }
    } catch (const mogen::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::data;
    }
    return cli::ok;
}
