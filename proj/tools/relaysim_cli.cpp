// Command-line front end: Monte Carlo runs, parameter sweeps, relay-count
// optimization, closed-form evaluation, and the omniscient-scheduler oracle.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relaysim/analytics.hpp"
#include "relaysim/channel.hpp"
#include "relaysim/genie.hpp"
#include "relaysim/harness.hpp"

namespace {

using relaysim::SimConfig;

struct OutputOptions {
    std::string path;  // empty = stdout
    std::string format = "csv";
};

void emit(const OutputOptions& out, const std::string& text) {
    if (out.path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream file(out.path);
    if (!file) throw std::runtime_error("cannot open for writing: " + out.path);
    file << text;
}

std::string records_to_text(const std::vector<relaysim::ExperimentRecord>& records,
                            const std::string& format) {
    if (format == "json") return relaysim::to_json_string(records) + "\n";
    std::ostringstream os;
    relaysim::write_csv(os, records);
    return os.str();
}

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

// Flat key=value file with the same names as the subcommand's long flags.
// Values given on the command line win; unknown keys are errors.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(file, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto where = path + ":" + std::to_string(lineno);
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(where + ": expected key=value");
        const std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key.empty() || key == "config")
            throw std::runtime_error(where + ": bad key");
        CLI::Option* op = cmd->get_option_no_throw("--" + key);
        if (op == nullptr)
            throw std::runtime_error(where + ": unknown key '" + key + "'");
        if (op->count() > 0) continue;
        op->add_result(value);
        op->run_callback();
    }
}

// Shared experiment flags; s needs a presence check, so it is returned as a
// pointer for the caller to inspect after parsing.
struct ConfigBinding {
    double s_value = 0.0;
    CLI::Option* s_option = nullptr;
    std::string mode = "argmax";
    std::string counting = "distinct";
    std::string config_path;
};

ConfigBinding bind_config_flags(CLI::App* cmd, SimConfig& cfg) {
    ConfigBinding binding;
    cmd->add_option("--n", cfg.n, "Number of source-destination pairs");
    cmd->add_option("--m", cfg.m, "Number of relays");
    cmd->add_option("--snr1-db", cfg.snr1_db, "Hop-1 average SNR in dB");
    cmd->add_option("--snr2-db", cfg.snr2_db, "Hop-2 average SNR in dB");
    cmd->add_option("--beta", cfg.beta, "SINR success threshold");
    cmd->add_option("--trials", cfg.trials, "Monte Carlo trials");
    cmd->add_option("--seed", cfg.master_seed, "Master seed");
    cmd->add_option("--mode", binding.mode, "Hop-1 scheduling rule")
        ->check(CLI::IsMember({"argmax", "threshold"}));
    binding.s_option = cmd->add_option(
        "--s", binding.s_value,
        "Scheduling threshold; defaults to log n - log log n in threshold mode");
    cmd->add_option("--hop1-counting", binding.counting,
                    "Hop-1 bit counting convention")
        ->check(CLI::IsMember({"distinct", "distinct-source", "per-link"}));
    cmd->add_option("--config", binding.config_path,
                    "Flat key=value file with the same names as the flags");
    return binding;
}

void apply_binding(const ConfigBinding& binding, CLI::App* cmd, SimConfig& cfg) {
    if (!binding.config_path.empty()) apply_config_file(cmd, binding.config_path);
    cfg.mode = binding.mode == "threshold" ? relaysim::Phase1Mode::threshold
                                           : relaysim::Phase1Mode::argmax;
    cfg.hop1_counting = binding.counting == "per-link"
                            ? relaysim::Hop1Counting::per_link
                            : relaysim::Hop1Counting::distinct_source;
    if (binding.s_option->count() > 0) cfg.s = binding.s_value;
}

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
    cmd->add_option("--out", out.path, "Output path (default: stdout)");
    cmd->add_option("--format", out.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

std::string format_genie_csv(const relaysim::GenieResult& result) {
    std::ostringstream os;
    os << "k_max,nodes_explored,exact,witness\n";
    os << result.k_max << ',' << result.nodes_explored << ','
       << (result.exact ? "true" : "false") << ",\"";
    for (std::size_t idx = 0; idx < result.witness.size(); ++idx) {
        if (idx) os << ' ';
        os << result.witness[idx].first << ':' << result.witness[idx].second;
    }
    os << "\"\n";
    return os.str();
}

std::string format_genie_json(const relaysim::GenieResult& result) {
    nlohmann::json obj;
    obj["k_max"] = result.k_max;
    obj["nodes_explored"] = result.nodes_explored;
    obj["exact"] = result.exact;
    nlohmann::json witness = nlohmann::json::array();
    for (const auto& [source, relay] : result.witness)
        witness.push_back({{"source", source}, {"relay", relay}});
    obj["witness"] = std::move(witness);
    return obj.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-hop opportunistic relaying simulator"};
    app.require_subcommand(1);

    // simulate: one parameter cell.
    SimConfig sim_cfg;
    OutputOptions sim_out;
    unsigned sim_threads = 1;
    auto* simulate = app.add_subcommand("simulate", "Run one Monte Carlo cell");
    ConfigBinding sim_binding = bind_config_flags(simulate, sim_cfg);
    simulate->add_option("--threads", sim_threads, "Worker threads (0 = all cores)");
    add_output_flags(simulate, sim_out);

    // sweep: per-n optimization over m, one row per n.
    SimConfig sweep_cfg;
    OutputOptions sweep_out;
    unsigned sweep_threads = 1;
    std::vector<int> n_list{50, 100, 200, 500, 1000};
    auto* sweep = app.add_subcommand("sweep", "Sweep n with per-n optimal m");
    ConfigBinding sweep_binding = bind_config_flags(sweep, sweep_cfg);
    sweep->add_option("--n-list", n_list, "Comma-separated n values")
        ->delimiter(',');
    sweep->add_option("--threads", sweep_threads, "Worker threads (0 = all cores)");
    add_output_flags(sweep, sweep_out);

    // optimize-m: grid search at one n.
    SimConfig opt_cfg;
    OutputOptions opt_out;
    unsigned opt_threads = 1;
    std::vector<int> m_grid;
    bool all_cells = false;
    auto* optimize = app.add_subcommand("optimize-m", "Grid-search m at fixed n");
    ConfigBinding opt_binding = bind_config_flags(optimize, opt_cfg);
    optimize->add_option("--m-grid", m_grid,
                         "Comma-separated m grid (default 1..ceil(3 log n))")
        ->delimiter(',');
    optimize->add_flag("--all-cells", all_cells, "Emit every grid cell, best last");
    optimize->add_option("--threads", opt_threads, "Worker threads (0 = all cores)");
    add_output_flags(optimize, opt_out);

    // analytic: closed forms from flags.
    std::string op;
    int an_n = 100;
    int an_m = 3;
    double an_x = 1.0;
    double an_y = 1.0;
    double an_s = 1.0;
    double an_eps = 0.1;
    double an_snr1 = 10.0;
    double an_snr2 = 10.0;
    long long an_fc = 0;
    auto* analytic = app.add_subcommand("analytic", "Evaluate a closed form");
    analytic
        ->add_option("--op", op, "Formula to evaluate")
        ->required()
        ->check(CLI::IsMember({"prob-exactly-m-distinct", "cdf-max-exp",
                               "cdf-interference", "gaussian-approx-fy",
                               "r1-lower-bound", "default-threshold",
                               "r2-closed-form", "p-dest-success", "genie-upper",
                               "genie-lower", "coop-upper", "optimal-m-phase2",
                               "feedback-overhead", "bound-record"}));
    analytic->add_option("--n", an_n, "Number of source-destination pairs");
    analytic->add_option("--m", an_m, "Number of relays");
    analytic->add_option("--x", an_x, "Abscissa for cdf-max-exp");
    analytic->add_option("--y", an_y, "Abscissa for cdf-interference/gaussian-approx-fy");
    analytic->add_option("--s", an_s, "Scheduling threshold");
    analytic->add_option("--eps", an_eps, "Slack for genie-lower");
    analytic->add_option("--snr1-db", an_snr1, "Hop-1 average SNR in dB");
    analytic->add_option("--snr2-db", an_snr2, "Hop-2 average SNR in dB");
    analytic->add_option("--feedback-count", an_fc, "Feeding-back destinations");
    OutputOptions an_out;
    add_output_flags(analytic, an_out);

    // genie: oracle on a drawn or file-loaded instance.
    int genie_n = 10;
    int genie_m = 3;
    int genie_trials = 1;
    std::uint64_t genie_seed = 1;
    double genie_snr1 = 10.0;
    double genie_beta = 1.0;
    std::uint64_t node_budget = relaysim::kDefaultNodeBudget;
    std::string method = "bnb";
    std::string gamma_csv;
    std::string dump_gamma;
    OutputOptions genie_out;
    auto* genie = app.add_subcommand("genie", "Max concurrent successes oracle");
    genie->add_option("--n", genie_n, "Number of sources (drawn instance)");
    genie->add_option("--m", genie_m, "Number of relays (drawn instance)");
    genie->add_option("--trials", genie_trials, "Monte Carlo trials");
    genie->add_option("--seed", genie_seed, "Master seed");
    genie->add_option("--snr1-db", genie_snr1, "Hop-1 average SNR in dB");
    genie->add_option("--beta", genie_beta, "SINR success threshold");
    genie->add_option("--method", method, "Search strategy")
        ->check(CLI::IsMember({"bnb", "exhaustive"}));
    genie->add_option("--node-budget", node_budget, "Search node budget (bnb)");
    genie->add_option("--gamma-csv", gamma_csv, "Load the gain matrix from CSV");
    genie->add_option("--dump-gamma", dump_gamma,
                      "Save the drawn trial-0 gain matrix to CSV");
    std::string genie_config;
    genie->add_option("--config", genie_config,
                      "Flat key=value file with the same names as the flags");
    add_output_flags(genie, genie_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            apply_binding(sim_binding, simulate, sim_cfg);
            std::vector<relaysim::ExperimentRecord> records{
                relaysim::run_experiment(sim_cfg, sim_threads)};
            emit(sim_out, records_to_text(records, sim_out.format));
        } else if (sweep->parsed()) {
            apply_binding(sweep_binding, sweep, sweep_cfg);
            const auto records = relaysim::sweep_n(sweep_cfg, n_list, sweep_threads);
            emit(sweep_out, records_to_text(records, sweep_out.format));
        } else if (optimize->parsed()) {
            apply_binding(opt_binding, optimize, opt_cfg);
            const auto result = relaysim::optimize_m(opt_cfg, m_grid, opt_threads);
            std::vector<relaysim::ExperimentRecord> records;
            if (all_cells) records = result.cells;
            records.push_back(result.best);
            emit(opt_out, records_to_text(records, opt_out.format));
        } else if (analytic->parsed()) {
            namespace an = relaysim::analytics;
            const double rho = an::db_to_linear(an_snr1);
            const double rho_r = an::db_to_linear(an_snr2);
            std::ostringstream os;
            if (op == "feedback-overhead") {
                const auto fb = an::feedback_overhead(an_n, an_m, an_fc);
                os << "op,hop1_bits,hop2_bits,hop1_scaling,hop2_scaling\n"
                   << op << ',' << fb.hop1_bits << ',' << fb.hop2_bits << ",\""
                   << fb.hop1_scaling << "\",\"" << fb.hop2_scaling << "\"\n";
            } else if (op == "bound-record") {
                const auto rec = an::make_bound_record(an_n, an_m, rho, rho_r, an_s);
                os << "n,m,rho,rho_r,s,r1_lower,r2_exact,genie_upper,coop_upper\n"
                   << rec.n << ',' << rec.m << ',' << rec.rho << ',' << rec.rho_r
                   << ',' << rec.s << ',' << rec.r1_lower << ',' << rec.r2_exact
                   << ',' << rec.genie_upper << ',' << rec.coop_upper << '\n';
            } else {
                double value = 0.0;
                if (op == "prob-exactly-m-distinct")
                    value = an::prob_exactly_m_distinct(an_n, an_m);
                else if (op == "cdf-max-exp")
                    value = an::cdf_max_exp(an_x, an_n);
                else if (op == "cdf-interference")
                    value = an::cdf_interference(an_y, an_m);
                else if (op == "gaussian-approx-fy")
                    value = an::gaussian_approx_fy(an_y, an_m);
                else if (op == "r1-lower-bound")
                    value = an::r1_lower_bound(an_n, an_m, rho, an_s);
                else if (op == "default-threshold")
                    value = an::default_threshold(an_n);
                else if (op == "r2-closed-form")
                    value = an::r2_closed_form(an_n, an_m, rho_r);
                else if (op == "p-dest-success")
                    value = an::p_dest_success(an_m, rho_r);
                else if (op == "genie-upper")
                    value = an::genie_upper(an_n);
                else if (op == "genie-lower")
                    value = an::genie_lower(an_n, an_eps);
                else if (op == "coop-upper")
                    value = an::coop_upper(an_n, an_m);
                else if (op == "optimal-m-phase2")
                    value = an::optimal_m_phase2(an_n, rho_r);
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.10g", value);
                os << "op,value\n" << op << ',' << buf << '\n';
            }
            emit(an_out, os.str());
        } else if (genie->parsed()) {
            if (!genie_config.empty()) apply_config_file(genie, genie_config);
            const double rho = relaysim::analytics::db_to_linear(genie_snr1);
            if (!gamma_csv.empty()) {
                const relaysim::Matrix gamma = relaysim::load_matrix_csv(gamma_csv);
                const auto result =
                    method == "exhaustive"
                        ? relaysim::max_concurrent_exhaustive(gamma, rho, genie_beta)
                        : relaysim::max_concurrent_bnb(gamma, rho, genie_beta,
                                                       node_budget);
                emit(genie_out, genie_out.format == "json"
                                    ? format_genie_json(result)
                                    : format_genie_csv(result));
            } else if (genie_trials > 1) {
                const auto mc = relaysim::genie_throughput_mc(
                    genie_n, genie_m, rho, genie_beta, genie_trials,
                    relaysim::RngSpec{genie_seed, 0});
                std::ostringstream os;
                if (genie_out.format == "json") {
                    nlohmann::json obj{{"mean", mc.mean},
                                       {"stderr", mc.stderr_mean},
                                       {"trials", mc.trials},
                                       {"all_exact", mc.all_exact}};
                    os << obj.dump(2) << '\n';
                } else {
                    char buf[96];
                    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d,%s\n", mc.mean,
                                  mc.stderr_mean, mc.trials,
                                  mc.all_exact ? "true" : "false");
                    os << "mean,stderr,trials,all_exact\n" << buf;
                }
                emit(genie_out, os.str());
            } else {
                const auto real = relaysim::draw_realization(
                    genie_n, genie_m, relaysim::RngSpec{genie_seed, 0});
                if (!dump_gamma.empty())
                    relaysim::save_matrix_csv(dump_gamma, real.gamma);
                const auto result =
                    method == "exhaustive"
                        ? relaysim::max_concurrent_exhaustive(real.gamma, rho,
                                                              genie_beta)
                        : relaysim::max_concurrent_bnb(real.gamma, rho, genie_beta,
                                                       node_budget);
                emit(genie_out, genie_out.format == "json"
                                    ? format_genie_json(result)
                                    : format_genie_csv(result));
            }
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 0;
}
