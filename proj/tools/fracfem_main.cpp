// Command-line front end: single solves, convergence studies, kernel dumps.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracfem/study.hpp"

namespace {

using namespace fracfem;

struct StudyCliFlags {
    std::string config_path;
    std::string example;
    std::string alphas;
    double delta = 1.0;
    bool delta_optimal = false;
    std::string axis;
    std::string grids;
    std::string steps;
    std::string couple;
    std::string norm;
    std::string out;
    std::string format;
    std::string plot;
    int jobs = 0;
    bool allow_long = false;
    double final_time = 0.0;
};

void print_report_summary(const StudyReport& report) {
    std::printf("%-8s %-8s %-5s %-8s %-14s %-14s %-9s %-9s\n", "alpha", "delta", "P", "N",
                "l2_error", "h1_error", "l2_rate", "h1_rate");
    for (const StudyRow& row : report.rows) {
        std::printf("%-8.4g %-8.4g %-5d %-8d ", row.alpha, row.delta, row.grid, row.steps);
        if (std::isfinite(row.l2_error))
            std::printf("%-14.6e %-14.6e ", row.l2_error, row.h1_error);
        else
            std::printf("%-14s %-14s ", "-", "-");
        if (row.l2_rate)
            std::printf("%-9.4f ", *row.l2_rate);
        else
            std::printf("%-9s ", "-");
        if (row.h1_rate)
            std::printf("%-9.4f", *row.h1_rate);
        else
            std::printf("%-9s", "-");
        if (!row.note.empty()) std::printf("  [%s]", row.note.c_str());
        std::printf("\n");
    }
    std::printf("wall time: %.2f s\n", report.wall_seconds);
}

int run_solve(const std::string& example, double alpha, double delta, bool delta_optimal,
              int grid, int steps, double final_time, bool allow_long, const std::string& out,
              const std::string& format) {
    StudyConfig config;
    config.problem_id = example;
    config.alphas = {alpha};
    config.delta = delta;
    config.delta_optimal = delta_optimal;
    config.axis = StudyAxis::space;
    config.grids = {grid};
    config.step_rule.kind = StepRule::Kind::explicit_list;
    config.step_rule.steps = {steps};
    config.final_time = final_time;
    config.allow_long = allow_long;
    const StudyReport report = run_study(config);
    print_report_summary(report);
    if (!report.rows.empty() && !report.rows[0].note.empty())
        throw std::runtime_error("run failed: " + report.rows[0].note);
    if (!out.empty()) write_report_file(report, format, out);
    return 0;
}

int run_study_command(const StudyCliFlags& flags, const CLI::App& cmd) {
    StudyConfig config;
    if (!flags.config_path.empty()) config = parse_config_file(flags.config_path);
    // command line wins over the config file
    if (cmd.count("--example")) config.problem_id = flags.example;
    if (cmd.count("--alpha")) apply_config_entry(config, "alpha", flags.alphas);
    if (cmd.count("--delta")) apply_config_entry(config, "delta", std::to_string(flags.delta));
    if (cmd.count("--delta-optimal")) apply_config_entry(config, "delta", "optimal");
    if (cmd.count("--axis")) apply_config_entry(config, "axis", flags.axis);
    if (cmd.count("--grid")) apply_config_entry(config, "grid", flags.grids);
    if (cmd.count("--steps")) apply_config_entry(config, "steps", flags.steps);
    if (cmd.count("--couple")) apply_config_entry(config, "couple", flags.couple);
    if (cmd.count("--norm")) apply_config_entry(config, "norm", flags.norm);
    if (cmd.count("--out")) config.out_path = flags.out;
    if (cmd.count("--format")) config.format = flags.format;
    if (cmd.count("--plot")) config.plot_path = flags.plot;
    if (cmd.count("--jobs")) config.jobs = flags.jobs;
    if (cmd.count("--allow-long")) config.allow_long = true;
    if (cmd.count("--final-time")) config.final_time = flags.final_time;

    const StudyReport report = run_study(config);
    print_report_summary(report);
    if (!config.out_path.empty()) write_report_file(report, config.format, config.out_path);
    if (!config.plot_path.empty()) {
        const NormKind plot_norm =
            config.norm == NormKind::h1 ? NormKind::h1 : NormKind::l2;
        emit_loglog_plot(report, plot_norm, config.plot_path);
    }
    return 0;
}

int run_kernels(int steps, double alpha, double delta, double final_time,
                std::vector<int> levels, const std::string& out) {
    const GradedTimeMesh mesh = build_graded_mesh(final_time, steps, delta);
    if (levels.empty()) levels.push_back(steps);
    std::ostringstream text;
    text << "n,j,k\n";
    for (int level : levels) {
        const L1KernelRow row = l1_kernels(mesh, alpha, level);
        for (int j = 1; j <= level; ++j) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.16e", row.kernels[j - 1]);
            text << level << ',' << j << ',' << buf << '\n';
        }
    }
    if (out.empty()) {
        std::cout << text.str();
    } else {
        std::ofstream file(out);
        if (!file) throw std::runtime_error("cannot open output file: " + out);
        file << text.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearized L1 Galerkin solver for Kirchhoff-type time-fractional "
                 "integro-differential equations on graded meshes"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "run a single space-time solve");
    std::string s_example = "kirchhoff-sin";
    double s_alpha = 0.5, s_delta = 1.0, s_final_time = 1.0;
    bool s_delta_optimal = false, s_allow_long = false;
    int s_grid = 0, s_steps = 0;
    std::string s_out, s_format = "csv";
    solve_cmd->add_option("--example", s_example, "problem id (kirchhoff-sin | kirchhoff-poly)");
    solve_cmd->add_option("--alpha", s_alpha, "fractional order in (0,1)")->required();
    solve_cmd->add_option("--delta", s_delta, "temporal grading exponent (>= 1)");
    solve_cmd->add_flag("--delta-optimal", s_delta_optimal, "use delta = (2-alpha)/alpha");
    solve_cmd->add_option("--grid", s_grid, "spatial subdivisions P")->required();
    solve_cmd->add_option("--steps", s_steps, "time steps N")->required();
    solve_cmd->add_option("--final-time", s_final_time, "final time T");
    solve_cmd->add_option("--out", s_out, "report output path");
    solve_cmd->add_option("--format", s_format, "csv | json");
    solve_cmd->add_flag("--allow-long", s_allow_long, "permit runs with N > 200000");

    // study
    auto* study_cmd = app.add_subcommand("study", "run a convergence study");
    StudyCliFlags flags;
    study_cmd->add_option("--config", flags.config_path, "key = value config file");
    study_cmd->add_option("--example", flags.example, "problem id");
    study_cmd->add_option("--alpha", flags.alphas, "comma-separated alpha list");
    study_cmd->add_option("--delta", flags.delta, "grading exponent");
    study_cmd->add_flag("--delta-optimal", "use delta = (2-alpha)/alpha");
    study_cmd->add_option("--axis", flags.axis, "space | time");
    study_cmd->add_option("--grid", flags.grids, "comma-separated P list");
    study_cmd->add_option("--steps", flags.steps, "comma-separated N list");
    study_cmd->add_option("--couple", flags.couple,
                          "N = floor(P^e): 2/alpha, 2/(2-alpha), 1/alpha, 1/(2-alpha)");
    study_cmd->add_option("--norm", flags.norm, "l2 | h1 | both");
    study_cmd->add_option("--out", flags.out, "report output path");
    study_cmd->add_option("--format", flags.format, "csv | json");
    study_cmd->add_option("--plot", flags.plot, "SVG log-log plot path");
    study_cmd->add_option("--jobs", flags.jobs, "parallel workers");
    study_cmd->add_flag("--allow-long", "permit runs with N > 200000");
    study_cmd->add_option("--final-time", flags.final_time, "final time T");

    // kernels
    auto* kernels_cmd = app.add_subcommand("kernels", "dump L1 kernel rows");
    int k_steps = 0;
    double k_alpha = 0.5, k_delta = 1.0, k_final_time = 1.0;
    std::vector<int> k_levels;
    std::string k_out;
    kernels_cmd->add_option("--steps", k_steps, "time steps N")->required();
    kernels_cmd->add_option("--alpha", k_alpha, "fractional order in (0,1)")->required();
    kernels_cmd->add_option("--delta", k_delta, "grading exponent");
    kernels_cmd->add_option("--final-time", k_final_time, "final time T");
    kernels_cmd->add_option("--level", k_levels, "levels to dump (default: N)");
    kernels_cmd->add_option("--out", k_out, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (solve_cmd->parsed())
            return run_solve(s_example, s_alpha, s_delta, s_delta_optimal, s_grid, s_steps,
                             s_final_time, s_allow_long, s_out, s_format);
        if (study_cmd->parsed()) return run_study_command(flags, *study_cmd);
        if (kernels_cmd->parsed())
            return run_kernels(k_steps, k_alpha, k_delta, k_final_time, k_levels, k_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code != 0)
            std::cerr << nlohmann::json{{"error", std::string("argument error: ") + e.what()}}
                      << '\n';
        return code;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}} << '\n';
        return 1;
    }
    return 0;
}
