#ifndef FRACFEM_STUDY_HPP
#define FRACFEM_STUDY_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracfem/problems.hpp"
#include "fracfem/scheme.hpp"

namespace fracfem {

inline constexpr const char* kToolVersion = "0.1.0";
/// Runs with more steps than this require an explicit allow_long opt-in.
inline constexpr int kLongRunSteps = 200000;

enum class StudyAxis { space, time };
enum class NormKind { l2, h1, both };

/// How N is chosen per run: an explicit list, or coupled to the grid as
/// floor(P^e) with e in {2/alpha, 2/(2-alpha), 1/alpha, 1/(2-alpha)}.
struct StepRule {
    enum class Kind { explicit_list, coupled } kind = Kind::explicit_list;
    std::vector<int> steps;
    double numerator = 2.0;
    bool over_two_minus_alpha = false;

    double exponent(double alpha) const;
    /// tokens: "2/alpha", "2/(2-alpha)", "1/alpha", "1/(2-alpha)"
    static StepRule coupled(const std::string& token);
};

struct StudyConfig {
    std::string problem_id = "kirchhoff-sin";
    std::vector<double> alphas;
    bool delta_optimal = false;  // delta = (2-alpha)/alpha per alpha
    double delta = 1.0;
    StudyAxis axis = StudyAxis::space;
    std::vector<int> grids;
    StepRule step_rule;
    NormKind norm = NormKind::both;
    std::string out_path;
    std::string format = "csv";
    std::string plot_path;
    bool allow_long = false;
    int jobs = 1;
    double final_time = 1.0;
    RunOptions run_options;

    void validate() const;
};

struct StudyRow {
    double alpha = 0.0;
    double delta = 1.0;
    int grid = 0;
    int steps = 0;
    double l2_error = 0.0;
    double h1_error = 0.0;
    std::optional<double> l2_rate;
    std::optional<double> h1_rate;
    /// Mesh parameter entering the log-log rate: P for space studies, N for
    /// explicit time studies, the unfloored power P^e for coupled studies.
    double rate_param = 0.0;
    // centroid-sampled errors, kept in memory for table comparisons; the
    // CSV schema stays fixed to the eight pinned columns
    double l2_centroid = 0.0;
    double h1_centroid = 0.0;
    std::string note;  // per-run failure text, empty on success
};

struct StudyReport {
    std::string problem_id;
    std::string tool_version = kToolVersion;
    double wall_seconds = 0.0;
    std::vector<StudyRow> rows;
};

/// log(e1/e2) / log(m2/m1); positive when errors shrink as the mesh grows.
double loglog_rate(double e1, double e2, double m1, double m2);

struct SingleRunResult {
    double l2_error = 0.0;
    double h1_error = 0.0;
    // centroid-sampled counterparts (the convention of the reference tables)
    double l2_centroid = 0.0;
    double h1_centroid = 0.0;
    int newton_iterations = 0;
    double max_step_residual = 0.0;
};

/// One solve; errors are max over levels n = 1..N of the per-level norms.
SingleRunResult run_single(const ProblemSpec& spec, int grid, int steps, double grading,
                           const RunOptions& options = {});

StudyReport run_study(const StudyConfig& config);

void write_report_csv(const StudyReport& report, std::ostream& out);
void write_report_json(const StudyReport& report, std::ostream& out);
std::string report_to_csv(const StudyReport& report);
StudyReport parse_report_csv(std::istream& in);
void write_report_file(const StudyReport& report, const std::string& format,
                       const std::string& path);

/// Standalone SVG log-log plot: one data polyline per (alpha, delta) series
/// plus a dashed reference-slope guide. Equal per-decade scaling on both
/// axes, so a polyline segment's svg-coordinate slope equals the rate.
std::string render_loglog_svg(const StudyReport& report, NormKind norm);
void emit_loglog_plot(const StudyReport& report, NormKind norm, const std::string& path);

/// Flat key = value file with '#' comments; unknown keys are rejected.
StudyConfig parse_config_file(const std::string& path);
void apply_config_entry(StudyConfig& config, const std::string& key, const std::string& value);

}  // namespace fracfem

#endif
