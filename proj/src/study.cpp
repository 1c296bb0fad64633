#include "fracfem/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace fracfem {

namespace {

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad numeric field: " + s);
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct PlannedRun {
    double alpha;
    double delta;
    int grid;
    int steps;
    double rate_param;
};

}  // namespace

double StepRule::exponent(double alpha) const {
    return numerator / (over_two_minus_alpha ? 2.0 - alpha : alpha);
}

StepRule StepRule::coupled(const std::string& token) {
    StepRule rule;
    rule.kind = Kind::coupled;
    if (token == "2/alpha") {
        rule.numerator = 2.0;
        rule.over_two_minus_alpha = false;
    } else if (token == "2/(2-alpha)") {
        rule.numerator = 2.0;
        rule.over_two_minus_alpha = true;
    } else if (token == "1/alpha") {
        rule.numerator = 1.0;
        rule.over_two_minus_alpha = false;
    } else if (token == "1/(2-alpha)") {
        rule.numerator = 1.0;
        rule.over_two_minus_alpha = true;
    } else {
        throw std::invalid_argument("unknown coupling rule: " + token +
                                    " (expected 2/alpha, 2/(2-alpha), 1/alpha, 1/(2-alpha))");
    }
    return rule;
}

void StudyConfig::validate() const {
    if (alphas.empty()) throw std::invalid_argument("study config: no alpha values");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("study config: alpha must lie in (0,1)");
    if (!delta_optimal && !(delta >= 1.0))
        throw std::invalid_argument("study config: delta must be >= 1");
    if (grids.empty()) throw std::invalid_argument("study config: no grid values");
    for (int p : grids)
        if (p < 1) throw std::invalid_argument("study config: grid values must be positive");
    if (step_rule.kind == StepRule::Kind::coupled) {
        if (axis != StudyAxis::time)
            throw std::invalid_argument("study config: coupled N rule requires a time study");
    } else {
        if (step_rule.steps.empty())
            throw std::invalid_argument("study config: no step counts");
        for (int n : step_rule.steps)
            if (n < 1) throw std::invalid_argument("study config: step counts must be positive");
        if (axis == StudyAxis::space && step_rule.steps.size() != 1)
            throw std::invalid_argument("study config: space study takes a single step count");
        if (axis == StudyAxis::time && step_rule.steps.size() > 1 && grids.size() != 1)
            throw std::invalid_argument(
                "study config: explicit time study takes a single grid value");
    }
    if (format != "csv" && format != "json")
        throw std::invalid_argument("study config: format must be csv or json");
    if (jobs < 1) throw std::invalid_argument("study config: jobs must be positive");
    if (!(final_time > 0.0)) throw std::invalid_argument("study config: final time must be > 0");
}

double loglog_rate(double e1, double e2, double m1, double m2) {
    if (!(e1 > 0.0) || !(e2 > 0.0) || !(m1 > 0.0) || !(m2 > 0.0))
        throw std::invalid_argument("loglog_rate: requires positive inputs");
    return std::log(e1 / e2) / std::log(m2 / m1);
}

SingleRunResult run_single(const ProblemSpec& spec, int grid, int steps, double grading,
                           const RunOptions& options) {
    const DiscreteProblem problem = discretize(spec, grid, steps, grading);
    const SolveTrace trace = run(problem, options);
    const SeparableErrorEvaluator evaluator(problem.space, spec.spatial_profile,
                                            spec.spatial_profile_grad);
    SingleRunResult result;
    result.newton_iterations = trace.newton_iterations;
    for (int n = 1; n <= steps; ++n) {
        const double tf = spec.time_factor(problem.time_mesh.nodes[n]);
        const ErrorPair e = evaluator.evaluate(trace.solutions[n], tf);
        const ErrorPair c = evaluator.evaluate_centroid(trace.solutions[n], tf);
        result.l2_error = std::max(result.l2_error, e.l2);
        result.h1_error = std::max(result.h1_error, e.h1);
        result.l2_centroid = std::max(result.l2_centroid, c.l2);
        result.h1_centroid = std::max(result.h1_centroid, c.h1);
        if (n >= 2) result.max_step_residual = std::max(result.max_step_residual,
                                                        trace.step_residuals[n]);
    }
    return result;
}

StudyReport run_study(const StudyConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    std::vector<PlannedRun> plan;
    for (double alpha : config.alphas) {
        const double delta = config.delta_optimal ? (2.0 - alpha) / alpha : config.delta;
        std::vector<PlannedRun> block;
        if (config.step_rule.kind == StepRule::Kind::coupled) {
            const double expo = config.step_rule.exponent(alpha);
            for (int p : config.grids) {
                const double exact = std::pow(static_cast<double>(p), expo);
                const int n = std::max(1, static_cast<int>(std::floor(exact)));
                block.push_back({alpha, delta, p, n, exact});
            }
        } else if (config.axis == StudyAxis::space) {
            for (int p : config.grids)
                block.push_back(
                    {alpha, delta, p, config.step_rule.steps[0], static_cast<double>(p)});
        } else {
            for (int p : config.grids)
                for (int n : config.step_rule.steps)
                    block.push_back({alpha, delta, p, n, static_cast<double>(n)});
        }
        std::sort(block.begin(), block.end(), [](const PlannedRun& a, const PlannedRun& b) {
            return a.grid != b.grid ? a.grid < b.grid : a.steps < b.steps;
        });
        plan.insert(plan.end(), block.begin(), block.end());
    }

    StudyReport report;
    report.problem_id = config.problem_id;
    report.rows.resize(plan.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.size()) return;
            const PlannedRun& pr = plan[i];
            StudyRow& row = report.rows[i];
            row.alpha = pr.alpha;
            row.delta = pr.delta;
            row.grid = pr.grid;
            row.steps = pr.steps;
            row.rate_param = pr.rate_param;
            row.l2_error = std::numeric_limits<double>::quiet_NaN();
            row.h1_error = std::numeric_limits<double>::quiet_NaN();
            if (pr.steps > kLongRunSteps && !config.allow_long) {
                row.note = "long-running (N > 200000); rerun with allow_long";
                continue;
            }
            try {
                const ProblemSpec spec = [&] {
                    ProblemSpec s = problem_by_id(config.problem_id, pr.alpha);
                    s.final_time = config.final_time;
                    return s;
                }();
                const SingleRunResult res =
                    run_single(spec, pr.grid, pr.steps, pr.delta, config.run_options);
                row.l2_error = res.l2_error;
                row.h1_error = res.h1_error;
                row.l2_centroid = res.l2_centroid;
                row.h1_centroid = res.h1_centroid;
            } catch (const std::exception& e) {
                row.note = e.what();
            }
        }
    };

    const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(plan.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        StudyRow& cur = report.rows[i];
        const StudyRow& prev = report.rows[i - 1];
        if (prev.alpha != cur.alpha || prev.delta != cur.delta) continue;
        if (prev.rate_param == cur.rate_param) continue;
        if (std::isfinite(prev.l2_error) && std::isfinite(cur.l2_error) && prev.l2_error > 0.0 &&
            cur.l2_error > 0.0)
            cur.l2_rate = loglog_rate(prev.l2_error, cur.l2_error, prev.rate_param,
                                      cur.rate_param);
        if (std::isfinite(prev.h1_error) && std::isfinite(cur.h1_error) && prev.h1_error > 0.0 &&
            cur.h1_error > 0.0)
            cur.h1_rate = loglog_rate(prev.h1_error, cur.h1_error, prev.rate_param,
                                      cur.rate_param);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void write_report_csv(const StudyReport& report, std::ostream& out) {
    out << "alpha,delta,P,N,l2_error,h1_error,l2_rate,h1_rate\n";
    for (const StudyRow& row : report.rows) {
        out << format_double("%.17g", row.alpha) << ',' << format_double("%.17g", row.delta)
            << ',' << row.grid << ',' << row.steps << ',';
        if (std::isfinite(row.l2_error)) out << format_double("%.16e", row.l2_error);
        out << ',';
        if (std::isfinite(row.h1_error)) out << format_double("%.16e", row.h1_error);
        out << ',';
        if (row.l2_rate) out << format_double("%.16e", *row.l2_rate);
        out << ',';
        if (row.h1_rate) out << format_double("%.16e", *row.h1_rate);
        out << '\n';
    }
}

std::string report_to_csv(const StudyReport& report) {
    std::ostringstream out;
    write_report_csv(report, out);
    return out.str();
}

StudyReport parse_report_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("parse_report_csv: empty input");
    if (trim(line) != "alpha,delta,P,N,l2_error,h1_error,l2_rate,h1_rate")
        throw std::invalid_argument("parse_report_csv: unexpected header");
    StudyReport report;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        if (fields.size() != 8)
            throw std::invalid_argument("parse_report_csv: expected 8 fields");
        StudyRow row;
        row.alpha = parse_double(fields[0]);
        row.delta = parse_double(fields[1]);
        row.grid = static_cast<int>(parse_double(fields[2]));
        row.steps = static_cast<int>(parse_double(fields[3]));
        row.l2_error = fields[4].empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : parse_double(fields[4]);
        row.h1_error = fields[5].empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : parse_double(fields[5]);
        if (!fields[6].empty()) row.l2_rate = parse_double(fields[6]);
        if (!fields[7].empty()) row.h1_rate = parse_double(fields[7]);
        report.rows.push_back(row);
    }
    return report;
}

void write_report_json(const StudyReport& report, std::ostream& out) {
    nlohmann::json j;
    j["problem"] = report.problem_id;
    j["tool_version"] = report.tool_version;
    j["wall_seconds"] = report.wall_seconds;
    j["rows"] = nlohmann::json::array();
    for (const StudyRow& row : report.rows) {
        nlohmann::json r;
        r["alpha"] = row.alpha;
        r["delta"] = row.delta;
        r["P"] = row.grid;
        r["N"] = row.steps;
        r["l2_error"] = row.l2_error;
        r["h1_error"] = row.h1_error;
        r["l2_rate"] = row.l2_rate ? nlohmann::json(*row.l2_rate) : nlohmann::json();
        r["h1_rate"] = row.h1_rate ? nlohmann::json(*row.h1_rate) : nlohmann::json();
        r["rate_param"] = row.rate_param;
        if (!row.note.empty()) r["note"] = row.note;
        j["rows"].push_back(std::move(r));
    }
    out << j.dump(2) << '\n';
}

void write_report_file(const StudyReport& report, const std::string& format,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (format == "csv")
        write_report_csv(report, out);
    else if (format == "json")
        write_report_json(report, out);
    else
        throw std::invalid_argument("unknown report format: " + format);
    if (!out.good()) throw std::runtime_error("write failure on: " + path);
}

namespace {

struct Series {
    double alpha;
    double delta;
    std::vector<std::array<double, 2>> log_points;  // (log10 m, log10 e)
};

const char* kSeriesColors[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string render_loglog_svg(const StudyReport& report, NormKind norm) {
    const bool use_h1 = norm == NormKind::h1;
    std::vector<Series> series;
    for (const StudyRow& row : report.rows) {
        const double err = use_h1 ? row.h1_error : row.l2_error;
        if (!(std::isfinite(err) && err > 0.0 && row.rate_param > 0.0)) continue;
        if (series.empty() || series.back().alpha != row.alpha ||
            series.back().delta != row.delta)
            series.push_back({row.alpha, row.delta, {}});
        series.back().log_points.push_back({std::log10(row.rate_param), std::log10(err)});
    }
    if (series.empty()) throw std::invalid_argument("render_loglog_svg: no plottable rows");
    for (const Series& s : series)
        if (s.log_points.size() < 2)
            throw std::invalid_argument(
                "render_loglog_svg: every (alpha, delta) series needs at least 2 rows");

    double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
    for (const Series& s : series) {
        for (const auto& p : s.log_points) {
            lx_min = std::min(lx_min, p[0]);
            lx_max = std::max(lx_max, p[0]);
            ly_min = std::min(ly_min, p[1]);
            ly_max = std::max(ly_max, p[1]);
        }
    }
    const double pad_x = 0.05 * std::max(0.2, lx_max - lx_min);
    const double pad_y = 0.05 * std::max(0.2, ly_max - ly_min);
    lx_min -= pad_x;
    lx_max += pad_x;
    ly_min -= pad_y;
    ly_max += pad_y;

    const double scale = 160.0;  // px per decade, both axes
    const double ml = 70.0, mt = 30.0, mr = 30.0, mb = 50.0;
    const double plot_w = (lx_max - lx_min) * scale;
    const double plot_h = (ly_max - ly_min) * scale;
    const double width = ml + plot_w + mr;
    const double height = mt + plot_h + mb;
    const auto sx = [&](double lx) { return ml + (lx - lx_min) * scale; };
    const auto sy = [&](double ly) { return mt + (ly_max - ly) * scale; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double("%.0f", width)
        << "\" height=\"" << format_double("%.0f", height) << "\" viewBox=\"0 0 "
        << format_double("%.0f", width) << ' ' << format_double("%.0f", height) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << format_double("%.2f", ml) << "\" y=\"" << format_double("%.2f", mt)
        << "\" width=\"" << format_double("%.2f", plot_w) << "\" height=\""
        << format_double("%.2f", plot_h)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // decade grid lines and labels
    for (int k = static_cast<int>(std::ceil(lx_min)); k <= static_cast<int>(std::floor(lx_max));
         ++k) {
        const double x = sx(k);
        svg << "<line x1=\"" << format_double("%.2f", x) << "\" y1=\""
            << format_double("%.2f", mt) << "\" x2=\"" << format_double("%.2f", x)
            << "\" y2=\"" << format_double("%.2f", mt + plot_h)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << format_double("%.2f", x) << "\" y=\""
            << format_double("%.2f", mt + plot_h + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">1e" << k
            << "</text>\n";
    }
    for (int k = static_cast<int>(std::ceil(ly_min)); k <= static_cast<int>(std::floor(ly_max));
         ++k) {
        const double y = sy(k);
        svg << "<line x1=\"" << format_double("%.2f", ml) << "\" y1=\""
            << format_double("%.2f", y) << "\" x2=\"" << format_double("%.2f", ml + plot_w)
            << "\" y2=\"" << format_double("%.2f", y)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << format_double("%.2f", ml - 6) << "\" y=\""
            << format_double("%.2f", y + 4)
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">1e" << k
            << "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        svg << "<polyline class=\"data\" fill=\"none\" stroke=\""
            << kSeriesColors[s % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].log_points.size(); ++i) {
            if (i) svg << ' ';
            svg << format_double("%.6f", sx(series[s].log_points[i][0])) << ','
                << format_double("%.6f", sy(series[s].log_points[i][1]));
        }
        svg << "\"/>\n";
        const auto& last = series[s].log_points.back();
        svg << "<text x=\"" << format_double("%.2f", sx(last[0]) + 5) << "\" y=\""
            << format_double("%.2f", sy(last[1]))
            << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << kSeriesColors[s % 6]
            << "\">a=" << format_double("%.3g", series[s].alpha) << ", d="
            << format_double("%.3g", series[s].delta) << "</text>\n";
    }

    // reference guide: mean endpoint slope over the series
    double slope = 0.0;
    for (const Series& s : series) {
        const auto& a = s.log_points.front();
        const auto& b = s.log_points.back();
        slope += (a[1] - b[1]) / (b[0] - a[0]);
    }
    slope /= static_cast<double>(series.size());
    const double gy0 = ly_max - 0.02 * (ly_max - ly_min);
    svg << "<polyline class=\"guide\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\" "
           "stroke-dasharray=\"5,4\" points=\""
        << format_double("%.6f", sx(lx_min)) << ',' << format_double("%.6f", sy(gy0)) << ' '
        << format_double("%.6f", sx(lx_max)) << ','
        << format_double("%.6f", sy(gy0 - slope * (lx_max - lx_min))) << "\"/>\n";
    svg << "<text x=\"" << format_double("%.2f", ml + 8) << "\" y=\""
        << format_double("%.2f", mt + 16)
        << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"#555555\">"
        << (use_h1 ? "H1" : "L2") << " error, guide slope " << format_double("%.4f", slope)
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_loglog_plot(const StudyReport& report, NormKind norm, const std::string& path) {
    const std::string svg = render_loglog_svg(report, norm);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open plot file: " + path);
    out << svg;
    if (!out.good()) throw std::runtime_error("write failure on: " + path);
}

void apply_config_entry(StudyConfig& config, const std::string& key, const std::string& value) {
    if (key == "problem") {
        config.problem_id = value;
    } else if (key == "alpha") {
        config.alphas.clear();
        for (const std::string& tok : split(value, ','))
            config.alphas.push_back(parse_double(trim(tok)));
    } else if (key == "delta") {
        if (value == "optimal") {
            config.delta_optimal = true;
        } else {
            config.delta_optimal = false;
            config.delta = parse_double(value);
        }
    } else if (key == "axis") {
        if (value == "space")
            config.axis = StudyAxis::space;
        else if (value == "time")
            config.axis = StudyAxis::time;
        else
            throw std::invalid_argument("axis must be space or time");
    } else if (key == "grid") {
        config.grids.clear();
        for (const std::string& tok : split(value, ','))
            config.grids.push_back(static_cast<int>(parse_double(trim(tok))));
    } else if (key == "steps") {
        config.step_rule.kind = StepRule::Kind::explicit_list;
        config.step_rule.steps.clear();
        for (const std::string& tok : split(value, ','))
            config.step_rule.steps.push_back(static_cast<int>(parse_double(trim(tok))));
    } else if (key == "couple") {
        config.step_rule = StepRule::coupled(value);
    } else if (key == "norm") {
        if (value == "l2")
            config.norm = NormKind::l2;
        else if (value == "h1")
            config.norm = NormKind::h1;
        else if (value == "both")
            config.norm = NormKind::both;
        else
            throw std::invalid_argument("norm must be l2, h1 or both");
    } else if (key == "out") {
        config.out_path = value;
    } else if (key == "format") {
        config.format = value;
    } else if (key == "plot") {
        config.plot_path = value;
    } else if (key == "allow_long") {
        config.allow_long = value == "true" || value == "1" || value == "yes";
    } else if (key == "jobs") {
        config.jobs = static_cast<int>(parse_double(value));
    } else if (key == "final_time") {
        config.final_time = parse_double(value);
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

StudyConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    StudyConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        try {
            apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return config;
}

}  // namespace fracfem
