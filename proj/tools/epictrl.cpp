// Command-line driver wiring ingestion -> calibration -> economics ->
// environment -> training -> evaluation -> export.
//
// Exit codes: 0 success, 2 usage, 3 data, 4 numeric/convergence, 5 internal.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epictrl/calib/fit.hpp"
#include "epictrl/common/errors.hpp"
#include "epictrl/data/ingest.hpp"
#include "epictrl/econ/gdp.hpp"
#include "epictrl/env/mdp.hpp"
#include "epictrl/rl/agent.hpp"

using nlohmann::json;
using namespace epictrl;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Run manifest: inputs, flags, seed, version and input content hashes. It is
// embedded in every produced artifact so outputs are traceable and reruns are
// comparable byte for byte.
// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct Manifest {
    std::string subcommand;
    std::map<std::string, std::string> inputs; // path -> content hash
    std::map<std::string, std::string> flags;
    std::uint64_t seed = 0;

    void add_input(const std::string& path)
    {
        inputs[path] = fnv1a_hex(read_file(path));
    }

    json to_json() const
    {
        json j;
        j["subcommand"] = subcommand;
        j["version"] = kVersion;
        j["seed"] = seed;
        j["inputs"] = inputs;
        j["flags"] = flags;
        return j;
    }

    /// Leading comment block for CSV artifacts.
    std::string csv_header() const
    {
        std::ostringstream out;
        out << "# epictrl " << kVersion << " " << subcommand << "\n";
        for (const auto& [path, hash] : inputs) {
            out << "# input: " << path << " " << hash << "\n";
        }
        for (const auto& [key, value] : flags) {
            out << "# flag: " << key << "=" << value << "\n";
        }
        out << "# seed: " << seed << "\n";
        return out.str();
    }
};

void write_text(const std::string& path, const std::string& text)
{
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("failed to write " + path);
    }
}

void write_json_artifact(const std::string& path, json j, const Manifest& manifest)
{
    j["manifest"] = manifest.to_json();
    write_text(path, j.dump(2) + "\n");
}

/// Full-precision number formatting for files.
std::string full(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// 6-significant-digit formatting for console output.
std::string sig6(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared option plumbing
// ---------------------------------------------------------------------------

std::string default_data_dir()
{
    if (const char* dir = std::getenv("EPICTRL_DATA_DIR")) {
        return dir;
    }
    return "data";
}

struct CommonOpts {
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    std::string config_path; // JSON override file for RewardConfig/TrainConfig
};

void add_common(CLI::App* cmd, CommonOpts& opts)
{
    cmd->add_option("--output-dir", opts.output_dir, "Directory for produced artifacts");
    cmd->add_option("--seed", opts.seed, "Master random seed");
    cmd->add_option("--config", opts.config_path,
                    "JSON file overriding reward/training constants");
}

void apply_reward_overrides(const json& j, env::RewardConfig& r)
{
    if (!j.contains("reward")) {
        return;
    }
    const json& o = j.at("reward");
    r.re_high = o.value("re_high", r.re_high);
    r.re_mid = o.value("re_mid", r.re_mid);
    r.penalty_re_coeff = o.value("penalty_re_coeff", r.penalty_re_coeff);
    r.gdp_mid_coeff = o.value("gdp_mid_coeff", r.gdp_mid_coeff);
    r.gdp_low_coeff = o.value("gdp_low_coeff", r.gdp_low_coeff);
    r.infect_threshold = o.value("infect_threshold", r.infect_threshold);
    r.infect_penalty = o.value("infect_penalty", r.infect_penalty);
    r.infect_bonus = o.value("infect_bonus", r.infect_bonus);
    r.change_coeff = o.value("change_coeff", r.change_coeff);
}

void apply_train_overrides(const json& j, rl::TrainConfig& t)
{
    if (!j.contains("train")) {
        return;
    }
    const json& o = j.at("train");
    t.discount = o.value("discount", t.discount);
    t.total_steps = o.value("total_steps", t.total_steps);
    t.epsilon_start = o.value("epsilon_start", t.epsilon_start);
    t.epsilon_end = o.value("epsilon_end", t.epsilon_end);
    t.epsilon_decay_steps = o.value("epsilon_decay_steps", t.epsilon_decay_steps);
    t.batch_size = o.value("batch_size", t.batch_size);
    t.learning_rate = o.value("learning_rate", t.learning_rate);
    t.target_refresh = o.value("target_refresh", t.target_refresh);
    t.replay_capacity = o.value("replay_capacity", t.replay_capacity);
    t.updates_per_step = o.value("updates_per_step", t.updates_per_step);
}

json load_config_overrides(const std::string& path)
{
    if (path.empty()) {
        return json::object();
    }
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ConfigError("invalid config file " + path + ": " + e.what());
    }
}

data::DatasetBundle load_bundle(const std::string& path)
{
    return data::DatasetBundle::load(path);
}

// ---------------------------------------------------------------------------
// Fit helpers shared between `fit` and `window-search`
// ---------------------------------------------------------------------------

json fit_result_json(const calib::FitResult& r)
{
    json j;
    j["beta"] = r.params.beta;
    j["gamma"] = r.params.gamma;
    j["r0"] = r.params.r0();
    if (r.nu) {
        j["nu"] = *r.nu;
    }
    if (r.nu_schedule) {
        j["vaccination"] = {{"start_date", r.nu_schedule->start_date().to_string()},
                            {"window_length", r.nu_schedule->window_length()},
                            {"rates", r.nu_schedule->rates()}};
    }
    j["loss_sir"] = r.loss_sir;
    j["loss_i"] = r.loss_i;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    return j;
}

void print_fit(const std::string& name, const calib::FitResult& r)
{
    std::cout << name << ": beta=" << sig6(r.params.beta)
              << " gamma=" << sig6(r.params.gamma);
    if (r.nu) {
        std::cout << " nu=" << sig6(*r.nu);
    }
    std::cout << " loss_sir=" << sig6(r.loss_sir) << " loss_i=" << sig6(r.loss_i)
              << (r.converged ? "" : " (not converged)") << "\n";
}

struct ChainResult {
    calib::FitResult fit;
    std::optional<calib::WindowSearchResult> windows; // set for the final model
};

/// Runs one of the four model fits. The "final" variant chains the
/// constant-rate fit, the vaccination-window search and a re-fit with the
/// chosen schedule.
ChainResult run_fit(const data::DatasetBundle& bundle, const std::string& model,
                    const calib::FitOptions& opts)
{
    if (model == "simple") {
        return {calib::fit_simple_sir(bundle.observed, opts), std::nullopt};
    }
    if (model == "lockdown") {
        return {calib::fit_lockdown_sir(bundle.observed, bundle.stringency, opts),
                std::nullopt};
    }
    if (model == "lockdown-vax") {
        return {calib::fit_lockdown_vax_sir(bundle.observed, bundle.stringency, opts),
                std::nullopt};
    }
    if (model == "final") {
        const auto base =
            calib::fit_lockdown_vax_sir(bundle.observed, bundle.stringency, opts);
        auto windows = calib::window_search(bundle.observed, bundle.stringency,
                                            base.params.beta, base.params.gamma, opts);
        const calib::WindowEntry* chosen = &windows.entries.front();
        for (const auto& e : windows.entries) {
            if (e.length == windows.chosen_length) {
                chosen = &e;
            }
        }
        auto refit = calib::refit_with_schedule(bundle.observed, bundle.stringency,
                                                chosen->schedule, opts);
        return {std::move(refit), std::move(windows)};
    }
    throw CLI::ValidationError("--model",
                               "unknown model '" + model +
                                   "' (expected simple, lockdown, lockdown-vax, final)");
}

env::EnvConfig build_env_config(const data::DatasetBundle& bundle,
                                const calib::FitResult& fit,
                                const env::RewardConfig& reward, std::size_t history_k)
{
    if (!fit.nu_schedule) {
        throw FitError("environment export needs a fitted vaccination schedule; "
                       "use --model final");
    }
    env::EnvConfig cfg;
    cfg.params = fit.params;
    cfg.vaccination = *fit.nu_schedule;
    cfg.gdp = econ::fit_cubic(bundle.stringency.values(), bundle.gdp_daily.values);
    cfg.init = bundle.observed.initial();
    cfg.initial_stringency = bundle.stringency.values().front();
    cfg.horizon = bundle.observed.size() - 1;
    cfg.reward = reward;
    cfg.history_k = history_k;
    return cfg;
}

std::string window_table_csv(const calib::WindowSearchResult& ws, const Manifest& m)
{
    std::ostringstream out;
    out << m.csv_header();
    out << "window_length,loss_sir,loss_i,chosen\n";
    for (const auto& e : ws.entries) {
        out << e.length << ',' << full(e.loss_sir) << ',' << full(e.loss_i) << ','
            << (e.length == ws.chosen_length ? 1 : 0) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Rollout / replay serialization: one row per day with the full panel set.
// ---------------------------------------------------------------------------

std::string outcomes_csv(const std::vector<env::StepOutcome>& outcomes,
                         const std::string& provenance, const Manifest& m,
                         const std::vector<double>* filtered_stringency)
{
    std::ostringstream out;
    out << m.csv_header();
    out << "day,stringency,filtered_stringency,infected_prop,susceptible_prop,"
           "recovered_prop,norm_gdp,r_eff,reward,re_gdp_term,infection_term,"
           "change_term,cumulative_reward,provenance\n";
    double cumulative = 0.0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto& o = outcomes[k];
        cumulative += o.reward;
        const double fs = filtered_stringency ? (*filtered_stringency)[k]
                                              : o.state.stringency;
        out << o.day_index << ',' << full(o.state.stringency) << ',' << full(fs) << ','
            << full(o.state.i_prop) << ',' << full(o.state.s_prop) << ','
            << full(o.state.r_prop) << ',' << full(o.state.norm_gdp) << ','
            << full(o.state.r_eff) << ',' << full(o.reward) << ','
            << full(o.reward_terms.re_gdp_term) << ','
            << full(o.reward_terms.infection_term) << ','
            << full(o.reward_terms.change_term) << ',' << full(cumulative) << ','
            << provenance << '\n';
    }
    return out.str();
}

struct DayRow {
    double day = 0.0;
    std::vector<double> cols;
};

/// Reads one of this tool's outcome CSVs back (comment lines skipped).
std::vector<std::map<std::string, double>> read_outcomes_csv(const std::string& path)
{
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::string> header;
    std::vector<std::map<std::string, double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) {
            fields.push_back(field);
        }
        if (header.empty()) {
            header = fields;
            continue;
        }
        std::map<std::string, double> row;
        for (std::size_t k = 0; k < header.size() && k < fields.size(); ++k) {
            if (header[k] == "provenance") {
                continue;
            }
            try {
                row[header[k]] = std::stod(fields[k]);
            } catch (const std::exception&) {
                throw ParseError("bad numeric field '" + fields[k] + "' in " + path);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("no data rows in " + path);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Minimal SVG line-chart rendering for the exported figure panels.
// ---------------------------------------------------------------------------

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<double> y;
};

std::string render_svg(const std::string& title, const std::vector<PlotSeries>& series)
{
    const double width = 720, height = 400;
    const double ml = 70, mr = 20, mt = 40, mb = 40;
    double lo = 1e308, hi = -1e308;
    std::size_t n = 0;
    for (const auto& s : series) {
        n = std::max(n, s.y.size());
        for (double v : s.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi <= lo) {
        hi = lo + 1.0;
    }
    const double span = hi - lo;
    lo -= 0.05 * span;
    hi += 0.05 * span;

    const auto x_at = [&](std::size_t k) {
        return ml + (width - ml - mr) * static_cast<double>(k) /
                        static_cast<double>(std::max<std::size_t>(n - 1, 1));
    };
    const auto y_at = [&](double v) {
        return height - mb - (height - mt - mb) * (v - lo) / (hi - lo);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double v = lo + (hi - lo) * tick / 4.0;
        svg << "<text x=\"" << ml - 6 << "\" y=\"" << y_at(v) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << sig6(v) << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        svg << "<polyline fill=\"none\" stroke=\"" << series[s].color
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[s].y.size(); ++k) {
            svg << x_at(k) << ',' << y_at(series[s].y[k]) << ' ';
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << width - mr - 10 << "\" y=\"" << mt + 16 * (s + 1)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
            << "fill=\"" << series[s].color << "\">" << series[s].label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void export_panel(const std::string& out_dir, const std::string& name,
                  const std::string& title, const std::string& unit,
                  const std::vector<PlotSeries>& series, const Manifest& manifest)
{
    std::ostringstream csv;
    csv << manifest.csv_header();
    csv << "day";
    for (const auto& s : series) {
        csv << ',' << s.label << " [" << unit << "]";
    }
    csv << '\n';
    std::size_t n = 0;
    for (const auto& s : series) {
        n = std::max(n, s.y.size());
    }
    for (std::size_t k = 0; k < n; ++k) {
        csv << k;
        for (const auto& s : series) {
            csv << ',' << (k < s.y.size() ? full(s.y[k]) : "");
        }
        csv << '\n';
    }
    write_text(out_dir + "/" + name + ".csv", csv.str());
    write_text(out_dir + "/" + name + ".svg", render_svg(title, series));
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

int cmd_ingest(const CommonOpts& common, const std::string& stringency_csv,
               const std::string& cases_csv, const std::string& gdp_csv,
               const std::string& country, double population, const std::string& start,
               const std::string& end, bool subtract_deaths, int max_gap)
{
    Manifest manifest;
    manifest.subcommand = "ingest";
    manifest.seed = common.seed;
    manifest.add_input(stringency_csv);
    manifest.add_input(cases_csv);
    manifest.add_input(gdp_csv);
    manifest.flags = {{"country", country},
                      {"population", full(population)},
                      {"start", start},
                      {"end", end},
                      {"subtract_deaths", subtract_deaths ? "1" : "0"},
                      {"max_gap", std::to_string(max_gap)}};

    const Date range_start = Date::parse(start);
    const Date range_end = Date::parse(end);
    data::IngestOptions opts;
    opts.subtract_deaths = subtract_deaths;
    opts.max_gap_days = max_gap;
    data::IngestWarnings warnings;

    auto stringency = data::load_stringency_csv(stringency_csv, country, range_start,
                                                range_end, &warnings);
    auto observed = data::load_compartments_csv(cases_csv, population, range_start,
                                                range_end, opts, &warnings);
    auto quarters = data::load_gdp_csv(gdp_csv, country);
    auto gdp_daily = econ::quarterly_to_daily(quarters, range_start, range_end);
    auto bundle = data::make_bundle(country, std::move(observed), std::move(stringency),
                                    std::move(gdp_daily), population);

    const std::string bundle_path = common.output_dir + "/bundle.json";
    std::filesystem::create_directories(common.output_dir);
    bundle.save(bundle_path);

    json report;
    report["bundle"] = "bundle.json"; // relative, so reruns into other
                                      // directories stay byte-identical
    report["days"] = bundle.observed.size();
    report["warnings"] = {{"clipped_negative_values", warnings.clipped_negative_values},
                          {"monotonicity_violations", warnings.monotonicity_violations},
                          {"filled_stringency_days", warnings.filled_stringency_days},
                          {"interpolated_compartment_days",
                           warnings.interpolated_compartment_days}};
    write_json_artifact(common.output_dir + "/ingest_report.json", report, manifest);
    write_text(common.output_dir + "/manifest.json",
               manifest.to_json().dump(2) + "\n");

    const auto& sv = bundle.stringency.values();
    const auto [lo, hi] = std::minmax_element(sv.begin(), sv.end());
    std::cout << "bundle: " << bundle.observed.size() << " days, stringency min="
              << sig6(*lo) << " max=" << sig6(*hi) << " -> " << bundle_path << "\n";
    return 0;
}

int cmd_fit(const CommonOpts& common, const std::string& bundle_path,
            const std::string& model, std::size_t starts, double nu_seed_hi,
            const std::string& emit_env, std::size_t history_k)
{
    Manifest manifest;
    manifest.subcommand = "fit";
    manifest.seed = common.seed;
    manifest.add_input(bundle_path);
    manifest.flags = {{"model", model},
                      {"starts", std::to_string(starts)},
                      {"nu_seed_hi", full(nu_seed_hi)}};

    const auto bundle = load_bundle(bundle_path);
    calib::FitOptions opts;
    opts.starts = starts;
    opts.nu_seed_hi = nu_seed_hi;

    const auto chain = run_fit(bundle, model, opts);
    print_fit(model, chain.fit);

    json report = fit_result_json(chain.fit);
    report["model"] = model;
    if (chain.windows) {
        report["chosen_window_length"] = chain.windows->chosen_length;
        write_text(common.output_dir + "/window_search.csv",
                   window_table_csv(*chain.windows, manifest));
    }
    write_json_artifact(common.output_dir + "/fit_" + model + ".json", report, manifest);

    if (!emit_env.empty()) {
        const json overrides = load_config_overrides(common.config_path);
        env::RewardConfig reward;
        apply_reward_overrides(overrides, reward);
        auto cfg = build_env_config(bundle, chain.fit, reward, history_k);
        cfg.to_json_file(emit_env);
        std::cout << "environment config -> " << emit_env << "\n";
    }
    return 0;
}

int cmd_window_search(const CommonOpts& common, const std::string& bundle_path,
                      double beta, double gamma, std::size_t starts, double nu_seed_hi)
{
    Manifest manifest;
    manifest.subcommand = "window-search";
    manifest.seed = common.seed;
    manifest.add_input(bundle_path);
    manifest.flags = {{"beta", full(beta)},
                      {"gamma", full(gamma)},
                      {"starts", std::to_string(starts)},
                      {"nu_seed_hi", full(nu_seed_hi)}};

    const auto bundle = load_bundle(bundle_path);
    calib::FitOptions opts;
    opts.starts = starts;
    opts.nu_seed_hi = nu_seed_hi;
    const auto ws =
        calib::window_search(bundle.observed, bundle.stringency, beta, gamma, opts);

    write_text(common.output_dir + "/window_search.csv", window_table_csv(ws, manifest));
    std::cout << "window  loss_sir      loss_i\n";
    for (const auto& e : ws.entries) {
        std::cout << (e.length == ws.chosen_length ? '*' : ' ') << e.length << "\t"
                  << sig6(e.loss_sir) << "\t" << sig6(e.loss_i) << "\n";
    }
    std::cout << "chosen window length: " << ws.chosen_length << "\n";
    return 0;
}

int cmd_fit_gdp(const CommonOpts& common, const std::string& bundle_path,
                const std::string& stringency_csv, const std::string& gdp_csv,
                const std::string& country, const std::string& start,
                const std::string& end)
{
    Manifest manifest;
    manifest.subcommand = "fit-gdp";
    manifest.seed = common.seed;
    manifest.flags = {{"country", country}};

    std::vector<double> stringency, gdp_daily;
    if (!bundle_path.empty()) {
        manifest.add_input(bundle_path);
        const auto bundle = load_bundle(bundle_path);
        stringency = bundle.stringency.values();
        gdp_daily = bundle.gdp_daily.values;
    } else {
        manifest.add_input(stringency_csv);
        manifest.add_input(gdp_csv);
        manifest.flags["start"] = start;
        manifest.flags["end"] = end;
        const Date range_start = Date::parse(start);
        const Date range_end = Date::parse(end);
        stringency =
            data::load_stringency_csv(stringency_csv, country, range_start, range_end)
                .values();
        gdp_daily = econ::quarterly_to_daily(data::load_gdp_csv(gdp_csv, country),
                                             range_start, range_end)
                        .values;
    }

    const auto model = econ::fit_cubic(stringency, gdp_daily);
    json report;
    report["country"] = country;
    report["a"] = model.a;
    report["b"] = model.b;
    report["c"] = model.c;
    report["d"] = model.d;
    report["r"] = model.r;
    report["r2"] = model.r2;
    report["p_value"] = model.p_value;
    report["n_points"] = model.n_points;
    report["degenerate"] = model.degenerate;
    write_json_artifact(common.output_dir + "/gdp_model_" + country + ".json", report,
                        manifest);

    std::cout << country << ": a=" << sig6(model.a) << " b=" << sig6(model.b)
              << " c=" << sig6(model.c) << " d=" << sig6(model.d)
              << " r=" << sig6(model.r) << " r2=" << sig6(model.r2)
              << " p=" << sig6(model.p_value) << "\n";
    return 0;
}

int cmd_train(const CommonOpts& common, const std::string& env_path,
              std::size_t total_steps)
{
    Manifest manifest;
    manifest.subcommand = "train";
    manifest.seed = common.seed;
    manifest.add_input(env_path);
    manifest.flags = {{"total_steps", std::to_string(total_steps)}};

    const json overrides = load_config_overrides(common.config_path);
    rl::TrainConfig tc;
    apply_train_overrides(overrides, tc);
    if (total_steps > 0) {
        tc.total_steps = total_steps;
    }
    tc.seed = common.seed;

    auto cfg = env::EnvConfig::from_json_file(env_path);
    env::Environment environment(cfg);
    rl::EpidemicEnvAdapter adapter(environment);

    rl::QNetworkConfig qc;
    qc.history_k = cfg.history_k;
    rl::QNetwork online(qc, rl::derive_seed(tc.seed, 100));
    rl::QNetwork target(qc, rl::derive_seed(tc.seed, 101));

    const auto log = rl::train(adapter, online, target, tc);

    std::filesystem::create_directories(common.output_dir);
    rl::save_checkpoint(common.output_dir + "/checkpoint.json", online, tc);
    write_text(common.output_dir + "/training_log.csv",
               manifest.csv_header() + log.to_csv());
    write_text(common.output_dir + "/manifest.json",
               manifest.to_json().dump(2) + "\n");

    std::cout << "trained " << tc.total_steps << " steps (" << log.updates
              << " updates, " << log.episode_rewards.size() << " episodes)\n";
    for (std::size_t k = 0; k < log.episode_rewards.size(); ++k) {
        std::cout << "episode " << k << " reward " << sig6(log.episode_rewards[k])
                  << "\n";
    }
    return 0;
}

int cmd_rollout(const CommonOpts& common, const std::string& env_path,
                const std::string& checkpoint_path, std::size_t filter_k,
                double epsilon)
{
    Manifest manifest;
    manifest.subcommand = "rollout";
    manifest.seed = common.seed;
    manifest.add_input(env_path);
    manifest.add_input(checkpoint_path);
    manifest.flags = {{"filter", std::to_string(filter_k)},
                      {"epsilon", full(epsilon)}};

    auto cfg = env::EnvConfig::from_json_file(env_path);
    env::Environment environment(cfg);
    const auto checkpoint = rl::load_checkpoint(checkpoint_path);

    const auto result = rl::rollout(checkpoint.net, environment, epsilon == 0.0,
                                    epsilon, common.seed);

    std::vector<double> stringency;
    for (const auto& o : result.outcomes) {
        stringency.push_back(o.state.stringency);
    }
    const auto filtered = rl::median_filter(stringency, filter_k);

    write_text(common.output_dir + "/rollout.csv",
               outcomes_csv(result.outcomes, "rl", manifest, &filtered));
    std::cout << "rollout: cumulative reward " << sig6(result.cumulative_reward)
              << ", discounted " << sig6(result.discounted_reward) << "\n";
    return 0;
}

int cmd_replay_baseline(const CommonOpts& common, const std::string& env_path,
                        const std::string& bundle_path)
{
    Manifest manifest;
    manifest.subcommand = "replay-baseline";
    manifest.seed = common.seed;
    manifest.add_input(env_path);
    manifest.add_input(bundle_path);

    auto cfg = env::EnvConfig::from_json_file(env_path);
    const auto bundle = load_bundle(bundle_path);
    const auto result = env::replay_historical(cfg, bundle.stringency);

    write_text(common.output_dir + "/baseline.csv",
               outcomes_csv(result.outcomes, "actual", manifest, nullptr));
    std::cout << "historical replay: cumulative reward "
              << sig6(result.cumulative_reward) << "\n";
    return 0;
}

int cmd_export_plots(const CommonOpts& common, const std::string& rollout_path,
                     const std::string& baseline_path, const std::string& bundle_path)
{
    Manifest manifest;
    manifest.subcommand = "export-plots";
    manifest.seed = common.seed;
    manifest.add_input(rollout_path);
    manifest.add_input(baseline_path);
    manifest.add_input(bundle_path);

    const auto rl_rows = read_outcomes_csv(rollout_path);
    const auto base_rows = read_outcomes_csv(baseline_path);
    const auto bundle = load_bundle(bundle_path);

    const auto column = [](const std::vector<std::map<std::string, double>>& rows,
                           const std::string& name) {
        std::vector<double> out;
        for (const auto& row : rows) {
            out.push_back(row.at(name));
        }
        return out;
    };

    std::vector<double> actual_infected;
    for (double v : bundle.observed.i()) {
        actual_infected.push_back(v / bundle.population);
    }

    const std::string dir = common.output_dir + "/plots";
    export_panel(dir, "panel_a_stringency", "Stringency index", "index",
                 {{"actual", "#1f77b4", bundle.stringency.values()},
                  {"rl", "#d62728", column(rl_rows, "stringency")},
                  {"rl_filtered", "#2ca02c", column(rl_rows, "filtered_stringency")}},
                 manifest);
    export_panel(dir, "panel_b_infections", "Infected proportion", "proportion",
                 {{"actual", "#1f77b4", actual_infected},
                  {"modelled", "#ff7f0e", column(base_rows, "infected_prop")},
                  {"rl", "#d62728", column(rl_rows, "infected_prop")}},
                 manifest);
    export_panel(dir, "panel_c_gdp", "Normalized GDP", "min-max normalized",
                 {{"modelled", "#ff7f0e", column(base_rows, "norm_gdp")},
                  {"rl", "#d62728", column(rl_rows, "norm_gdp")}},
                 manifest);
    export_panel(dir, "panel_d_r_eff", "Effective reproduction number", "R_e",
                 {{"modelled", "#ff7f0e", column(base_rows, "r_eff")},
                  {"rl", "#d62728", column(rl_rows, "r_eff")}},
                 manifest);
    export_panel(dir, "panel_e_reward", "Daily reward", "reward",
                 {{"modelled", "#ff7f0e", column(base_rows, "reward")},
                  {"rl", "#d62728", column(rl_rows, "reward")}},
                 manifest);
    export_panel(dir, "panel_f_cumulative_reward", "Cumulative reward", "reward",
                 {{"modelled", "#ff7f0e", column(base_rows, "cumulative_reward")},
                  {"rl", "#d62728", column(rl_rows, "cumulative_reward")}},
                 manifest);
    std::cout << "plots -> " << dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Epidemic-control toolkit: SIR calibration, stringency-GDP "
                 "modelling and value-based policy learning"};
    app.require_subcommand(1);

    CommonOpts common;
    const std::string data_dir = default_data_dir();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build a dataset bundle from CSVs");
    std::string in_stringency = data_dir + "/owid_stringency.csv";
    std::string in_cases = data_dir + "/worldometer_cases.csv";
    std::string in_gdp = data_dir + "/oecd_gdp.csv";
    std::string country = "IND";
    double population = 1.38e9;
    std::string start = "2020-05-01", end = "2022-11-01";
    bool subtract_deaths = false;
    int max_gap = 3;
    ingest->add_option("--stringency-csv", in_stringency, "OWID-schema stringency CSV");
    ingest->add_option("--cases-csv", in_cases, "Worldometer-schema cases CSV");
    ingest->add_option("--gdp-csv", in_gdp, "OECD-schema quarterly GDP CSV");
    ingest->add_option("--country", country, "ISO country code");
    ingest->add_option("--population", population, "Population N");
    ingest->add_option("--start", start, "Range start (YYYY-MM-DD)");
    ingest->add_option("--end", end, "Range end (YYYY-MM-DD)");
    ingest->add_flag("--subtract-deaths", subtract_deaths,
                     "Fold a deaths column out of active infections");
    ingest->add_option("--max-gap", max_gap, "Longest compartment gap to interpolate");
    add_common(ingest, common);

    // fit
    auto* fit = app.add_subcommand("fit", "Calibrate an epidemic model variant");
    std::string bundle_path = "out/bundle.json";
    std::string model = "final";
    std::size_t starts = 8;
    double nu_seed_hi = 1e-4;
    std::string emit_env;
    std::size_t history_k = 30;
    fit->add_option("--bundle", bundle_path, "Dataset bundle file");
    fit->add_option("--model", model, "simple | lockdown | lockdown-vax | final");
    fit->add_option("--starts", starts, "Multi-start seed count");
    fit->add_option("--nu-seed-hi", nu_seed_hi, "Upper bound for vaccination-rate seeds");
    fit->add_option("--emit-env", emit_env,
                    "Write an environment config built from the fitted model");
    fit->add_option("--history-k", history_k, "History length for the emitted config");
    add_common(fit, common);

    // window-search
    auto* wsearch = app.add_subcommand("window-search",
                                       "Vaccination-window length search");
    double ws_beta = 0.0, ws_gamma = 0.0;
    wsearch->add_option("--bundle", bundle_path, "Dataset bundle file");
    wsearch->add_option("--beta", ws_beta, "Transmission rate")->required();
    wsearch->add_option("--gamma", ws_gamma, "Recovery rate")->required();
    wsearch->add_option("--starts", starts, "Multi-start seed count");
    wsearch->add_option("--nu-seed-hi", nu_seed_hi,
                        "Upper bound for vaccination-rate seeds");
    add_common(wsearch, common);

    // fit-gdp
    auto* fit_gdp = app.add_subcommand("fit-gdp", "Cubic stringency-GDP model");
    std::string gdp_bundle, gdp_stringency = data_dir + "/owid_stringency.csv";
    std::string gdp_csv = data_dir + "/oecd_gdp.csv";
    std::string gdp_country = "IND";
    std::string gdp_start = "2020-05-01", gdp_end = "2022-11-01";
    fit_gdp->add_option("--bundle", gdp_bundle, "Dataset bundle (country fixed)");
    fit_gdp->add_option("--stringency-csv", gdp_stringency, "OWID-schema CSV");
    fit_gdp->add_option("--gdp-csv", gdp_csv, "OECD-schema CSV");
    fit_gdp->add_option("--country", gdp_country, "ISO country code");
    fit_gdp->add_option("--start", gdp_start, "Range start");
    fit_gdp->add_option("--end", gdp_end, "Range end");
    add_common(fit_gdp, common);

    // train
    auto* train = app.add_subcommand("train", "Train the control agent");
    std::string env_path = "out/env.json";
    std::size_t total_steps = 0;
    train->add_option("--env", env_path, "Environment config file");
    train->add_option("--steps", total_steps, "Override total training steps");
    add_common(train, common);

    // rollout
    auto* rollout = app.add_subcommand("rollout", "Greedy policy rollout");
    std::string checkpoint_path = "out/checkpoint.json";
    std::size_t filter_k = 7;
    double epsilon = 0.0;
    rollout->add_option("--env", env_path, "Environment config file");
    rollout->add_option("--checkpoint", checkpoint_path, "Trained network checkpoint");
    rollout->add_option("--filter", filter_k, "Median-filter width (odd)");
    rollout->add_option("--epsilon", epsilon, "Epsilon-soft rollout probability");
    add_common(rollout, common);

    // replay-baseline
    auto* replay = app.add_subcommand("replay-baseline",
                                      "Replay the historical stringency series");
    replay->add_option("--env", env_path, "Environment config file");
    replay->add_option("--bundle", bundle_path, "Dataset bundle file");
    add_common(replay, common);

    // export-plots
    auto* plots = app.add_subcommand("export-plots", "Figure-panel CSVs and SVGs");
    std::string rollout_csv = "out/rollout.csv";
    std::string baseline_csv = "out/baseline.csv";
    plots->add_option("--rollout", rollout_csv, "Rollout CSV");
    plots->add_option("--baseline", baseline_csv, "Baseline CSV");
    plots->add_option("--bundle", bundle_path, "Dataset bundle file");
    add_common(plots, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ingest->parsed()) {
            return cmd_ingest(common, in_stringency, in_cases, in_gdp, country,
                              population, start, end, subtract_deaths, max_gap);
        }
        if (fit->parsed()) {
            return cmd_fit(common, bundle_path, model, starts, nu_seed_hi, emit_env,
                           history_k);
        }
        if (wsearch->parsed()) {
            return cmd_window_search(common, bundle_path, ws_beta, ws_gamma, starts,
                                     nu_seed_hi);
        }
        if (fit_gdp->parsed()) {
            return cmd_fit_gdp(common, gdp_bundle, gdp_stringency, gdp_csv, gdp_country,
                               gdp_start, gdp_end);
        }
        if (train->parsed()) {
            return cmd_train(common, env_path, total_steps);
        }
        if (rollout->parsed()) {
            return cmd_rollout(common, env_path, checkpoint_path, filter_k, epsilon);
        }
        if (replay->parsed()) {
            return cmd_replay_baseline(common, env_path, bundle_path);
        }
        if (plots->parsed()) {
            return cmd_export_plots(common, rollout_csv, baseline_csv, bundle_path);
        }
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const LookupError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const CoverageError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const AlignmentError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const FitError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const ModelHealthError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const DomainError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
}
