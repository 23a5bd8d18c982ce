#include "pdm/cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <tuple>

namespace pdm::cli {

using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string normalize_key(std::string key)
{
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

double parse_double(const std::string& key, std::string_view text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ConfigError("malformed number for " + key + ": '" + std::string(text) + "'");
    return v;
}

int parse_int(const std::string& key, std::string_view text)
{
    int v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end)
        throw ConfigError("malformed number for " + key + ": '" + std::string(text) + "'");
    return v;
}

std::vector<std::string> split_list(std::string_view text)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        parts.push_back(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

void apply(RunConfig& c, const std::string& key, const std::string& value)
{
    if (key == "dim") c.dim = parse_int(key, value);
    else if (key == "ell") c.ell = parse_int(key, value);
    else if (key == "lambda") c.lambda = parse_double(key, value);
    else if (key == "omega") c.omega = parse_double(key, value);
    else if (key == "levels") c.levels = parse_int(key, value);
    else if (key == "ordering") {
        if (value != "naive" && value != "bdd" && value != "both")
            throw ConfigError("ordering must be naive, bdd or both (got '" + value + "')");
        c.ordering = value;
    } else if (key == "method") {
        if (value != "fd" && value != "shoot" && value != "both")
            throw ConfigError("method must be fd, shoot or both (got '" + value + "')");
        c.method = value;
    } else if (key == "r_max") {
        c.r_max = parse_double(key, value);
        if (!(*c.r_max > 0.0)) throw ConfigError("r_max must be > 0");
    } else if (key == "grid_points") {
        c.grid_points = parse_int(key, value);
        if (*c.grid_points < kMinGridPoints)
            throw ConfigError("grid_points must be ≥ " + std::to_string(kMinGridPoints));
    } else if (key == "output") c.output = value;
    else if (key == "format") {
        if (value == "csv") c.format = Format::Csv;
        else if (value == "json") c.format = Format::Json;
        else throw ConfigError("format must be csv or json (got '" + value + "')");
    } else if (key == "lambda_list") {
        c.lambda_list.clear();
        for (const auto& item : split_list(value)) {
            const double v = parse_double(key, item);
            if (v < 0.0) throw ConfigError("lambda_list entries must be ≥ 0");
            c.lambda_list.push_back(v);
        }
    } else if (key == "ell_list") {
        c.ell_list.clear();
        for (const auto& item : split_list(value)) {
            const int v = parse_int(key, item);
            if (v < 0) throw ConfigError("ell_list entries must be ≥ 0");
            c.ell_list.push_back(v);
        }
    } else if (key == "dump_eigenfunctions") c.dump_eigenfunctions = value;
    else throw ConfigError("unknown key '" + key + "'");
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string timestamp_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

SolveOptions solve_options(const RunConfig& c)
{
    SolveOptions o;
    o.overrides.r_max = c.r_max;
    o.overrides.interior_points = c.grid_points;
    return o;
}

Spectrum solve_one(const ModelParams& p, Ordering o, Method m, const SolveOptions& opts)
{
    if (m == Method::FiniteDifference)
        return refine_and_extrapolate(p, o, p.levels(), opts.overrides, opts.fd_tol);
    return shoot_spectrum(p, o, p.levels(), opts.overrides, opts.shoot_tol);
}

ResultRow base_row(const ModelParams& p, Ordering o, Method m, int n)
{
    ResultRow row;
    row.ordering = o;
    row.method = m;
    row.dim = p.dimension();
    row.ell = p.ell();
    row.n = n;
    row.nu = p.nu(n);
    row.lambda = p.lambda();
    row.omega = p.omega();
    row.reduced_accuracy = p.reduced_accuracy_boundary();
    return row;
}

void append_spectrum(std::vector<ResultRow>& rows, const Spectrum& s)
{
    const auto nodes = s.grid.nodes();
    for (int n = 0; n < s.params.levels(); ++n) {
        auto row = base_row(s.params, s.ordering, s.method, n);
        row.r_max = s.grid.r_max();
        row.grid_points = s.grid.interior_points();
        if (n < static_cast<int>(s.levels.size())) {
            const auto& level = s.levels[n];
            row.converged = level.converged;
            if (level.converged) row.energy = level.energy;
            row.error_estimate = level.error_estimate;
            row.residual = level.residual;
            row.trusted = level.trusted;
            row.failure = level.failure;
            row.samples = level.samples;
            if (!row.samples.empty()) row.nodes = nodes;
        } else {
            row.failure = "level not computed";
        }
        rows.push_back(std::move(row));
    }
}

void append_failure(std::vector<ResultRow>& rows, const ModelParams& p, Ordering o, Method m,
                    const std::string& why)
{
    for (int n = 0; n < p.levels(); ++n) {
        auto row = base_row(p, o, m, n);
        row.failure = why;
        rows.push_back(std::move(row));
    }
}

void solve_grid(std::vector<ResultRow>& rows, const ModelParams& p, const RunConfig& c)
{
    const auto opts = solve_options(c);
    for (auto o : c.orderings())
        for (auto m : c.methods()) {
            try {
                append_spectrum(rows, solve_one(p, o, m, opts));
            } catch (const ContinuumError& e) {
                append_failure(rows, p, o, m, e.what());
            } catch (const ShootingError& e) {
                append_failure(rows, p, o, m, e.what());
            }
        }
}

json value_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json method_json(const MethodValue& v)
{
    return {{"E", value_json(v.energy)}, {"error_estimate", v.error}, {"trusted", v.trusted}, {"failure", v.failure}};
}

json record_json(const LevelRecord& r)
{
    return {{"l", r.l},
            {"n", r.n},
            {"nu", r.nu},
            {"naive_closed_form", r.naive_closed},
            {"naive_fd", method_json(r.naive_fd)},
            {"naive_shoot", method_json(r.naive_shoot)},
            {"bdd_fd", method_json(r.bdd_fd)},
            {"bdd_shoot", method_json(r.bdd_shoot)},
            {"naive_method_gap", value_json(r.naive_method_gap)},
            {"bdd_method_gap", value_json(r.bdd_method_gap)},
            {"naive_reliable", r.naive_reliable},
            {"bdd_reliable", r.bdd_reliable},
            {"ordering_gap", value_json(r.ordering_gap)},
            {"ordering_gap_error", value_json(r.ordering_gap_error)},
            {"orderings_differ", r.orderings_differ},
            {"ordering_gap_provenance", "E(bdd, fd extrapolated) - E(naive, fd extrapolated)"}};
}

RunReport run_compare(const RunConfig& c)
{
    RunReport out;
    const auto p = c.params();
    out.notes = standard_notes(p);
    json comparisons = json::object();
    comparisons["threshold"] = value_json(continuum_threshold(p));
    try {
        const auto report = compare_orderings(p, p.levels(), solve_options(c));
        const auto orderings = c.orderings();
        const auto methods = c.methods();
        for (const auto& s : report.spectra)
            if (std::count(orderings.begin(), orderings.end(), s.ordering) &&
                std::count(methods.begin(), methods.end(), s.method))
                append_spectrum(out.rows, s);
        comparisons["records"] = json::array();
        for (const auto& r : report.records) comparisons["records"].push_back(record_json(r));
    } catch (const ContinuumError& e) {
        for (auto o : c.orderings())
            for (auto m : c.methods()) append_failure(out.rows, p, o, m, e.what());
        comparisons["records"] = json::array();
    }
    out.comparisons_json = comparisons.dump();
    return out;
}

RunReport run_sweep(const RunConfig& c)
{
    RunReport out;
    const auto lambdas = c.lambda_list.empty() ? std::vector<double>{c.lambda} : c.lambda_list;
    const auto ells = c.ell_list.empty() ? std::vector<int>{c.ell} : c.ell_list;
    const auto base = c.params();
    std::set<std::string> seen;
    for (double lam : lambdas) {
        for (const auto& note : standard_notes(base.with_lambda(lam)))
            if (seen.insert(note).second) out.notes.push_back(note);
        for (int l : ells) solve_grid(out.rows, base.with_lambda(lam).with_ell(l), c);
    }
    return out;
}

RunReport run_converge(const RunConfig& c)
{
    RunReport out;
    const auto p = c.params();
    out.notes = standard_notes(p);
    const auto grids = halving_grids(c.grid_points.value_or(1000), 3);
    json studies = json::array();
    for (auto o : c.orderings())
        for (auto m : c.methods()) {
            ConvergenceStudy study;
            try {
                study = convergence_order(p, o, m, grids, p.levels(), c.r_max);
            } catch (const ContinuumError& e) {
                append_failure(out.rows, p, o, m, e.what());
                continue;
            }
            json js = {{"ordering", to_string(o)},
                       {"method", to_string(m)},
                       {"r_max", study.r_max},
                       {"grid_points", study.grid_points},
                       {"levels", json::array()}};
            for (const auto& level : study.levels) {
                js["levels"].push_back({{"n", level.n},
                                        {"energies", level.energies},
                                        {"orders", level.orders},
                                        {"failure", level.failure}});
                for (std::size_t g = 0; g < grids.size(); ++g) {
                    auto row = base_row(p, o, m, level.n);
                    const double e = level.energies[g];
                    // "order undefined" still carries valid energies.
                    row.converged = std::isfinite(e) && (level.failure.empty() || level.failure == "order undefined");
                    if (row.converged) row.energy = e;
                    row.error_estimate = g == 0 ? 0.0 : std::abs(e - level.energies[g - 1]);
                    row.trusted = row.converged;
                    if (const auto t = continuum_threshold(p))
                        row.trusted = row.trusted && e < *t - continuum_margin(*t, row.error_estimate);
                    row.r_max = study.r_max;
                    row.grid_points = grids[g];
                    row.failure = level.failure;
                    out.rows.push_back(std::move(row));
                }
            }
            studies.push_back(std::move(js));
        }
    out.comparisons_json = json{{"convergence", studies}}.dump();
    return out;
}

json effective_config(const RunConfig& c, bool with_destinations)
{
    json j = {{"command", to_string(c.command)},
              {"dim", c.dim},
              {"ell", c.ell},
              {"lambda", c.lambda},
              {"omega", c.omega},
              {"levels", c.levels},
              {"hbar", ModelParams::hbar}};
    std::string ordering = c.ordering.value_or(c.command == Command::Sweep ? "naive" : "both");
    std::string method = c.method.value_or(c.command == Command::Sweep ? "fd" : "both");
    j["ordering"] = ordering;
    j["method"] = method;
    j["r_max"] = c.r_max ? json(*c.r_max) : json(nullptr);
    if (c.grid_points) j["grid_points"] = *c.grid_points;
    else j["grid_points"] = nullptr;
    j["format"] = c.format == Format::Csv ? "csv" : "json";
    j["lambda_list"] = c.lambda_list;
    j["ell_list"] = c.ell_list;
    if (with_destinations) {
        j["output"] = c.output;
        j["dump_eigenfunctions"] = c.dump_eigenfunctions;
    }
    return j;
}

json runs_json(const RunReport& report)
{
    std::vector<std::tuple<std::string, std::string, double, int, double, int>> runs;
    for (const auto& r : report.rows)
        runs.emplace_back(std::string(to_string(r.ordering)), std::string(to_string(r.method)), r.lambda, r.ell,
                          r.r_max, r.grid_points);
    std::sort(runs.begin(), runs.end());
    runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
    json out = json::array();
    for (const auto& [o, m, lam, l, r_max, points] : runs)
        out.push_back({{"ordering", o}, {"method", m}, {"lambda", lam}, {"l", l}, {"r_max", r_max},
                       {"grid_points", points}});
    return out;
}

json manifest(const RunReport& report, const RunConfig& c, bool with_destinations, json timestamp)
{
    return {{"tool_version", kToolVersion},
            {"effective_config", effective_config(c, with_destinations)},
            {"runs", runs_json(report)},
            {"timestamp", std::move(timestamp)}};
}

std::filesystem::path resolve(const std::string& path)
{
    std::filesystem::path p(path);
    if (p.is_relative())
        if (const char* dir = std::getenv(kOutputDirVariable); dir && *dir) return std::filesystem::path(dir) / p;
    return p;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
    f.flush();
    if (!f) throw IoError("write failed for " + path.string());
}

void dump_eigenfunctions(const RunReport& report, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& r : report.rows) {
        if (r.samples.empty()) continue;
        std::string name = std::string(to_string(r.ordering)) + "_" + std::string(to_string(r.method)) + "_N" +
                           std::to_string(r.dim) + "_l" + std::to_string(r.ell) + "_lambda" +
                           format_number(r.lambda) + "_n" + std::to_string(r.n) + ".csv";
        std::string text = "r,R\n";
        for (std::size_t i = 0; i < r.samples.size(); ++i)
            text += format_number(r.nodes[i]) + "," + format_number(r.samples[i]) + "\n";
        write_file(dir / name, text);
    }
}

}  // namespace

ModelParams RunConfig::params() const
{
    try {
        return {dim, ell, lambda, omega, levels};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<Ordering> RunConfig::orderings() const
{
    const auto sel = ordering.value_or(command == Command::Sweep ? "naive" : "both");
    if (sel == "naive") return {Ordering::Naive};
    if (sel == "bdd") return {Ordering::BenDanielDuke};
    return {Ordering::Naive, Ordering::BenDanielDuke};
}

std::vector<Method> RunConfig::methods() const
{
    const auto sel = method.value_or(command == Command::Sweep ? "fd" : "both");
    if (sel == "fd") return {Method::FiniteDifference};
    if (sel == "shoot") return {Method::Shooting};
    return {Method::FiniteDifference, Method::Shooting};
}

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{"dim",    "ell",         "lambda", "omega",       "levels",
                                               "ordering", "method",    "r_max",  "grid_points", "output",
                                               "format", "lambda_list", "ell_list", "dump_eigenfunctions"};
    return keys;
}

std::string_view to_string(Command command)
{
    switch (command) {
    case Command::Solve: return "solve";
    case Command::Compare: return "compare";
    case Command::Sweep: return "sweep";
    case Command::Converge: return "converge";
    }
    return "solve";
}

std::optional<Command> parse_command(std::string_view text)
{
    for (auto c : {Command::Solve, Command::Compare, Command::Sweep, Command::Converge})
        if (text == to_string(c)) return c;
    return std::nullopt;
}

KeyValues parse_config_text(const std::string& text)
{
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
        const auto key = normalize_key(trim(std::string_view(body).substr(0, eq)));
        if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
        kv[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return kv;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const KeyValues& flags, Command command)
{
    RunConfig config;
    config.command = command;
    if (file)
        for (const auto& [key, value] : parse_config_text(read_file(*file))) apply(config, key, value);
    for (const auto& [key, value] : flags) apply(config, normalize_key(key), value);
    config.params();
    if (command == Command::Converge && config.grid_points && config.levels > *config.grid_points)
        throw ConfigError("levels must not exceed grid_points");
    return config;
}

RunReport execute(const RunConfig& config)
{
    RunReport report;
    switch (config.command) {
    case Command::Solve:
        report.notes = standard_notes(config.params());
        solve_grid(report.rows, config.params(), config);
        break;
    case Command::Compare: report = run_compare(config); break;
    case Command::Sweep: report = run_sweep(config); break;
    case Command::Converge: report = run_converge(config); break;
    }
    std::stable_sort(report.rows.begin(), report.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.lambda, a.ell, a.n, a.ordering, a.method) <
               std::tie(b.lambda, b.ell, b.n, b.ordering, b.method);
    });
    return report;
}

std::string format_number(double value)
{
    if (!std::isfinite(value)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string to_csv(const RunReport& report)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : report.rows) {
        const bool gridded = r.grid_points > 0;
        out += std::string(to_string(r.ordering)) + "," + std::string(to_string(r.method)) + "," +
               std::to_string(r.dim) + "," + std::to_string(r.ell) + "," + std::to_string(r.n) + "," +
               format_number(r.nu) + "," + format_number(r.lambda) + "," + format_number(r.omega) + "," +
               (r.energy ? format_number(*r.energy) : std::string()) + "," + format_number(r.error_estimate) + "," +
               format_number(r.residual) + "," + (r.trusted ? "true" : "false") + "," +
               (gridded ? format_number(r.r_max) : std::string()) + "," +
               (gridded ? std::to_string(r.grid_points) : std::string()) + "\n";
    }
    return out;
}

std::string to_json(const RunReport& report, const RunConfig& config)
{
    json results = json::array();
    for (const auto& r : report.rows) {
        const bool gridded = r.grid_points > 0;
        results.push_back({{"ordering", to_string(r.ordering)},
                           {"method", to_string(r.method)},
                           {"N", r.dim},
                           {"l", r.ell},
                           {"n", r.n},
                           {"nu", r.nu},
                           {"lambda", r.lambda},
                           {"omega", r.omega},
                           {"E", value_json(r.energy)},
                           {"error_estimate", r.error_estimate},
                           {"residual", r.residual},
                           {"trusted", r.trusted},
                           {"r_max", gridded ? json(r.r_max) : json(nullptr)},
                           {"grid_points", gridded ? json(r.grid_points) : json(nullptr)},
                           {"converged", r.converged},
                           {"reduced_accuracy", r.reduced_accuracy},
                           {"failure", r.failure}});
    }
    json doc = {{"manifest", manifest(report, config, false, nullptr)},
                {"results", std::move(results)},
                {"comparisons", json::parse(report.comparisons_json)},
                {"notes", report.notes}};
    return doc.dump(2) + "\n";
}

std::string manifest_json(const RunReport& report, const RunConfig& config, const std::string& timestamp)
{
    return manifest(report, config, true, timestamp).dump(2) + "\n";
}

void emit_outputs(const RunReport& report, const RunConfig& config, std::ostream& stdout_stream)
{
    const auto text = config.format == Format::Csv ? to_csv(report) : to_json(report, config);
    if (config.output.empty() || config.output == "-") {
        stdout_stream << text;
        stdout_stream.flush();
    } else {
        const auto path = resolve(config.output);
        write_file(path, text);
        write_file(path.string() + ".manifest.json", manifest_json(report, config, timestamp_now()));
    }
    if (!config.dump_eigenfunctions.empty()) dump_eigenfunctions(report, resolve(config.dump_eigenfunctions));
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    RunReport report;
    try {
        report = execute(config);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return BadArguments;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return BadArguments;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return NumericalFailure;
    }
    try {
        emit_outputs(report, config, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return IoFailure;
    }
    // One diagnostic line per failing (ordering, method, lambda, l, reason).
    std::set<std::tuple<std::string, std::string, double, int, std::string>> reported;
    for (const auto& r : report.rows)
        if (!r.converged &&
            reported.emplace(to_string(r.ordering), to_string(r.method), r.lambda, r.ell, r.failure).second)
            err << "level not converged: " << to_string(r.ordering) << " " << to_string(r.method)
                << " lambda=" << format_number(r.lambda) << " l=" << r.ell << " from n=" << r.n << ": " << r.failure
                << "\n";
    return reported.empty() ? Success : NumericalFailure;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Radial eigenvalues for the position-dependent-mass oscillator m(r) = 1 + lambda r^2"};
    app.name("pdmsolve");

    std::string command_text;
    app.add_option("command", command_text, "solve | compare | sweep | converge")->required();
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file");

    struct Flag {
        const char* name;
        const char* help;
        std::string value;
    };
    std::vector<Flag> flags{
        {"--dim", "spatial dimension N (default 3)", {}},
        {"--ell", "angular momentum l (default 0)", {}},
        {"--lambda", "mass parameter, m(r) = 1 + lambda r^2 (default 0.1)", {}},
        {"--omega", "oscillator frequency (default 1)", {}},
        {"--levels", "number of radial levels (default 6)", {}},
        {"--ordering", "naive | bdd | both", {}},
        {"--method", "fd | shoot | both", {}},
        {"--r-max", "box radius override", {}},
        {"--grid-points", "interior grid points override", {}},
        {"--output", "output file (default: standard output)", {}},
        {"--format", "csv | json (default csv)", {}},
        {"--lambda-list", "comma-separated lambda values (sweep)", {}},
        {"--ell-list", "comma-separated l values (sweep)", {}},
        {"--dump-eigenfunctions", "directory for (r, R) CSV dumps", {}},
    };
    std::vector<CLI::Option*> options;
    for (auto& f : flags) options.push_back(app.add_option(f.name, f.value, f.help)->allow_extra_args(false));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return BadArguments;
    }

    const auto command = parse_command(command_text);
    if (!command) {
        err << "error: unknown command '" << command_text << "'\n";
        return BadArguments;
    }
    KeyValues given;
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (options[i]->count() > 0) given[normalize_key(std::string(flags[i].name + 2))] = flags[i].value;

    RunConfig config;
    try {
        config = load_config(config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_path),
                             given, *command);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return BadArguments;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return IoFailure;
    }
    return run(config, out, err);
}

}  // namespace pdm::cli
