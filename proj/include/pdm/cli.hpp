#pragma once

// Command-line front end: configuration merge, pipelines and serializers.

#include "pdm/analysis.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdm::cli {

inline constexpr const char* kToolVersion = "1.0.0";
/// Relative output paths are resolved against this directory when it is set.
inline constexpr const char* kOutputDirVariable = "PDM_OUTPUT_DIR";

enum ExitCode : int { Success = 0, BadArguments = 1, NumericalFailure = 2, IoFailure = 3 };

/// Bad configuration; what() is the one-line diagnostic.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw key -> text pairs, keys in config-file spelling (underscores).
using KeyValues = std::map<std::string, std::string>;

enum class Command { Solve, Compare, Sweep, Converge };
enum class Format { Csv, Json };

struct RunConfig {
    Command command = Command::Solve;
    int dim = 3;
    int ell = 0;
    double lambda = 0.1;
    double omega = 1.0;
    int levels = 6;
    /// Empty means "not given"; the command then picks its default.
    std::optional<std::string> ordering;  // naive | bdd | both
    std::optional<std::string> method;    // fd | shoot | both
    std::optional<double> r_max;
    std::optional<int> grid_points;
    std::string output;  // empty: standard output
    Format format = Format::Csv;
    std::vector<double> lambda_list;
    std::vector<int> ell_list;
    std::string dump_eigenfunctions;  // directory; empty disables

    ModelParams params() const;
    std::vector<Ordering> orderings() const;
    std::vector<Method> methods() const;
};

/// Keys accepted in a config file and as flags.
const std::vector<std::string>& known_keys();

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view text);

/// Parse a key=value document. Throws ConfigError on malformed lines.
KeyValues parse_config_text(const std::string& text);

/// Merge defaults < file < flags and validate. Throws ConfigError (exit 1) or
/// IoError when the file cannot be read.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const KeyValues& flags,
                      Command command = Command::Solve);

/// One CSV row / JSON result.
struct ResultRow {
    Ordering ordering = Ordering::Naive;
    Method method = Method::FiniteDifference;
    int dim = 0;
    int ell = 0;
    int n = 0;
    double nu = 0.0;
    double lambda = 0.0;
    double omega = 0.0;
    std::optional<double> energy;
    double error_estimate = 0.0;
    double residual = 0.0;
    bool trusted = false;
    double r_max = 0.0;
    int grid_points = 0;
    bool converged = false;
    bool reduced_accuracy = false;
    std::string failure;
    std::vector<double> samples;
    std::vector<double> nodes;
};

inline constexpr const char* kCsvHeader =
    "ordering,method,N,l,n,nu,lambda,omega,E,error_estimate,residual,trusted,r_max,grid_points";

/// Everything a pipeline produced, ready for serialization.
struct RunReport {
    std::vector<ResultRow> rows;
    std::string comparisons_json = "{}";  // serialized object
    std::vector<std::string> notes;
};

/// Execute the pipeline without writing anything. ContinuumError and
/// AnalysisError propagate.
RunReport execute(const RunConfig& config);

/// Shortest round-trip decimal text.
std::string format_number(double value);

std::string to_csv(const RunReport& report);
/// Data document; the manifest timestamp is null so the bytes depend only on the config.
std::string to_json(const RunReport& report, const RunConfig& config);
/// Manifest sidecar with the wall-clock timestamp.
std::string manifest_json(const RunReport& report, const RunConfig& config, const std::string& timestamp);

/// Write the data file (and sidecar manifest / eigenfunction dumps). Throws IoError.
void emit_outputs(const RunReport& report, const RunConfig& config, std::ostream& stdout_stream);

/// Run and write; returns the exit code, diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point used by the executable.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pdm::cli
