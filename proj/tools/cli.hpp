#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace conequant::cli {

enum ExitCode { kPass = 0, kCheckFailure = 1, kUsageError = 2 };

/// One report cell. Doubles print with 17 significant digits.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t, bool>;

struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    bool pass = true;
};

enum class Format { kCsv, kJson };

std::string to_csv(const Table& t);
std::string to_json(const Table& t);

struct SymmetriesConfig {
    std::string model = "free";
    double k = 0.6;
    double omega = 1.0;
    std::uint64_t seed = 42;
    int samples = 200;
};

struct SpectrumConfig {
    std::string variant = "noether";
    double k = 0.6;
    double omega = 1.0;
    int pmax = 2;
    int nmax = 5;
    double r_max = 0.0;
    int grid = 2000;
    double tolerance = 1e-4;
};

struct ClassicalConfig {
    std::string model = "free";
    double k = 0.6;
    double omega = 1.0;
    std::vector<double> ic{0.0, 1.0, 0.0, 0.3, 0.8};
    double t_end = 10.0;
    double dt = 0.1;
    double rtol = 1e-10;
};

struct CheckPdeConfig {
    std::string variant = "noether";
    std::string model = "free";
    double k = 0.6;
    double omega = 1.0;
    std::uint64_t seed = 42;
    int samples = 50;
    std::string transcription = "corrected";
};

Table cmd_symmetries(const SymmetriesConfig& c);
Table cmd_spectrum(const SpectrumConfig& c);
Table cmd_classical(const ClassicalConfig& c);
Table cmd_check_pde(const CheckPdeConfig& c);

/// Parses argv, runs the subcommand and writes the report to --out (stdout
/// by default). Returns an ExitCode.
int run(int argc, const char* const* argv);

}  // namespace conequant::cli
