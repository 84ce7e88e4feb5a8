#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "fracsol/error.hpp"

namespace fracsol {

inline constexpr int kReportVersion = 1;

struct CommandOptions {
    std::filesystem::path config;
    std::filesystem::path out = ".";
    std::filesystem::path field;
    int threads = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::array<int, 2>> copies;
    std::optional<double> eps;
    bool overlay = false;
};

/// Each command writes its artifacts under opt.out and returns the exit code
/// (0 or 3); validation and I/O failures are thrown as Error.
int cmd_solve(const CommandOptions& opt);
int cmd_sweep(const CommandOptions& opt);
int cmd_extend(const CommandOptions& opt);
int cmd_render(const CommandOptions& opt);
int cmd_diagnose(const CommandOptions& opt);
int cmd_stverify(const CommandOptions& opt);

int exit_code(ErrorKind kind);

}  // namespace fracsol
