#pragma once

#include <optional>
#include <string>

#include "crnf/io.hpp"
#include "crnf/report.hpp"

namespace crnf {

// exit codes: 0 decided, 1 error, 2 inconclusive
struct CommandResult {
    Json doc;
    int exit_code = 0;
};

struct NormalizeArgs {
    std::optional<int> degree;
    std::optional<std::string> mode;       // "exact" | "ball"
    std::optional<long> precision;
    std::optional<Triple> choice;
    std::optional<Rat> free_param;
};

CommandResult cmd_analyze(const HypersurfaceFile& file, std::optional<int> degree);
CommandResult cmd_normalize(const HypersurfaceFile& file, const NormalizeArgs& args);
CommandResult cmd_equiv(const HypersurfaceFile& a, const HypersurfaceFile& b,
                        std::optional<int> degree);
CommandResult cmd_check_map(const HypersurfaceFile& source, const MapFile& map,
                            const HypersurfaceFile& target);
CommandResult cmd_symmetry(const LambdaInput& lambda);

LambdaInput parse_lambda_arg(const std::string& text);
Triple parse_triple_arg(const std::string& text);
Rat parse_rat_arg(const std::string& text);

}  // namespace crnf
