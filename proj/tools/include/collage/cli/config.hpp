#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "collage/forward.hpp"
#include "collage/inverse.hpp"

namespace collage::cli {

/// Bad configuration or command-line input. line() is 1-based, 0 if unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

struct RunConfig {
    ProblemSpec spec;
    std::vector<int> m_list{3, 7, 15, 31, 63};
    std::vector<int> targets{3, 7, 15, 31};
    int n = 7;
    BoxConstraint box;
    ObjectiveMode mode = ObjectiveMode::l2;
    int grid = 251;
    std::optional<std::string> out;
    std::optional<std::string> plot;
    std::optional<std::string> command;

    /// Checks every cross-field constraint; throws ConfigError.
    void validate() const;
};

/// Parses `key = value` lines. '#' starts a comment outside quotes.
///
///   lambda1, lambda2, alpha1, alpha2, beta1, beta2   real, or quoted constant expression (required)
///   f, g                                            quoted expression in x (required)
///   exact_u, exact_v                                quoted expression in x
///   m, targets                                      [int, ...]
///   n, grid                                         int
///   box                                             [l1_min, l1_max, l2_min, l2_max]
///   mode                                            paper-abs-sum | l1 | l2 | dual-norm
///   out, plot, command                              string
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// The two-equation reference problem with box [0.5,3]^2 and default lists.
RunConfig reference_config();

}  // namespace collage::cli
