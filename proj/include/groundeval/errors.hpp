/// @file errors.hpp
/// @brief Error taxonomy shared by all modules, mapped to CLI exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace groundeval {

/// Broad failure classes. The CLI maps each to a distinct exit code so shell
/// callers can tell a bad flag from a replay miss without parsing stderr.
enum class ErrorCategory {
    config,      ///< bad flags, malformed input files, invalid parameters
    network,     ///< HTTP failure after bounded retries, timeouts
    replay_miss, ///< replay mode asked for a digest the store does not hold
    statistics,  ///< undefined statistic (empty series, no discordant pairs)
    internal,    ///< bugs and everything else
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

  private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& message) : Error(ErrorCategory::config, message) {}
};

struct NetworkError : Error {
    explicit NetworkError(const std::string& message) : Error(ErrorCategory::network, message) {}
};

struct ReplayMissError : Error {
    explicit ReplayMissError(const std::string& message)
        : Error(ErrorCategory::replay_miss, message) {}
};

struct StatisticsError : Error {
    explicit StatisticsError(const std::string& message)
        : Error(ErrorCategory::statistics, message) {}
};

/// Exit code contract: 0 success, 2 config, 3 network, 4 replay miss,
/// 5 statistics, 1 anything else.
inline int exit_code_for(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::network: return 3;
        case ErrorCategory::replay_miss: return 4;
        case ErrorCategory::statistics: return 5;
        case ErrorCategory::internal: return 1;
    }
    return 1;
}

} // namespace groundeval
