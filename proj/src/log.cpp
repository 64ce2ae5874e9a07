#include "hwdse/log.hpp"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace hwdse {

std::shared_ptr<spdlog::logger> logger() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto log = spdlog::stderr_color_mt("hwdse");
        log->set_pattern("[%l] %v");
        const char* level = std::getenv("HWDSE_LOG_LEVEL");
        log->set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
        return log;
    }();
    return instance;
}

}  // namespace hwdse
