#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace hwdse {

/// Library logger (stderr). Level comes from HWDSE_LOG_LEVEL
/// (trace, debug, info, warn, err, critical, off); defaults to warn.
std::shared_ptr<spdlog::logger> logger();

}  // namespace hwdse
