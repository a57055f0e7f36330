#include "segreflow/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace segreflow {

log_level current_log_level() {
    static log_level lvl = [] {
        const char* env = std::getenv("SEGREFLOW_LOG");
        if (env == nullptr) return log_level::quiet;
        if (std::strcmp(env, "trace") == 0) return log_level::trace;
        if (std::strcmp(env, "info") == 0) return log_level::info;
        return log_level::quiet;
    }();
    return lvl;
}

void log_info(const std::string& msg) {
    if (current_log_level() >= log_level::info)
        std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_trace(const std::string& msg) {
    if (current_log_level() >= log_level::trace)
        std::fprintf(stderr, "[trace] %s\n", msg.c_str());
}

}  // namespace segreflow
