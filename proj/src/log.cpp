#include "mimic/log.hpp"

#include <iostream>
#include <mutex>

namespace mimic {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

WarningSink& sink() {
    static WarningSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
    std::lock_guard lock(sink_mutex());
    sink() = std::move(s);
}

void log_warning(std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) sink()(message);
}

}  // namespace mimic
