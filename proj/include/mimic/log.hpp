#pragma once

#include <functional>
#include <string_view>

namespace mimic {

using WarningSink = std::function<void(std::string_view)>;

// Default sink writes to stderr. Passing an empty function silences warnings.
void set_warning_sink(WarningSink sink);
void log_warning(std::string_view message);

}  // namespace mimic
