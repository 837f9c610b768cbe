#pragma once

#include <string>

namespace fibrephase::io {

/// Fixed 17-significant-digit rendering used by every CSV writer.
std::string format_double(double value);

}  // namespace fibrephase::io
