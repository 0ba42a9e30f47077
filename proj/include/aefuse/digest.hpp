#pragma once

#include <string>
#include <string_view>

namespace aefuse {

std::string sha256_hex(std::string_view bytes);

}  // namespace aefuse
