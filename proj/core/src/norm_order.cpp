#include "qmult/norm_order.hpp"

#include <charconv>
#include <system_error>

namespace qmult {

std::string NormOrder::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value_);
  if (ec != std::errc()) return std::to_string(value_);
  return std::string(buf, end);
}

NormOrder NormOrder::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf" || text == "\xE2\x88\x9E") {
    return infinity();
  }
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("cannot parse norm order '" + text + "'");
  }
  return NormOrder(v);
}

}  // namespace qmult
