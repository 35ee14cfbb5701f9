#ifndef GREEDYLAB_DETAIL_NUMIO_HPP
#define GREEDYLAB_DETAIL_NUMIO_HPP

#include <charconv>
#include <string>

namespace greedylab::detail {

// Shortest decimal that parses back to the same double.
inline std::string fmt_double(double x) {
  char buf[40];
  auto [end, err] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)err;
  return std::string(buf, end);
}

}  // namespace greedylab::detail

#endif
