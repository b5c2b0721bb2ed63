#ifndef ADAPTKIT_TEXT_HPP
#define ADAPTKIT_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace adaptkit {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Escapes &, <, >, " for use in XML text and attribute values.
std::string xml_escape(std::string_view text);

std::vector<std::string> split(std::string_view text, char separator);

} // namespace adaptkit

#endif
