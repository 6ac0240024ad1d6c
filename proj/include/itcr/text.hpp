#ifndef ITCR_TEXT_HPP
#define ITCR_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace itcr::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

// Full-string parse; rejects trailing garbage, empty input and non-finite values.
bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

// Shortest text that reads back to the same double.
std::string format_exact(double v);
// Fixed notation, `digits` after the point.
std::string format_fixed(double v, int digits);
// Rounds half away from zero to 2 decimals; used for all reported percentages.
double round_half_up_2(double v);

} // namespace itcr::text

#endif // ITCR_TEXT_HPP
