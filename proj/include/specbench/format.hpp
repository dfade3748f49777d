#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specbench {

std::string fmt_fixed(double value, int decimals);

/// Six significant digits with trailing zeros kept ("440.000", "2.00000").
std::string fmt_sig6(double value);

/// RFC-4180 field quoting; fields with comma, quote, CR or LF are quoted.
std::string csv_field(std::string_view field);

/// One LF-terminated CSV record.
std::string csv_row(std::span<const std::string> fields);

/// Splits RFC-4180 text into records of fields. Accepts LF or CRLF.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace specbench
